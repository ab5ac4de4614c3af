//! Lego blocks, tensor networks and Bell-projection contraction.
//!
//! A lego is a stabilizer state on its legs. Gluing leg `a` to leg `b`
//! projects the pair onto `|Φ+⟩`: the surviving stabilizers are the elements
//! that commute with `X_aX_b` and `Z_aZ_b`. Each of them restricts to one of
//! `II, XX, YY, ZZ` on `{a, b}`; stripping that pair leaves a stabilizer of
//! the glued state. `⟨Φ+|(Y⊗Y) = -⟨Φ+|`, so stripping `YY` flips the sign.
//!
//! Global legs are numbered from 1 in insertion order, six per T6.

use crate::code::{Provenance, StabilizerCode};
use crate::error::{Error, Result};
use crate::gf2::{CheckMatrix, PauliString};

#[derive(Clone, Debug, PartialEq)]
pub struct Lego {
    pub name: String,
    state: CheckMatrix,
}

impl Lego {
    /// Validates that `state` is a pure stabilizer state on its legs.
    pub fn new(name: impl Into<String>, state: CheckMatrix) -> Result<Self> {
        state.check_commuting()?;
        let rank = state.rank();
        if rank != state.num_qubits() || state.len() != rank {
            return Err(Error::RankDeficient {
                expected: state.num_qubits(),
                found: rank,
            });
        }
        Ok(Lego {
            name: name.into(),
            state,
        })
    }

    pub fn num_legs(&self) -> usize {
        self.state.num_qubits()
    }

    pub fn state(&self) -> &CheckMatrix {
        &self.state
    }

    /// `"T6"`, `"H"` or `"S"` (the latter always sign-tracked).
    pub fn by_id(id: &str) -> Result<Lego> {
        match id {
            "T6" => Ok(t6()),
            "H" => gate_lego(Gate::H, PhaseMode::Free),
            "S" => gate_lego(Gate::S, PhaseMode::Tracked),
            other => Err(Error::InvalidConfig(format!("unknown lego `{other}`"))),
        }
    }
}

/// The 6-leg encoding tensor of the [[4,2,2]] code. Legs 1 and 2 are the
/// logical legs, 3 to 6 physical.
pub fn t6() -> Lego {
    let state = CheckMatrix::from_strs(&[
        "IIXXXX", "IIZZZZ", "XIXXII", "ZIZIZI", "IXXIXI", "IZZZII",
    ])
    .expect("static generators");
    Lego::new("T6", state).expect("T6 is a stabilizer state")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhaseMode {
    #[default]
    Free,
    Tracked,
}

/// Choi state `(I ⊗ U)|Φ+⟩` of a single-qubit gate; leg 1 is the input.
pub fn gate_lego(gate: Gate, mode: PhaseMode) -> Result<Lego> {
    let (name, rows): (&str, &[&str]) = match gate {
        Gate::H => ("H", &["XZ", "ZX"]),
        Gate::S => {
            if mode == PhaseMode::Free {
                return Err(Error::PhaseRequired("the S lego"));
            }
            ("S", &["+XY", "+ZZ"])
        }
    };
    let mut state = CheckMatrix::from_strs(rows)?;
    if mode == PhaseMode::Tracked {
        state = state.signed();
    }
    Lego::new(name, state)
}

/// Legos plus contracted edges, with the glued state kept up to date.
///
/// Signs are always tracked internally, phase-free legos counting as all
/// `+1`, so contractions onto the null state are caught in every mode. The
/// public state and codes drop the signs unless some lego carries them.
#[derive(Clone, Debug)]
pub struct TensorNetwork {
    legos: Vec<Lego>,
    edges: Vec<(usize, usize)>,
    /// Lego index of each global leg (0-based position = leg - 1).
    owner: Vec<usize>,
    used: Vec<bool>,
    /// Global legs not in any edge, increasing; column order of `state`.
    dangling: Vec<usize>,
    state: CheckMatrix,
    /// Whether any lego is phase-tracked.
    tracked: bool,
}

impl Default for TensorNetwork {
    fn default() -> Self {
        Self::new()
    }
}

impl TensorNetwork {
    pub fn new() -> Self {
        TensorNetwork {
            legos: Vec::new(),
            edges: Vec::new(),
            owner: Vec::new(),
            used: Vec::new(),
            dangling: Vec::new(),
            state: CheckMatrix::empty(0).signed(),
            tracked: false,
        }
    }

    pub fn legos(&self) -> &[Lego] {
        &self.legos
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_legs(&self) -> usize {
        self.owner.len()
    }

    pub fn dangling(&self) -> &[usize] {
        &self.dangling
    }

    pub fn is_used(&self, leg: usize) -> bool {
        leg >= 1 && leg <= self.used.len() && self.used[leg - 1]
    }

    /// Lego index (0-based) owning a global leg.
    pub fn owner(&self, leg: usize) -> Option<usize> {
        leg.checked_sub(1).and_then(|i| self.owner.get(i).copied())
    }

    pub fn add_lego(&self, lego: Lego) -> TensorNetwork {
        let mut next = self.clone();
        next.push_lego(lego);
        next
    }

    pub fn push_lego(&mut self, lego: Lego) {
        let idx = self.legos.len();
        let first = self.owner.len() + 1;
        for i in 0..lego.num_legs() {
            self.owner.push(idx);
            self.used.push(false);
            self.dangling.push(first + i);
        }
        self.tracked |= lego.state().is_signed();
        self.state = self.state.direct_sum(&lego.state().signed());
        self.legos.push(lego);
    }

    /// Check that `(a, b)` may be contracted.
    pub fn validate_edge(&self, a: usize, b: usize) -> Result<()> {
        for leg in [a, b] {
            if leg == 0 || leg > self.owner.len() {
                return Err(Error::LegOutOfRange(leg));
            }
            if self.used[leg - 1] {
                return Err(Error::LegReused(leg));
            }
        }
        if a == b {
            return Err(Error::SelfEdge(a));
        }
        Ok(())
    }

    pub fn contract(&self, a: usize, b: usize) -> Result<TensorNetwork> {
        let mut next = self.clone();
        next.push_edge(a, b)?;
        Ok(next)
    }

    pub fn push_edge(&mut self, a: usize, b: usize) -> Result<()> {
        self.validate_edge(a, b)?;
        let ia = self.dangling.binary_search(&a).expect("dangling leg");
        let ib = self.dangling.binary_search(&b).expect("dangling leg");
        let state = bell_project(&self.state, ia, ib).map_err(|e| match e {
            Error::ContractionInconsistent(..) => Error::ContractionInconsistent(a, b),
            other => other,
        })?;
        self.state = state;
        self.dangling.retain(|&l| l != a && l != b);
        self.used[a - 1] = true;
        self.used[b - 1] = true;
        self.edges.push((a, b));
        Ok(())
    }

    /// True if the two legs already belong to one connected component.
    pub fn connected(&self, a: usize, b: usize) -> bool {
        let (Some(la), Some(lb)) = (self.owner(a), self.owner(b)) else {
            return false;
        };
        let mut parent: Vec<usize> = (0..self.legos.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let ru = find(&mut parent, self.owner[u - 1]);
            let rv = find(&mut parent, self.owner[v - 1]);
            parent[ru] = rv;
        }
        find(&mut parent, la) == find(&mut parent, lb)
    }

    /// Stabilizer group of the state on the dangling legs, columns in
    /// increasing global leg order.
    pub fn state(&self) -> CheckMatrix {
        if self.tracked {
            self.state.clone()
        } else {
            self.state.unsigned()
        }
    }

    /// The state with its internally tracked signs, even for phase-free legos.
    pub fn signed_state(&self) -> &CheckMatrix {
        &self.state
    }

    /// Column of `state` holding a dangling global leg.
    pub fn column_of(&self, leg: usize) -> Option<usize> {
        self.dangling.binary_search(&leg).ok()
    }

    /// Encode with the given global legs as logical inputs; the remaining
    /// dangling legs become physical qubits in increasing order.
    pub fn to_code(&self, logical_legs: &[usize]) -> Result<StabilizerCode> {
        let mut cols = Vec::with_capacity(logical_legs.len());
        for &l in logical_legs {
            let c = self.column_of(l).ok_or_else(|| {
                if self.is_used(l) {
                    Error::LegReused(l)
                } else {
                    Error::LegOutOfRange(l)
                }
            })?;
            cols.push(c);
        }
        to_code(&self.state(), &cols)
    }
}

/// Stabilizer state of a network: rebuilds from scratch.
pub fn network_state(legos: &[Lego], edges: &[(usize, usize)]) -> Result<CheckMatrix> {
    let mut net = TensorNetwork::new();
    for l in legos {
        net.push_lego(l.clone());
    }
    for &(a, b) in edges {
        net.push_edge(a, b)?;
    }
    Ok(net.state())
}

/// Project columns `ia` and `ib` of a full-rank state onto `|Φ+⟩`.
pub fn bell_project(state: &CheckMatrix, ia: usize, ib: usize) -> Result<CheckMatrix> {
    let m = state.num_qubits();
    let signed = state.is_signed();
    let mut rows: Vec<PauliString> = state.rows().to_vec();
    let mut signs: Vec<bool> = (0..rows.len()).map(|i| state.sign(i)).collect();

    // Functionals whose kernel is the commutant of Z_aZ_b and X_aX_b.
    let fx = |p: &PauliString| p.x_bit(ia) ^ p.x_bit(ib);
    let fz = |p: &PauliString| p.z_bit(ia) ^ p.z_bit(ib);
    for f in [&fx as &dyn Fn(&PauliString) -> bool, &fz] {
        let Some(p) = rows.iter().position(f) else {
            continue;
        };
        let pivot = rows.remove(p);
        let psign = signs.remove(p);
        for (r, s) in rows.iter_mut().zip(signs.iter_mut()) {
            if f(r) {
                let e = r.product_phase(&pivot);
                r.mul_assign(&pivot);
                *s ^= psign ^ (e == 2);
            }
        }
    }

    let keep: Vec<usize> = (0..m).filter(|&q| q != ia && q != ib).collect();
    let mut out_rows = Vec::with_capacity(rows.len());
    let mut out_signs = Vec::with_capacity(rows.len());
    // The null state shows up as -I in the span of the restricted rows,
    // which may take a product of several rows to expose.
    for (r, s) in rows.iter().zip(&signs) {
        let stripped_y = r.x_bit(ia) && r.z_bit(ia);
        out_rows.push(r.restrict(&keep));
        out_signs.push(*s ^ stripped_y);
    }
    let out = if signed {
        CheckMatrix::with_signs(m - 2, out_rows, out_signs)?
    } else {
        CheckMatrix::new(m - 2, out_rows)?
    };
    let (red, rank) = out
        .rref_consistent()
        .ok_or(Error::ContractionInconsistent(ia, ib))?;
    if rank != m - 2 {
        return Err(Error::ContractionInconsistent(ia, ib));
    }
    Ok(red)
}

/// Split a full-rank state into a code: `logical_cols` become inputs.
pub fn to_code(state: &CheckMatrix, logical_cols: &[usize]) -> Result<StabilizerCode> {
    let m = state.num_qubits();
    let k = logical_cols.len();
    if k >= m && m > 0 || (m == 0 && k > 0) {
        return Err(Error::InvalidState(format!(
            "{k} logical legs leave no physical legs out of {m}"
        )));
    }
    let mut sorted = logical_cols.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k || sorted.iter().any(|&c| c >= m) {
        return Err(Error::InvalidState("bad logical leg set".into()));
    }
    if state.rank() != m || state.len() != m {
        return Err(Error::InvalidState(format!(
            "state on {m} legs has rank {}",
            state.rank()
        )));
    }

    let stab = state.kernel_intersection(logical_cols);
    if stab.len() != m - 2 * k {
        return Err(Error::InvalidState(format!(
            "logical legs are not fully encoded: stabilizer rank {} on {} legs",
            stab.len(),
            m - k
        )));
    }

    // Reduce on the logical columns so each X_l / Z_l has a unique preimage.
    let cols: Vec<usize> = logical_cols
        .iter().copied()
        .chain(logical_cols.iter().map(|&c| m + c))
        .collect();
    let mut rows = state.rows().to_vec();
    let mut pivots: Vec<Option<usize>> = vec![None; cols.len()];
    let mut taken = vec![false; rows.len()];
    for (ci, &c) in cols.iter().enumerate() {
        let Some(p) = (0..rows.len()).find(|&r| !taken[r] && rows[r].col(c)) else {
            return Err(Error::InvalidState("logical legs are not independent".into()));
        };
        taken[p] = true;
        pivots[ci] = Some(p);
        let pivot = rows[p].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != p && row.col(c) {
                row.mul_assign(&pivot);
            }
        }
    }
    let phys: Vec<usize> = (0..m).filter(|c| !logical_cols.contains(c)).collect();
    let mut logicals = Vec::with_capacity(2 * k);
    for i in 0..k {
        // X on logical leg i is the x column; Z is the z column.
        for ci in [i, k + i] {
            let row = &rows[pivots[ci].unwrap()];
            logicals.push(row.restrict(&phys));
        }
    }
    StabilizerCode::new("network", stab, logicals, Provenance::Network)
}
