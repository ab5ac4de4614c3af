//! Symplectic GF(2) representation of Pauli operators and stabilizer groups.
//!
//! A Pauli string on `n` qubits is a pair of bit vectors `(x, z)`. Qubit `q`
//! carries `X` when only `x[q]` is set, `Z` when only `z[q]` is set and `Y`
//! when both are set. Bits are packed into `u64` words, so `n <= 64` is a
//! single word per half.
//!
//! In the symplectic column order the X half comes first: column `c < n` is
//! `x[c]` and column `n + c` is `z[c]`.
//!
//! Signs are optional and live on [`CheckMatrix`] rows only. A row with sign
//! bit `s` stands for `(-1)^s` times the Hermitian Pauli built from the bit
//! pairs, with `Y = iXZ`. No other global phase is ever stored.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A Pauli operator without phase, stored as packed X and Z supports.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        let (x, z) = p.bits();
        s.set(q, x, z);
        s
    }

    /// Build from explicit per-qubit bits.
    pub fn from_bits(x: &[bool], z: &[bool]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch(x.len(), z.len()));
        }
        let mut s = Self::identity(x.len());
        for q in 0..x.len() {
            s.set(q, x[q], z[q]);
        }
        Ok(s)
    }

    /// Build from packed words. Bits beyond `n` must be clear.
    pub fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        assert_eq!(x.len(), words_for(n));
        assert_eq!(z.len(), words_for(n));
        PauliString { n, x, z }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        assert!(q < self.n, "qubit {q} out of range for n = {}", self.n);
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// Bit at symplectic column `c` (X half first).
    #[inline]
    pub fn col(&self, c: usize) -> bool {
        if c < self.n {
            self.x_bit(c)
        } else {
            self.z_bit(c - self.n)
        }
    }

    #[inline]
    fn flip_col(&mut self, c: usize) {
        if c < self.n {
            self.x[c / 64] ^= 1 << (c % 64);
        } else {
            let c = c - self.n;
            self.z[c / 64] ^= 1 << (c % 64);
        }
    }

    pub fn wt_x(&self) -> usize {
        self.x.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn wt_z(&self) -> usize {
        self.z.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn wt_total(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Commutation test without the length check.
    #[inline]
    pub fn commutes_with(&self, other: &Self) -> bool {
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc += ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        acc.is_multiple_of(2)
    }

    /// In-place product, phase dropped.
    #[inline]
    pub fn mul_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Power of `i` in `self * other = i^e * P` where both sides use
    /// Hermitian letters. Even for commuting operands.
    pub fn product_phase(&self, other: &Self) -> u8 {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let (px, py, pz) = (x1 & !z1, x1 & z1, z1 & !x1);
            let (qx, qy, qz) = (x2 & !z2, x2 & z2, z2 & !x2);
            // XY = iZ, YZ = iX, ZX = iY and the reverse orders give -i.
            plus += (px & qy).count_ones() + (py & qz).count_ones() + (pz & qx).count_ones();
            minus += (px & qz).count_ones() + (py & qx).count_ones() + (pz & qy).count_ones();
        }
        ((plus + 3 * minus) % 4) as u8
    }

    /// Restrict to the listed qubits, in the listed order.
    pub fn restrict(&self, keep: &[usize]) -> PauliString {
        let mut out = PauliString::identity(keep.len());
        for (i, &q) in keep.iter().enumerate() {
            out.set(i, self.x_bit(q), self.z_bit(q));
        }
        out
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> PauliString {
        let mut out = PauliString::identity(self.n + other.n);
        for q in 0..self.n {
            out.set(q, self.x_bit(q), self.z_bit(q));
        }
        for q in 0..other.n {
            out.set(self.n + q, other.x_bit(q), other.z_bit(q));
        }
        out
    }

    /// Exchange the X and Z halves.
    pub fn swap_halves(&self) -> PauliString {
        PauliString {
            n: self.n,
            x: self.z.clone(),
            z: self.x.clone(),
        }
    }

    /// Symplectic bit row of length `2n`, X half first.
    pub fn to_bit_row(&self) -> Vec<u8> {
        (0..2 * self.n).map(|c| self.col(c) as u8).collect()
    }

    pub fn from_bit_row(row: &[u8]) -> Result<Self> {
        if !row.len().is_multiple_of(2) {
            return Err(Error::InvalidState(format!(
                "symplectic row has odd length {}",
                row.len()
            )));
        }
        let n = row.len() / 2;
        let mut s = Self::identity(n);
        for q in 0..n {
            s.set(q, row[q] != 0, row[n + q] != 0);
        }
        Ok(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = PauliString::identity(letters.len());
        for (q, c) in letters.iter().enumerate() {
            let (x, z) = match c {
                'I' | '_' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("bad Pauli letter {other:?}"),
                    })
                }
            };
            p.set(q, x, z);
        }
        Ok(p)
    }
}

/// 0 if `a` and `b` commute, 1 if they anticommute.
pub fn symplectic_product(a: &PauliString, b: &PauliString) -> Result<u8> {
    if a.n != b.n {
        return Err(Error::LengthMismatch(a.n, b.n));
    }
    Ok(!a.commutes_with(b) as u8)
}

/// Componentwise XOR of supports.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    if a.n != b.n {
        return Err(Error::LengthMismatch(a.n, b.n));
    }
    let mut out = a.clone();
    out.mul_assign(b);
    Ok(out)
}

/// A list of Pauli rows on `n` qubits, optionally with one sign bit per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CheckMatrix {
    n: usize,
    rows: Vec<PauliString>,
    signs: Option<Vec<bool>>,
}

impl fmt::Debug for CheckMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CheckMatrix(n = {}) [", self.n)?;
        for i in 0..self.rows.len() {
            let s = if self.sign(i) { '-' } else { '+' };
            writeln!(f, "  {s}{}", self.rows[i])?;
        }
        write!(f, "]")
    }
}

impl CheckMatrix {
    pub fn empty(n: usize) -> Self {
        CheckMatrix {
            n,
            rows: Vec::new(),
            signs: None,
        }
    }

    pub fn new(n: usize, rows: Vec<PauliString>) -> Result<Self> {
        for r in &rows {
            if r.n != n {
                return Err(Error::LengthMismatch(n, r.n));
            }
        }
        Ok(CheckMatrix {
            n,
            rows,
            signs: None,
        })
    }

    /// Signed rows must pairwise commute, otherwise products can carry `±i`.
    pub fn with_signs(n: usize, rows: Vec<PauliString>, signs: Vec<bool>) -> Result<Self> {
        if rows.len() != signs.len() {
            return Err(Error::LengthMismatch(rows.len(), signs.len()));
        }
        let m = CheckMatrix {
            signs: Some(signs),
            ..Self::new(n, rows)?
        };
        m.check_commuting()?;
        Ok(m)
    }

    /// Parse rows such as `"+XXI"`, `"-ZZI"` or `"XYZ"`. Any explicit sign
    /// makes the matrix signed.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let mut parsed = Vec::new();
        let mut signs = Vec::new();
        let mut signed = false;
        for r in rows {
            let r = r.trim();
            let (neg, body) = match r.chars().next() {
                Some('-') => (true, &r[1..]),
                Some('+') => (false, &r[1..]),
                _ => (false, r),
            };
            signed |= body.len() != r.len();
            signs.push(neg);
            parsed.push(body.parse::<PauliString>()?);
        }
        let n = parsed.first().map_or(0, |p| p.n);
        if signed {
            Self::with_signs(n, parsed, signs)
        } else {
            Self::new(n, parsed)
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_signed(&self) -> bool {
        self.signs.is_some()
    }

    /// True when row `i` carries a minus sign.
    pub fn sign(&self, i: usize) -> bool {
        self.signs.as_ref().is_some_and(|s| s[i])
    }

    pub fn signs(&self) -> Option<&[bool]> {
        self.signs.as_deref()
    }

    /// Drop sign information.
    pub fn unsigned(&self) -> CheckMatrix {
        CheckMatrix {
            signs: None,
            ..self.clone()
        }
    }

    /// Attach all-plus signs.
    pub fn signed(&self) -> CheckMatrix {
        let signs = self
            .signs
            .clone()
            .unwrap_or_else(|| vec![false; self.rows.len()]);
        CheckMatrix {
            signs: Some(signs),
            ..self.clone()
        }
    }

    /// First anticommuting pair, if any.
    pub fn check_commuting(&self) -> Result<()> {
        for i in 0..self.rows.len() {
            for j in i + 1..self.rows.len() {
                if !self.rows[i].commutes_with(&self.rows[j]) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Full row-reduced echelon form over the `2n` symplectic columns, X half
    /// first. Zero rows are dropped, so the result has exactly `rank` rows.
    pub fn rref(&self) -> (CheckMatrix, usize) {
        self.reduce().0
    }

    /// Like [`rref`](Self::rref), but `None` if the signed rows generate
    /// `-I`, i.e. they stabilize no state.
    pub fn rref_consistent(&self) -> Option<(CheckMatrix, usize)> {
        let (out, negative_identity) = self.reduce();
        (!negative_identity).then_some(out)
    }

    fn reduce(&self) -> ((CheckMatrix, usize), bool) {
        let mut work = Work::from(self);
        let mut pivot_row = 0;
        for c in 0..2 * self.n {
            if pivot_row == work.rows.len() {
                break;
            }
            let Some(p) = (pivot_row..work.rows.len()).find(|&r| work.rows[r].col(c)) else {
                continue;
            };
            work.swap(pivot_row, p);
            for r in 0..work.rows.len() {
                if r != pivot_row && work.rows[r].col(c) {
                    work.add_into(r, pivot_row);
                }
            }
            pivot_row += 1;
        }
        let negative_identity = self.is_signed() && work.signs[pivot_row..].iter().any(|&s| s);
        work.rows.truncate(pivot_row);
        work.signs.truncate(pivot_row);
        ((work.into_matrix(self.n, self.is_signed()), pivot_row), negative_identity)
    }

    /// Row-space membership, ignoring signs.
    pub fn contains(&self, p: &PauliString) -> bool {
        let (r, rank) = self.rref();
        let mut rows = r.rows;
        rows.push(p.clone());
        CheckMatrix::new(self.n, rows).unwrap().rank() == rank
    }

    /// Same row space, ignoring signs.
    pub fn same_span(&self, other: &CheckMatrix) -> bool {
        self.n == other.n && self.rref().0.unsigned() == other.rref().0.unsigned()
    }

    pub fn push(&mut self, p: PauliString, minus: bool) -> Result<()> {
        if p.n != self.n {
            return Err(Error::LengthMismatch(self.n, p.n));
        }
        self.rows.push(p);
        if let Some(s) = &mut self.signs {
            s.push(minus);
        } else if minus {
            let mut s = vec![false; self.rows.len() - 1];
            s.push(true);
            self.signs = Some(s);
        }
        Ok(())
    }

    /// Restrict every row to `keep` (new qubit order follows `keep`).
    pub fn restrict(&self, keep: &[usize]) -> CheckMatrix {
        CheckMatrix {
            n: keep.len(),
            rows: self.rows.iter().map(|r| r.restrict(keep)).collect(),
            signs: self.signs.clone(),
        }
    }

    /// Block-diagonal direct sum: `self` on the first qubits, `other` after.
    pub fn direct_sum(&self, other: &CheckMatrix) -> CheckMatrix {
        let left = PauliString::identity(self.n);
        let right = PauliString::identity(other.n);
        let mut rows = Vec::with_capacity(self.len() + other.len());
        for r in &self.rows {
            rows.push(r.tensor(&right));
        }
        for r in &other.rows {
            rows.push(left.tensor(r));
        }
        let signs = if self.is_signed() || other.is_signed() {
            let mut s: Vec<bool> = (0..self.len()).map(|i| self.sign(i)).collect();
            s.extend((0..other.len()).map(|i| other.sign(i)));
            Some(s)
        } else {
            None
        };
        CheckMatrix {
            n: self.n + other.n,
            rows,
            signs,
        }
    }

    /// Generators of the subgroup acting as identity on every qubit in
    /// `constraint`, restricted to the remaining qubits (increasing order).
    /// The result is in rref.
    pub fn kernel_intersection(&self, constraint: &[usize]) -> CheckMatrix {
        let mut cols = Vec::with_capacity(2 * constraint.len());
        for &q in constraint {
            cols.push(q);
            cols.push(self.n + q);
        }
        let mut work = Work::from(self);
        work.eliminate_columns(&cols);
        let keep: Vec<usize> = (0..self.n).filter(|q| !constraint.contains(q)).collect();
        let rows = work.rows.iter().map(|r| r.restrict(&keep)).collect();
        let m = CheckMatrix {
            n: keep.len(),
            rows,
            signs: self.signs.as_ref().map(|_| work.signs.clone()),
        };
        m.rref().0
    }

    /// Whether the row space is spanned by pure-X and pure-Z elements.
    pub fn is_css(&self) -> bool {
        let rank = self.rank();
        let x_cols: Vec<usize> = (0..self.n).collect();
        let z_cols: Vec<usize> = (self.n..2 * self.n).collect();
        let mut zs = Work::from(self);
        zs.eliminate_columns(&x_cols);
        let mut xs = Work::from(self);
        xs.eliminate_columns(&z_cols);
        let dim = |w: Work| CheckMatrix::new(self.n, w.rows).unwrap().rank();
        dim(xs) + dim(zs) == rank
    }

    /// Basis of all Paulis commuting with every row.
    pub fn symplectic_complement(&self) -> Vec<PauliString> {
        // Solve swap(r) . v = 0 under the ordinary dot product.
        let swapped: Vec<PauliString> = self.rows.iter().map(|r| r.swap_halves()).collect();
        let (red, _) = CheckMatrix::new(self.n, swapped).unwrap().rref();
        let mut pivots = Vec::new();
        for r in red.rows() {
            pivots.push((0..2 * self.n).find(|&c| r.col(c)).unwrap());
        }
        let mut basis = Vec::new();
        for f in 0..2 * self.n {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = PauliString::identity(self.n);
            v.flip_col(f);
            for (i, r) in red.rows().iter().enumerate() {
                if r.col(f) {
                    v.flip_col(pivots[i]);
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Mutable row set used by elimination routines; signs always materialized.
struct Work {
    rows: Vec<PauliString>,
    signs: Vec<bool>,
}

impl From<&CheckMatrix> for Work {
    fn from(m: &CheckMatrix) -> Self {
        Work {
            rows: m.rows.clone(),
            signs: (0..m.rows.len()).map(|i| m.sign(i)).collect(),
        }
    }
}

impl Work {
    fn swap(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
        self.signs.swap(a, b);
    }

    /// rows[dst] <- rows[dst] * rows[src], tracking the sign.
    fn add_into(&mut self, dst: usize, src: usize) {
        let e = self.rows[dst].product_phase(&self.rows[src]);
        let src_row = std::mem::replace(&mut self.rows[src], PauliString::identity(0));
        self.rows[dst].mul_assign(&src_row);
        self.rows[src] = src_row;
        self.signs[dst] ^= self.signs[src] ^ (e == 2);
    }

    /// Keep only the combinations that vanish on every column in `cols`.
    fn eliminate_columns(&mut self, cols: &[usize]) {
        for &c in cols {
            let Some(p) = (0..self.rows.len()).find(|&r| self.rows[r].col(c)) else {
                continue;
            };
            for r in 0..self.rows.len() {
                if r != p && self.rows[r].col(c) {
                    self.add_into(r, p);
                }
            }
            self.rows.remove(p);
            self.signs.remove(p);
        }
    }

    fn into_matrix(self, n: usize, signed: bool) -> CheckMatrix {
        CheckMatrix {
            n,
            rows: self.rows,
            signs: signed.then_some(self.signs),
        }
    }
}
