//! Stabilizer codes: a stabilizer group plus logical representatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{CheckMatrix, PauliString};
use crate::script::Move;

/// Where a code came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Provenance {
    AppendixMatrix(String),
    Generator(String),
    File(String),
    MoveScript(Vec<Move>),
    Network,
}

/// An `[[n, k]]` stabilizer code with `2k` logical representatives ordered
/// `X̄_1, Z̄_1, X̄_2, Z̄_2, ...`.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pub name: String,
    pub provenance: Provenance,
    stabilizer: CheckMatrix,
    logicals: Vec<PauliString>,
    k: usize,
}

impl StabilizerCode {
    /// Validates commutation, independence and the logical pairing.
    pub fn new(
        name: impl Into<String>,
        stabilizer: CheckMatrix,
        logicals: Vec<PauliString>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = stabilizer.num_qubits();
        stabilizer.check_commuting()?;
        let rank = stabilizer.rank();
        if rank != stabilizer.len() {
            return Err(Error::RankDeficient {
                expected: stabilizer.len(),
                found: rank,
            });
        }
        if !logicals.len().is_multiple_of(2) {
            return Err(Error::InvalidState("odd number of logical operators".into()));
        }
        let k = logicals.len() / 2;
        if n < rank + k {
            return Err(Error::InvalidState(format!(
                "{} generators and {k} logical qubits exceed {n} qubits",
                stabilizer.len()
            )));
        }
        if n - rank != k {
            return Err(Error::InvalidState(format!(
                "expected {} logical pairs, got {k}",
                n - rank
            )));
        }
        for (i, l) in logicals.iter().enumerate() {
            if l.num_qubits() != n {
                return Err(Error::LengthMismatch(n, l.num_qubits()));
            }
            if let Some(s) = stabilizer.rows().iter().position(|s| !s.commutes_with(l)) {
                return Err(Error::InvalidState(format!(
                    "logical {i} anticommutes with stabilizer row {s}"
                )));
            }
            for (j, m) in logicals.iter().enumerate().skip(i + 1) {
                let partner = i / 2 == j / 2;
                if l.commutes_with(m) == partner {
                    return Err(Error::InvalidState(format!(
                        "logicals {i} and {j} have the wrong commutation"
                    )));
                }
            }
        }
        Ok(StabilizerCode {
            name: name.into(),
            provenance,
            stabilizer,
            logicals,
            k,
        })
    }

    /// Derive logical representatives by symplectic completion.
    pub fn from_stabilizer(
        name: impl Into<String>,
        stabilizer: CheckMatrix,
        provenance: Provenance,
    ) -> Result<Self> {
        stabilizer.check_commuting()?;
        let logicals = complete_logicals(&stabilizer)?;
        Self::new(name, stabilizer, logicals, provenance)
    }

    pub fn n(&self) -> usize {
        self.stabilizer.num_qubits()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stabilizer(&self) -> &CheckMatrix {
        &self.stabilizer
    }

    pub fn logicals(&self) -> &[PauliString] {
        &self.logicals
    }

    pub fn logical_x(&self, i: usize) -> &PauliString {
        &self.logicals[2 * i]
    }

    pub fn logical_z(&self, i: usize) -> &PauliString {
        &self.logicals[2 * i + 1]
    }

    /// Stabilizer rows followed by logical representatives: generators of the
    /// normalizer.
    pub fn normalizer_generators(&self) -> Vec<PauliString> {
        let mut g = self.stabilizer.rows().to_vec();
        g.extend(self.logicals.iter().cloned());
        g
    }

    pub fn is_css(&self) -> bool {
        self.stabilizer.is_css()
    }

    /// `[[n,k]]` label.
    pub fn label(&self) -> String {
        format!("[[{},{}]]", self.n(), self.k)
    }
}

/// Pick logical pairs from the normalizer modulo the stabilizer.
pub fn complete_logicals(stabilizer: &CheckMatrix) -> Result<Vec<PauliString>> {
    let n = stabilizer.num_qubits();
    let (stab, rank) = stabilizer.unsigned().rref();
    let mut span = stab.rows().to_vec();
    let mut extra = Vec::new();
    for v in stabilizer.symplectic_complement() {
        let mut trial = span.clone();
        trial.push(v.clone());
        if CheckMatrix::new(n, trial.clone())?.rank() > span.len() {
            span = trial;
            extra.push(v);
        }
    }
    if extra.len() != 2 * (n - rank) {
        return Err(Error::InvalidState(format!(
            "normalizer has {} directions outside the stabilizer, expected {}",
            extra.len(),
            2 * (n - rank)
        )));
    }
    // Symplectic Gram-Schmidt.
    let mut out = Vec::new();
    while let Some(a) = extra.pop() {
        let Some(bi) = extra.iter().position(|b| !a.commutes_with(b)) else {
            return Err(Error::InvalidState("degenerate logical space".into()));
        };
        let b = extra.remove(bi);
        for c in extra.iter_mut() {
            if !c.commutes_with(&b) {
                c.mul_assign(&a);
            }
            if !c.commutes_with(&a) {
                c.mul_assign(&b);
            }
        }
        out.push(a);
        out.push(b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_on_422() {
        let s = CheckMatrix::from_strs(&["XXXX", "ZZZZ"]).unwrap();
        let c = StabilizerCode::from_stabilizer("t422", s, Provenance::Network).unwrap();
        assert_eq!((c.n(), c.k()), (4, 2));
    }

    #[test]
    fn rejects_dependent_rows() {
        let s = CheckMatrix::from_strs(&["XXXX", "ZZZZ", "YYYY"]).unwrap();
        assert!(matches!(
            StabilizerCode::from_stabilizer("bad", s, Provenance::Network),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn rejects_anticommuting_rows() {
        let s = CheckMatrix::from_strs(&["XXI", "ZII"]).unwrap();
        assert_eq!(
            StabilizerCode::from_stabilizer("bad", s, Provenance::Network).unwrap_err(),
            Error::NonCommuting(0, 1)
        );
    }
}
