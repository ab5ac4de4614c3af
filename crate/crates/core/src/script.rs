//! Move scripts: JSON-lines records that replay a network construction.
//!
//! ```text
//! {"op":"add","lego":"T6"}
//! {"op":"contract","a":3,"b":9}
//! {"op":"logical","leg":1}
//! ```
//!
//! Leg numbers are global and 1-based.

use serde::{Deserialize, Serialize};

use crate::code::{Provenance, StabilizerCode};
use crate::error::{Error, Result};
use crate::lego::{Lego, TensorNetwork};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Move {
    Add { lego: String },
    Contract { a: usize, b: usize },
    Logical { leg: usize },
}

pub fn parse_script(text: &str) -> Result<Vec<Move>> {
    let mut moves = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let m: Move = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        moves.push(m);
    }
    Ok(moves)
}

pub fn write_script(moves: &[Move]) -> String {
    let mut out = String::new();
    for m in moves {
        out.push_str(&serde_json::to_string(m).expect("moves serialize"));
        out.push('\n');
    }
    out
}

/// Replay a script into a network and the list of logical legs.
pub fn replay(moves: &[Move]) -> Result<(TensorNetwork, Vec<usize>)> {
    if moves.is_empty() {
        return Err(Error::InvalidState("empty move script".into()));
    }
    let mut net = TensorNetwork::new();
    let mut logical = Vec::new();
    for m in moves {
        match m {
            Move::Add { lego } => net = net.add_lego(Lego::by_id(lego)?),
            Move::Contract { a, b } => net = net.contract(*a, *b)?,
            Move::Logical { leg } => logical.push(*leg),
        }
    }
    Ok((net, logical))
}

/// Replay a script and read off the encoded code.
pub fn build_code(name: &str, moves: &[Move]) -> Result<StabilizerCode> {
    let (net, logical) = replay(moves)?;
    let mut code = net.to_code(&logical)?;
    code.name = name.to_string();
    code.provenance = Provenance::MoveScript(moves.to_vec());
    Ok(code)
}
