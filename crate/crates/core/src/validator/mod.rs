//! Translation validation of individual pass runs.
//!
//! A validator undoes a concrete output with certified moves and compares
//! the result to the concrete input. It never reports VALID for a pair it
//! could not walk back.

mod cnot;
mod swap;

use std::fmt;

pub use cnot::validate_cnot_cancellation;
pub use swap::validate_swap_insertion;

use crate::contracts::gate_label;
use crate::ir::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Valid,
    Invalid,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Valid => "VALID",
            Status::Invalid => "INVALID",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One move of the walk back from output to input.
#[derive(Debug, Clone, PartialEq)]
pub enum Move {
    /// SWAP inserted behind position `position`, suffix relabelled.
    SwapAndUpdate { position: usize, p1: usize, p2: usize },
    CancelSwap { position: usize },
    /// A SWAP already present in the input, folded into its wire labels.
    AbsorbInputSwap { position: usize },
    /// Physical qubits renamed to virtual ones through the initial layout.
    Unplace,
    /// A cancelled self-inverse pair put back.
    Reinsert { gate: Gate, first: usize, second: usize },
    /// A merged `u1` split back into its parts.
    Split { qubit: usize, parts: usize },
    /// A rule application found by the prover.
    Rule { rule: String, position: usize },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::SwapAndUpdate { position, p1, p2 } => write!(f, "swap_and_update_gate @{position} ({p1},{p2})"),
            Move::CancelSwap { position } => write!(f, "cancel_swap @{position}"),
            Move::AbsorbInputSwap { position } => write!(f, "absorb input swap @{position}"),
            Move::Unplace => f.write_str("unplace"),
            Move::Reinsert { gate, first, second } => write!(f, "reinsert {} @{first},{second}", gate_label(gate)),
            Move::Split { qubit, parts } => write!(f, "split u1 on Q{qubit} into {parts}"),
            Move::Rule { rule, position } => write!(f, "rule {rule} @{position}"),
        }
    }
}

/// Where the walked-back circuit and the input part ways.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub reason: String,
    pub expected: Vec<Gate>,
    pub found: Vec<Gate>,
    /// First index at which the gate lists differ.
    pub first_difference: Option<usize>,
}

impl Residual {
    pub fn new(reason: impl Into<String>, expected: &[Gate], found: &[Gate]) -> Residual {
        let first_difference = (0..expected.len().max(found.len())).find(|&i| expected.get(i) != found.get(i));
        Residual {
            reason: reason.into(),
            expected: expected.to_vec(),
            found: found.to_vec(),
            first_difference,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("reason: {}", self.reason)];
        if let Some(i) = self.first_difference {
            let show = |g: Option<&Gate>| g.map_or("<end>".to_string(), gate_label);
            out.push(format!("first difference at {i}: expected {} found {}", show(self.expected.get(i)), show(self.found.get(i))));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationVerdict {
    pub status: Status,
    pub trace: Vec<Move>,
    pub residual: Option<Residual>,
}

impl ValidationVerdict {
    fn valid(trace: Vec<Move>) -> ValidationVerdict {
        ValidationVerdict {
            status: Status::Valid,
            trace,
            residual: None,
        }
    }

    fn with(status: Status, trace: Vec<Move>, residual: Residual) -> ValidationVerdict {
        ValidationVerdict {
            status,
            trace,
            residual: Some(residual),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    /// Status line, trace, then residual.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.status);
        for m in &self.trace {
            out.push_str(&format!("  {m}\n"));
        }
        if let Some(r) = &self.residual {
            for l in r.lines() {
                out.push_str(&format!("{l}\n"));
            }
        }
        out
    }
}
