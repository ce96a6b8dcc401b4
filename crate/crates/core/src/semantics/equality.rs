use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::Unitary;

/// Default entrywise tolerance.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EqualityMode {
    Exact,
    UpToPhase,
}

impl EqualityMode {
    /// The weaker of two modes.
    pub fn weaker(self, other: EqualityMode) -> EqualityMode {
        if self == EqualityMode::UpToPhase || other == EqualityMode::UpToPhase {
            EqualityMode::UpToPhase
        } else {
            EqualityMode::Exact
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EqualityMode::Exact => "exact",
            EqualityMode::UpToPhase => "up-to-phase",
        }
    }
}

fn max_diff(a: &[C64], b: &[C64], c: C64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - c * y).norm()).fold(0.0, f64::max)
}

/// Entrywise equality within `tol`.
pub fn unitary_equal(u: &Unitary, v: &Unitary, tol: f64) -> bool {
    u.num_qubits() == v.num_qubits() && max_diff(u.data(), v.data(), C64::new(1.0, 0.0)) <= tol
}

/// A unit scalar `c` with `U ~ c V`, taken from the largest entry of `V`.
pub fn phase_factor(u: &[C64], v: &[C64]) -> Option<C64> {
    if u.len() != v.len() {
        return None;
    }
    let (k, vk) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
    if vk.norm() == 0.0 {
        return None;
    }
    let c = u[k] / vk;
    if c.norm() == 0.0 {
        return None;
    }
    Some(c / c.norm())
}

/// `||U - cV||_max <= tol` for some unit `c`.
pub fn phase_equal(u: &Unitary, v: &Unitary, tol: f64) -> bool {
    u.num_qubits() == v.num_qubits() && slices_phase_equal(u.data(), v.data(), tol)
}

pub fn slices_phase_equal(u: &[C64], v: &[C64], tol: f64) -> bool {
    match phase_factor(u, v) {
        Some(c) => max_diff(u, v, c) <= tol,
        None => u.len() == v.len() && max_diff(u, v, C64::new(1.0, 0.0)) <= tol,
    }
}

pub fn equal_in_mode(u: &Unitary, v: &Unitary, mode: EqualityMode, tol: f64) -> bool {
    match mode {
        EqualityMode::Exact => unitary_equal(u, v, tol),
        EqualityMode::UpToPhase => phase_equal(u, v, tol),
    }
}

/// Frobenius norm of `U - cV`, with `c = 1` in exact mode and the aligning phase otherwise.
pub fn residual(u: &[C64], v: &[C64], mode: EqualityMode) -> f64 {
    let c = match mode {
        EqualityMode::Exact => C64::new(1.0, 0.0),
        EqualityMode::UpToPhase => phase_factor(u, v).unwrap_or(C64::new(1.0, 0.0)),
    };
    u.iter().zip(v).map(|(x, y)| (x - c * y).norm_sqr()).sum::<f64>().sqrt()
}
