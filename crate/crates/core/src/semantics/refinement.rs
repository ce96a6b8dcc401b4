//! Refinement checking between a concrete representation and a spec model.
//!
//! A representation pairs a concrete type `C` with a spec type `S` under a
//! relation. Every transformation, applied to related inputs, must yield
//! related outputs.

use std::fmt::Debug;

use num_complex::Complex64 as C64;

use super::bloch::BlochState;
use super::equality::{slices_phase_equal, TOL};
use super::gates::{gate_matrix, u3_matrix};
use super::matrix::{StateVector, Unitary};
use super::quaternion::{quat_from_u3, quat_mul, UnitQuaternion};
use crate::error::{Error, Result};
use crate::ir::GateKind;

/// A transformation the representation declines by contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected(pub String);

pub trait Representation {
    type Concrete: Clone + Debug;
    type Spec: Clone + Debug;
    type Transform: Clone + Debug;

    fn name(&self) -> &str;
    fn related(&self, c: &Self::Concrete, s: &Self::Spec) -> bool;
    fn apply_concrete(&self, t: &Self::Transform, c: &Self::Concrete) -> std::result::Result<Self::Concrete, Rejected>;
    fn apply_spec(&self, t: &Self::Transform, s: &Self::Spec) -> std::result::Result<Self::Spec, Rejected>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementCounterexample {
    pub sample: usize,
    pub step: usize,
    pub transform: String,
    pub concrete: String,
    pub spec: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefinementVerdict {
    Pass,
    Fail(RefinementCounterexample),
    RejectedByContract(Vec<String>),
}

impl RefinementVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            RefinementVerdict::Pass => "PASS",
            RefinementVerdict::Fail(_) => "FAIL",
            RefinementVerdict::RejectedByContract(_) => "REJECTED-BY-CONTRACT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub representation: String,
    pub verdict: RefinementVerdict,
    /// Commuting squares checked.
    pub checked: usize,
}

/// Apply `transforms` in sequence to every sample, checking the relation after each step.
pub fn refinement_check<R: Representation>(
    rep: &R,
    transforms: &[R::Transform],
    samples: &[(R::Concrete, R::Spec)],
) -> Result<RefinementReport> {
    let mut checked = 0;
    let mut rejected: Vec<String> = Vec::new();
    for (i, (c0, s0)) in samples.iter().enumerate() {
        if !rep.related(c0, s0) {
            return Err(Error::Precondition(format!("{}: sample {i} is not related", rep.name())));
        }
        let (mut c, mut s) = (c0.clone(), s0.clone());
        for (step, t) in transforms.iter().enumerate() {
            let next = rep.apply_concrete(t, &c).and_then(|c2| rep.apply_spec(t, &s).map(|s2| (c2, s2)));
            let (c2, s2) = match next {
                Ok(pair) => pair,
                Err(Rejected(why)) => {
                    let line = format!("{t:?}: {why}");
                    if !rejected.contains(&line) {
                        rejected.push(line);
                    }
                    break;
                }
            };
            checked += 1;
            if !rep.related(&c2, &s2) {
                return Ok(RefinementReport {
                    representation: rep.name().to_string(),
                    verdict: RefinementVerdict::Fail(RefinementCounterexample {
                        sample: i,
                        step,
                        transform: format!("{t:?}"),
                        concrete: format!("{c2:?}"),
                        spec: format!("{s2:?}"),
                    }),
                    checked,
                });
            }
            c = c2;
            s = s2;
        }
    }
    let verdict = if rejected.is_empty() {
        RefinementVerdict::Pass
    } else {
        RefinementVerdict::RejectedByContract(rejected)
    };
    Ok(RefinementReport {
        representation: rep.name().to_string(),
        verdict,
        checked,
    })
}

/// Concrete Bloch register: a product of single-qubit points, or a lifted
/// state vector once an entangling operation has been applied.
#[derive(Debug, Clone, PartialEq)]
pub enum BlochRegister {
    Product(Vec<BlochState>),
    Lifted(StateVector),
}

impl BlochRegister {
    /// Canonical (phase-free) vector of the register, qubit 0 least significant.
    pub fn to_state_vector(&self) -> StateVector {
        match self {
            BlochRegister::Lifted(v) => v.clone(),
            BlochRegister::Product(qs) => {
                let mut it = qs.iter();
                let first = it.next().map(|b| b.amplitudes().to_vec()).unwrap_or(vec![C64::new(1.0, 0.0)]);
                let mut acc = StateVector::from_amplitudes(first).expect("two amplitudes");
                for b in it {
                    let next = StateVector::from_amplitudes(b.amplitudes().to_vec()).expect("two amplitudes");
                    acc = acc.tensor_high(&next);
                }
                acc
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            BlochRegister::Product(qs) => qs.len(),
            BlochRegister::Lifted(v) => v.num_qubits(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlochOp {
    Rotate { qubit: usize, theta: f64, phi: f64, lambda: f64 },
    /// Add a fresh most-significant qubit; `gamma` is the spec-side global phase.
    Tensor { state: BlochState, gamma: f64 },
    Cx { control: usize, target: usize },
}

/// Bloch-sphere states against amplitude vectors, related up to global phase.
#[derive(Debug, Clone, Copy)]
pub struct BlochRepresentation {
    /// Reject multi-qubit operations instead of simulating them.
    pub single_qubit_contract: bool,
}

impl Representation for BlochRepresentation {
    type Concrete = BlochRegister;
    type Spec = StateVector;
    type Transform = BlochOp;

    fn name(&self) -> &str {
        if self.single_qubit_contract {
            "bloch"
        } else {
            "bloch+multiqubit"
        }
    }

    fn related(&self, c: &BlochRegister, s: &StateVector) -> bool {
        let v = c.to_state_vector();
        v.num_qubits() == s.num_qubits() && slices_phase_equal(v.amplitudes(), s.amplitudes(), TOL)
    }

    fn apply_concrete(&self, t: &BlochOp, c: &BlochRegister) -> std::result::Result<BlochRegister, Rejected> {
        match (*t, c) {
            (BlochOp::Rotate { qubit, .. }, _) if qubit >= c.num_qubits() => {
                Err(Rejected(format!("qubit {qubit} not in register")))
            }
            (BlochOp::Rotate { qubit, theta, phi, lambda }, BlochRegister::Product(qs)) => {
                let mut qs = qs.clone();
                qs[qubit] = qs[qubit].rotated(&quat_from_u3(theta, phi, lambda));
                Ok(BlochRegister::Product(qs))
            }
            (BlochOp::Rotate { qubit, theta, phi, lambda }, BlochRegister::Lifted(v)) => {
                let mut v = v.clone();
                v.apply(&quat_from_u3(theta, phi, lambda).to_su2(), &[qubit], |_| true);
                Ok(BlochRegister::Lifted(v))
            }
            (BlochOp::Tensor { state, .. }, BlochRegister::Product(qs)) => {
                let mut qs = qs.clone();
                qs.push(state);
                Ok(BlochRegister::Product(qs))
            }
            (BlochOp::Tensor { state, .. }, BlochRegister::Lifted(v)) => {
                let hi = StateVector::from_amplitudes(state.amplitudes().to_vec()).expect("two amplitudes");
                Ok(BlochRegister::Lifted(v.tensor_high(&hi)))
            }
            (BlochOp::Cx { control, target }, _) => {
                if self.single_qubit_contract {
                    return Err(Rejected("multi-qubit operation outside the single-qubit contract".into()));
                }
                if control >= c.num_qubits() || target >= c.num_qubits() || control == target {
                    return Err(Rejected("bad cx operands".into()));
                }
                // The only CX available on rotations: control the SU(2) lift of X.
                let mut v = c.to_state_vector();
                let x = UnitQuaternion::from_gate(&GateKind::X).expect("x is single-qubit");
                v.apply(&x.to_su2(), &[target], |b| (b >> control) & 1 == 1);
                Ok(BlochRegister::Lifted(v))
            }
        }
    }

    fn apply_spec(&self, t: &BlochOp, s: &StateVector) -> std::result::Result<StateVector, Rejected> {
        let mut s = s.clone();
        match *t {
            BlochOp::Rotate { qubit, theta, phi, lambda } => {
                s.apply(&u3_matrix(theta, phi, lambda), &[qubit], |_| true);
                Ok(s)
            }
            BlochOp::Tensor { state, gamma } => {
                let ph = C64::from_polar(1.0, gamma);
                let hi = StateVector::from_amplitudes(state.amplitudes().iter().map(|a| a * ph).collect())
                    .expect("two amplitudes");
                Ok(s.tensor_high(&hi))
            }
            BlochOp::Cx { control, target } => {
                let m = gate_matrix(&GateKind::CX).expect("cx is unitary");
                s.apply(&m, &[control, target], |_| true);
                Ok(s)
            }
        }
    }
}

/// Concrete gate as a quaternion, optionally under a quantum control on qubit 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatGate {
    pub q: UnitQuaternion,
    pub controlled: bool,
}

impl QuatGate {
    pub fn matrix(&self) -> Unitary {
        let m = self.q.to_su2();
        if self.controlled {
            controlled(&m)
        } else {
            Unitary::from_row_major(1, m.to_vec()).expect("2x2")
        }
    }
}

fn controlled(m: &[C64]) -> Unitary {
    let mut u = Unitary::identity(2);
    u.mul_gate_left(m, &[0], |b| (b >> 1) & 1 == 1);
    u
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuatOp {
    /// Apply `u3(theta, phi, lambda)` after the current gate.
    Compose { theta: f64, phi: f64, lambda: f64 },
    /// Put the gate under a control on a new qubit.
    AddControl,
}

/// Quaternions against 2x2 unitaries, related up to global phase.
#[derive(Debug, Clone, Copy)]
pub struct QuaternionRepresentation {
    pub single_qubit_contract: bool,
}

impl Representation for QuaternionRepresentation {
    type Concrete = QuatGate;
    type Spec = Unitary;
    type Transform = QuatOp;

    fn name(&self) -> &str {
        if self.single_qubit_contract {
            "quaternion"
        } else {
            "quaternion+control"
        }
    }

    fn related(&self, c: &QuatGate, s: &Unitary) -> bool {
        let m = c.matrix();
        m.num_qubits() == s.num_qubits() && slices_phase_equal(m.data(), s.data(), TOL)
    }

    fn apply_concrete(&self, t: &QuatOp, c: &QuatGate) -> std::result::Result<QuatGate, Rejected> {
        match *t {
            QuatOp::Compose { .. } if c.controlled => Err(Rejected("compose after control".into())),
            QuatOp::Compose { theta, phi, lambda } => Ok(QuatGate {
                q: quat_mul(&c.q, &quat_from_u3(theta, phi, lambda)),
                controlled: false,
            }),
            QuatOp::AddControl if self.single_qubit_contract => {
                Err(Rejected("multi-qubit operation outside the single-qubit contract".into()))
            }
            QuatOp::AddControl if c.controlled => Err(Rejected("already controlled".into())),
            QuatOp::AddControl => Ok(QuatGate {
                q: c.q,
                controlled: true,
            }),
        }
    }

    fn apply_spec(&self, t: &QuatOp, s: &Unitary) -> std::result::Result<Unitary, Rejected> {
        match *t {
            QuatOp::Compose { theta, phi, lambda } => {
                let mut u = s.clone();
                u.mul_gate_left(&u3_matrix(theta, phi, lambda), &[0], |_| true);
                Ok(u)
            }
            QuatOp::AddControl => {
                if s.num_qubits() != 1 {
                    return Err(Rejected("already controlled".into()));
                }
                Ok(controlled(s.data()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bloch_sample(theta: f64, phi: f64, gamma: f64) -> (BlochRegister, StateVector) {
        let b = BlochState::new(theta, phi);
        let ph = C64::from_polar(1.0, gamma);
        let s = StateVector::from_amplitudes(b.amplitudes().iter().map(|a| a * ph).collect()).unwrap();
        (BlochRegister::Product(vec![b]), s)
    }

    #[test]
    fn rotations_refine() {
        let rep = BlochRepresentation {
            single_qubit_contract: true,
        };
        let ts = [
            BlochOp::Rotate { qubit: 0, theta: 0.4, phi: 1.0, lambda: -0.3 },
            BlochOp::Rotate { qubit: 0, theta: PI, phi: 0.0, lambda: PI },
        ];
        let samples = [bloch_sample(0.3, 0.2, 1.0), bloch_sample(2.0, -1.0, 0.0)];
        let r = refinement_check(&rep, &ts, &samples).unwrap();
        assert_eq!(r.verdict, RefinementVerdict::Pass);
        assert_eq!(r.checked, 4);
    }

    #[test]
    fn cx_breaks_bloch_refinement() {
        let rep = BlochRepresentation {
            single_qubit_contract: false,
        };
        let ts = [
            BlochOp::Tensor {
                state: BlochState::new(0.7, 0.1),
                gamma: 0.5,
            },
            BlochOp::Cx { control: 0, target: 1 },
        ];
        let r = refinement_check(&rep, &ts, &[bloch_sample(PI / 2.0, 0.0, 0.0)]).unwrap();
        match r.verdict {
            RefinementVerdict::Fail(cex) => assert_eq!(cex.step, 1),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn contract_rejects_cx() {
        let rep = BlochRepresentation {
            single_qubit_contract: true,
        };
        let ts = [BlochOp::Cx { control: 0, target: 1 }];
        let samples = [(
            BlochRegister::Product(vec![BlochState::new(1.0, 0.0), BlochState::new(0.0, 0.0)]),
            BlochRegister::Product(vec![BlochState::new(1.0, 0.0), BlochState::new(0.0, 0.0)]).to_state_vector(),
        )];
        let r = refinement_check(&rep, &ts, &samples).unwrap();
        assert!(matches!(r.verdict, RefinementVerdict::RejectedByContract(_)));
    }

    #[test]
    fn quaternion_loses_phase_under_control() {
        let g = QuatGate {
            q: quat_from_u3(0.0, 0.0, 0.0),
            controlled: false,
        };
        let spec = Unitary::identity(1);
        let ts = [
            QuatOp::Compose { theta: 0.0, phi: 0.0, lambda: PI },
            QuatOp::AddControl,
        ];
        let ok = refinement_check(&QuaternionRepresentation { single_qubit_contract: true }, &ts[..1], &[(g, spec.clone())]).unwrap();
        assert_eq!(ok.verdict, RefinementVerdict::Pass);
        let bad = refinement_check(&QuaternionRepresentation { single_qubit_contract: false }, &ts, &[(g, spec)]).unwrap();
        assert!(matches!(bad.verdict, RefinementVerdict::Fail(_)));
    }
}
