use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter-free gate name. Used by patterns and for dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateName {
    U1,
    U2,
    U3,
    X,
    Y,
    Z,
    H,
    T,
    CX,
    CY,
    CZ,
    Swap,
    MeasX,
    MeasZ,
}

impl GateName {
    pub const ALL: [GateName; 14] = [
        GateName::U1,
        GateName::U2,
        GateName::U3,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::T,
        GateName::CX,
        GateName::CY,
        GateName::CZ,
        GateName::Swap,
        GateName::MeasX,
        GateName::MeasZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateName::CX | GateName::CY | GateName::CZ | GateName::Swap => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateName::U1 => 1,
            GateName::U2 => 2,
            GateName::U3 => 3,
            _ => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::U1 => "u1",
            GateName::U2 => "u2",
            GateName::U3 => "u3",
            GateName::X => "x",
            GateName::Y => "y",
            GateName::Z => "z",
            GateName::H => "h",
            GateName::T => "t",
            GateName::CX => "cx",
            GateName::CY => "cy",
            GateName::CZ => "cz",
            GateName::Swap => "swap",
            GateName::MeasX => "measx",
            GateName::MeasZ => "measz",
        }
    }

    pub fn from_str_name(s: &str) -> Option<GateName> {
        GateName::ALL.iter().copied().find(|g| g.as_str() == s)
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, GateName::MeasX | GateName::MeasZ)
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Gate kind together with its angle parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    U1(f64),
    U2(f64, f64),
    U3(f64, f64, f64),
    X,
    Y,
    Z,
    H,
    T,
    CX,
    CY,
    CZ,
    Swap,
    MeasX,
    MeasZ,
}

impl GateKind {
    pub fn name(&self) -> GateName {
        match self {
            GateKind::U1(_) => GateName::U1,
            GateKind::U2(..) => GateName::U2,
            GateKind::U3(..) => GateName::U3,
            GateKind::X => GateName::X,
            GateKind::Y => GateName::Y,
            GateKind::Z => GateName::Z,
            GateKind::H => GateName::H,
            GateKind::T => GateName::T,
            GateKind::CX => GateName::CX,
            GateKind::CY => GateName::CY,
            GateKind::CZ => GateName::CZ,
            GateKind::Swap => GateName::Swap,
            GateKind::MeasX => GateName::MeasX,
            GateKind::MeasZ => GateName::MeasZ,
        }
    }

    pub fn arity(&self) -> usize {
        self.name().arity()
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::U1(l) => vec![l],
            GateKind::U2(p, l) => vec![p, l],
            GateKind::U3(t, p, l) => vec![t, p, l],
            _ => Vec::new(),
        }
    }

    pub fn from_parts(name: GateName, params: &[f64]) -> Result<GateKind> {
        if params.len() != name.num_params() {
            return Err(Error::ParamMismatch {
                gate: name.as_str(),
                expected: name.num_params(),
                found: params.len(),
            });
        }
        Ok(match name {
            GateName::U1 => GateKind::U1(params[0]),
            GateName::U2 => GateKind::U2(params[0], params[1]),
            GateName::U3 => GateKind::U3(params[0], params[1], params[2]),
            GateName::X => GateKind::X,
            GateName::Y => GateKind::Y,
            GateName::Z => GateKind::Z,
            GateName::H => GateKind::H,
            GateName::T => GateKind::T,
            GateName::CX => GateKind::CX,
            GateName::CY => GateKind::CY,
            GateName::CZ => GateKind::CZ,
            GateName::Swap => GateKind::Swap,
            GateName::MeasX => GateKind::MeasX,
            GateName::MeasZ => GateKind::MeasZ,
        })
    }

    pub fn is_unitary(&self) -> bool {
        !self.name().is_measurement()
    }

    /// Gates equal to their own inverse (exactly, not up to phase).
    pub fn is_self_inverse(&self) -> bool {
        matches!(
            self,
            GateKind::X
                | GateKind::Y
                | GateKind::Z
                | GateKind::H
                | GateKind::CX
                | GateKind::CY
                | GateKind::CZ
                | GateKind::Swap
        )
    }

    pub fn is_single_qubit_unitary(&self) -> bool {
        self.arity() == 1 && self.is_unitary()
    }

    fn canonical_bits(&self) -> [u64; 3] {
        let mut out = [0u64; 3];
        for (slot, p) in out.iter_mut().zip(self.params()) {
            // -0.0 and 0.0 compare equal, so they must hash equal.
            *slot = if p == 0.0 { 0 } else { p.to_bits() };
        }
        out
    }
}

// Angles are finite by construction, so float equality is reflexive here.
impl Eq for GateKind {}

impl Hash for GateKind {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name().hash(state);
        self.canonical_bits().hash(state);
    }
}

/// Classical guard: the gate fires iff the classical register holds `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassicalCondition {
    pub value: u64,
}

/// A gate applied to concrete qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    operands: Vec<usize>,
    pub c_if: Option<ClassicalCondition>,
    pub q_if: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<usize>) -> Result<Gate> {
        let name = kind.name();
        if operands.len() != name.arity() {
            return Err(Error::ArityMismatch {
                gate: name.as_str(),
                expected: name.arity(),
                found: operands.len(),
            });
        }
        if operands.len() == 2 && operands[0] == operands[1] {
            return Err(Error::DuplicateOperand(operands[0]));
        }
        if kind.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteAngle(name.as_str()));
        }
        Ok(Gate {
            kind,
            operands,
            c_if: None,
            q_if: None,
        })
    }

    fn known(kind: GateKind, operands: Vec<usize>) -> Gate {
        Gate::new(kind, operands).expect("well-formed constructor arguments")
    }

    pub fn u1(lambda: f64, q: usize) -> Gate {
        Gate::known(GateKind::U1(lambda), vec![q])
    }
    pub fn u2(phi: f64, lambda: f64, q: usize) -> Gate {
        Gate::known(GateKind::U2(phi, lambda), vec![q])
    }
    pub fn u3(theta: f64, phi: f64, lambda: f64, q: usize) -> Gate {
        Gate::known(GateKind::U3(theta, phi, lambda), vec![q])
    }
    pub fn x(q: usize) -> Gate {
        Gate::known(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Gate {
        Gate::known(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Gate {
        Gate::known(GateKind::Z, vec![q])
    }
    pub fn h(q: usize) -> Gate {
        Gate::known(GateKind::H, vec![q])
    }
    pub fn t(q: usize) -> Gate {
        Gate::known(GateKind::T, vec![q])
    }
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::known(GateKind::CX, vec![control, target])
    }
    pub fn cy(control: usize, target: usize) -> Gate {
        Gate::known(GateKind::CY, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::known(GateKind::CZ, vec![a, b])
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::known(GateKind::Swap, vec![a, b])
    }
    pub fn measz(q: usize) -> Gate {
        Gate::known(GateKind::MeasZ, vec![q])
    }
    pub fn measx(q: usize) -> Gate {
        Gate::known(GateKind::MeasX, vec![q])
    }

    pub fn with_c_if(mut self, value: u64) -> Gate {
        self.c_if = Some(ClassicalCondition { value });
        self
    }

    pub fn with_q_if(mut self, control: usize) -> Gate {
        self.q_if = Some(control);
        self
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn name(&self) -> GateName {
        self.kind.name()
    }

    pub fn is_conditioned(&self) -> bool {
        self.c_if.is_some() || self.q_if.is_some()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.operands.len() == 2
    }

    /// Every qubit the gate touches, including a quantum control.
    pub fn qubits(&self) -> Vec<usize> {
        let mut qs = self.operands.clone();
        if let Some(c) = self.q_if {
            qs.push(c);
        }
        qs
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.operands.contains(&q) || self.q_if == Some(q)
    }

    pub fn shares_qubit(&self, other: &Gate) -> bool {
        self.qubits().iter().any(|&q| other.acts_on(q))
    }

    /// Rename qubits through `f`. The caller guarantees `f` is injective.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            operands: self.operands.iter().map(|&q| f(q)).collect(),
            c_if: self.c_if,
            q_if: self.q_if.map(f),
        }
    }

    pub fn with_kind(&self, kind: GateKind) -> Result<Gate> {
        let mut g = Gate::new(kind, self.operands.clone())?;
        g.c_if = self.c_if;
        g.q_if = self.q_if;
        Ok(g)
    }

    /// Same gate with qubits `a` and `b` exchanged.
    pub fn swap_labels(&self, a: usize, b: usize) -> Gate {
        self.map_qubits(|q| {
            if q == a {
                b
            } else if q == b {
                a
            } else {
                q
            }
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::qasm::format_gate(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_is_enforced() {
        assert!(matches!(
            Gate::new(GateKind::CX, vec![0]),
            Err(Error::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::H, vec![0, 1]),
            Err(Error::ArityMismatch { .. })
        ));
        assert_eq!(Gate::new(GateKind::CX, vec![2, 2]), Err(Error::DuplicateOperand(2)));
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert!(Gate::new(GateKind::U1(f64::NAN), vec![0]).is_err());
        assert!(Gate::new(GateKind::U3(0.0, f64::INFINITY, 0.0), vec![0]).is_err());
    }

    #[test]
    fn parts_round_trip() {
        for kind in [GateKind::U3(0.1, 0.2, 0.3), GateKind::U2(1.0, 2.0), GateKind::CZ] {
            assert_eq!(GateKind::from_parts(kind.name(), &kind.params()).unwrap(), kind);
        }
        assert!(GateKind::from_parts(GateName::U1, &[]).is_err());
    }

    #[test]
    fn zero_signs_hash_alike() {
        use std::collections::hash_map::DefaultHasher;
        let h = |k: GateKind| {
            let mut s = DefaultHasher::new();
            k.hash(&mut s);
            s.finish()
        };
        assert_eq!(GateKind::U1(0.0), GateKind::U1(-0.0));
        assert_eq!(h(GateKind::U1(0.0)), h(GateKind::U1(-0.0)));
    }

    #[test]
    fn q_if_counts_as_touched_qubit() {
        let g = Gate::u1(0.5, 0).with_q_if(3);
        assert_eq!(g.qubits(), vec![0, 3]);
        assert!(g.shares_qubit(&Gate::x(3)));
        assert!(!g.shares_qubit(&Gate::x(1)));
    }
}
