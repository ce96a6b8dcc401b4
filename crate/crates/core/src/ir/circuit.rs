use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use super::gate::Gate;
use crate::error::{Error, Result};

/// Ordered list of gates over `qreg` qubits and `cbits` classical bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumCircuit {
    qreg: usize,
    cbits: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(qreg: usize) -> Result<QuantumCircuit> {
        QuantumCircuit::with_cbits(qreg, 0)
    }

    pub fn with_cbits(qreg: usize, cbits: usize) -> Result<QuantumCircuit> {
        if qreg == 0 {
            return Err(Error::EmptyRegister);
        }
        if cbits > 16 {
            return Err(Error::MalformedCircuit(format!("{cbits} classical bits is more than 16")));
        }
        Ok(QuantumCircuit {
            qreg,
            cbits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(qreg: usize, gates: Vec<Gate>) -> Result<QuantumCircuit> {
        let cbits = if gates.iter().any(|g| g.c_if.is_some()) {
            let max = gates.iter().filter_map(|g| g.c_if).map(|c| c.value).max().unwrap_or(0);
            (64 - max.leading_zeros()).max(1) as usize
        } else {
            0
        };
        QuantumCircuit::from_parts(qreg, cbits, gates)
    }

    pub fn from_parts(qreg: usize, cbits: usize, gates: Vec<Gate>) -> Result<QuantumCircuit> {
        let mut c = QuantumCircuit::with_cbits(qreg, cbits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn check_gate(&self, gate: &Gate) -> Result<()> {
        check_gate(self.qreg, self.cbits, gate)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn qreg(&self) -> usize {
        self.qreg
    }

    pub fn cbits(&self) -> usize {
        self.cbits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count_swaps(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == super::GateKind::Swap).count()
    }

    pub fn count_two_qubit(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn is_unitary(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_unitary() && !g.is_conditioned())
    }

    /// Qubits touched by at least one gate, ascending.
    pub fn used_qubits(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.gates.iter().flat_map(|g| g.qubits()).collect();
        set.into_iter().collect()
    }

    /// Same gates with every qubit renamed through `f`, on a register of `qreg` qubits.
    pub fn relabeled(&self, qreg: usize, f: impl Fn(usize) -> usize) -> Result<QuantumCircuit> {
        let gates = self.gates.iter().map(|g| g.map_qubits(&f)).collect();
        QuantumCircuit::from_parts(qreg, self.cbits, gates)
    }

    /// Sequential composition: `self` then `other`.
    pub fn then(&self, other: &QuantumCircuit) -> Result<QuantumCircuit> {
        if self.qreg != other.qreg {
            return Err(Error::DimensionMismatch(self.qreg, other.qreg));
        }
        let mut out = self.clone();
        out.cbits = out.cbits.max(other.cbits);
        for g in &other.gates {
            out.push(g.clone())?;
        }
        Ok(out)
    }

    /// Canonical gate order: two circuits get the same canonical order
    /// iff they differ only by exchanging adjacent gates on disjoint qubits.
    pub fn canonical_order(&self) -> Vec<Gate> {
        canonical_gates(self.qreg, &self.gates)
    }

    /// Equality modulo reordering of gates on disjoint qubits.
    pub fn dag_equivalent(&self, other: &QuantumCircuit) -> bool {
        self.qreg == other.qreg
            && self.gates.len() == other.gates.len()
            && self.canonical_order() == other.canonical_order()
    }
}

/// See [`QuantumCircuit::canonical_order`].
pub fn canonical_gates(qreg: usize, gates: &[Gate]) -> Vec<Gate> {
    let n = gates.len();
    let mut preds = vec![0usize; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut last: Vec<Option<usize>> = vec![None; qreg];
    for (i, g) in gates.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for q in g.qubits() {
            if let Some(p) = last[q] {
                if seen.insert(p) {
                    succs[p].push(i);
                    preds[i] += 1;
                }
            }
            last[q] = Some(i);
        }
    }
    let key = |i: usize| {
        let g = &gates[i];
        (g.qubits(), format!("{g}"), i)
    };
    let mut ready: BinaryHeap<Reverse<(Vec<usize>, String, usize)>> =
        (0..n).filter(|&i| preds[i] == 0).map(|i| Reverse(key(i))).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse((_, _, i))) = ready.pop() {
        out.push(gates[i].clone());
        for &s in &succs[i] {
            preds[s] -= 1;
            if preds[s] == 0 {
                ready.push(Reverse(key(s)));
            }
        }
    }
    out
}

pub(crate) fn check_gate(qreg: usize, cbits: usize, gate: &Gate) -> Result<()> {
    for &q in gate.operands() {
        if q >= qreg {
            return Err(Error::QubitOutOfRange { qubit: q, size: qreg });
        }
    }
    if let Some(c) = gate.q_if {
        if c >= qreg {
            return Err(Error::QubitOutOfRange { qubit: c, size: qreg });
        }
        if gate.operands().contains(&c) {
            return Err(Error::MalformedCircuit(format!(
                "quantum control {c} is also an operand of {}",
                gate.name()
            )));
        }
    }
    if let Some(cond) = gate.c_if {
        if cbits == 0 || cond.value >> cbits != 0 {
            return Err(Error::MalformedCircuit(format!(
                "condition value {} does not fit {cbits} classical bit(s)",
                cond.value
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_operand() {
        let err = QuantumCircuit::from_gates(2, vec![Gate::cx(0, 2)]).unwrap_err();
        assert_eq!(err, Error::QubitOutOfRange { qubit: 2, size: 2 });
    }

    #[test]
    fn rejects_empty_register() {
        assert_eq!(QuantumCircuit::new(0).unwrap_err(), Error::EmptyRegister);
    }

    #[test]
    fn c_if_needs_classical_bits() {
        let mut c = QuantumCircuit::new(1).unwrap();
        assert!(c.push(Gate::x(0).with_c_if(1)).is_err());
        let c = QuantumCircuit::from_gates(1, vec![Gate::x(0).with_c_if(2)]).unwrap();
        assert_eq!(c.cbits(), 2);
    }

    #[test]
    fn q_if_must_not_be_operand() {
        assert!(QuantumCircuit::from_gates(2, vec![Gate::x(0).with_q_if(0)]).is_err());
        assert!(QuantumCircuit::from_gates(2, vec![Gate::x(0).with_q_if(1)]).is_ok());
    }

    #[test]
    fn dag_equivalence_ignores_disjoint_order() {
        let a = QuantumCircuit::from_gates(3, vec![Gate::x(0), Gate::z(1), Gate::cx(0, 1)]).unwrap();
        let b = QuantumCircuit::from_gates(3, vec![Gate::z(1), Gate::x(0), Gate::cx(0, 1)]).unwrap();
        let c = QuantumCircuit::from_gates(3, vec![Gate::cx(0, 1), Gate::x(0), Gate::z(1)]).unwrap();
        assert!(a.dag_equivalent(&b));
        assert!(!a.dag_equivalent(&c));
    }
}
