use std::fmt;

use crate::device::{CouplingMap, Layout};
use crate::ir::{Gate, QuantumCircuit};

/// A value the harness can feed to an operation, shrink, and report.
pub trait CaseInput: Clone + fmt::Debug {
    /// Strictly smaller candidates, most aggressive first.
    fn shrink(&self) -> Vec<Self> {
        Vec::new()
    }

    fn circuit(&self) -> Option<QuantumCircuit> {
        None
    }

    fn coupling(&self) -> Option<CouplingMap> {
        None
    }

    fn layout(&self) -> Option<Layout> {
        None
    }
}

impl CaseInput for usize {
    fn shrink(&self) -> Vec<usize> {
        match *self {
            0 => vec![],
            n => vec![n / 2, n - 1],
        }
    }
}

/// Gate deletions, then removal of each qubit with its gates.
pub fn shrink_circuit(c: &QuantumCircuit) -> Vec<QuantumCircuit> {
    let gates = c.gates();
    let mut out = Vec::new();
    for i in 0..gates.len() {
        let mut g = gates.to_vec();
        g.remove(i);
        out.extend(QuantumCircuit::from_parts(c.qreg(), c.cbits(), g).ok());
    }
    if c.qreg() > 1 {
        for q in (0..c.qreg()).rev() {
            let kept: Vec<Gate> = gates
                .iter()
                .filter(|g| !g.acts_on(q))
                .map(|g| g.map_qubits(|x| if x > q { x - 1 } else { x }))
                .collect();
            out.extend(QuantumCircuit::from_parts(c.qreg() - 1, c.cbits(), kept).ok());
        }
    }
    out
}

impl CaseInput for QuantumCircuit {
    fn shrink(&self) -> Vec<QuantumCircuit> {
        shrink_circuit(self)
    }

    fn circuit(&self) -> Option<QuantumCircuit> {
        Some(self.clone())
    }
}

impl CaseInput for CouplingMap {
    fn coupling(&self) -> Option<CouplingMap> {
        Some(self.clone())
    }
}

impl CaseInput for Layout {
    fn layout(&self) -> Option<Layout> {
        Some(self.clone())
    }
}

impl CaseInput for (QuantumCircuit, CouplingMap) {
    fn shrink(&self) -> Vec<Self> {
        shrink_circuit(&self.0).into_iter().map(|c| (c, self.1.clone())).collect()
    }

    fn circuit(&self) -> Option<QuantumCircuit> {
        Some(self.0.clone())
    }

    fn coupling(&self) -> Option<CouplingMap> {
        Some(self.1.clone())
    }
}

impl CaseInput for (QuantumCircuit, CouplingMap, Layout) {
    fn shrink(&self) -> Vec<Self> {
        let n = self.2.num_virtual();
        shrink_circuit(&self.0)
            .into_iter()
            .filter(|c| c.qreg() == n)
            .map(|c| (c, self.1.clone(), self.2.clone()))
            .collect()
    }

    fn circuit(&self) -> Option<QuantumCircuit> {
        Some(self.0.clone())
    }

    fn coupling(&self) -> Option<CouplingMap> {
        Some(self.1.clone())
    }

    fn layout(&self) -> Option<Layout> {
        Some(self.2.clone())
    }
}

impl CaseInput for (usize, CouplingMap) {
    fn shrink(&self) -> Vec<Self> {
        self.0.shrink().into_iter().filter(|&n| n > 0).map(|n| (n, self.1.clone())).collect()
    }

    fn coupling(&self) -> Option<CouplingMap> {
        Some(self.1.clone())
    }
}

impl CaseInput for (CouplingMap, usize, usize) {
    fn coupling(&self) -> Option<CouplingMap> {
        Some(self.0.clone())
    }
}

impl CaseInput for (Layout, usize, usize) {
    fn layout(&self) -> Option<Layout> {
        Some(self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circuit_shrinks_by_gate_and_by_qubit() {
        let c = QuantumCircuit::from_gates(3, vec![Gate::x(0), Gate::cx(1, 2)]).unwrap();
        let s = shrink_circuit(&c);
        assert_eq!(s.len(), 2 + 3);
        assert!(s.iter().any(|d| d.qreg() == 2 && d.gates() == [Gate::cx(0, 1)]));
        assert!(s.iter().all(|d| d.len() < c.len() || d.qreg() < c.qreg()));
    }
}
