use crate::device::{CouplingMap, Layout};
use crate::error::{Error, Result};
use crate::ir::{DAGCircuit, Gate, QuantumCircuit};
use crate::semantics::{denote_lowered, equal_in_mode, Convention, EqualityMode};

/// A routed circuit over physical qubits with the layouts before and after.
#[derive(Debug, Clone)]
pub struct MappedCircuit {
    pub dag: DAGCircuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
}

impl MappedCircuit {
    pub fn new(dag: DAGCircuit, initial_layout: Layout, final_layout: Layout) -> Result<MappedCircuit> {
        let ok = initial_layout.is_bijection()
            && final_layout.is_bijection()
            && initial_layout.num_virtual() == final_layout.num_virtual()
            && initial_layout.num_physical() == dag.qreg();
        if !ok {
            return Err(Error::InvalidLayout(
                "mapped circuit needs two bijections over the dag register".into(),
            ));
        }
        Ok(MappedCircuit {
            dag,
            initial_layout,
            final_layout,
        })
    }

    pub fn circuit(&self) -> QuantumCircuit {
        self.dag.to_circuit()
    }

    pub fn swaps(&self) -> usize {
        self.circuit().count_swaps()
    }

    /// SWAPs that move every virtual qubit from its final back to its initial position.
    pub fn restoring_swaps(&self) -> Result<Vec<Gate>> {
        let moves = swap_sequence(&self.initial_layout, &self.final_layout)?;
        Ok(moves.into_iter().rev().map(|(a, b)| Gate::swap(a, b)).collect())
    }

    /// Output followed by the restoring SWAPs.
    pub fn restored(&self) -> Result<QuantumCircuit> {
        let c = self.circuit();
        let mut gates = c.gates().to_vec();
        gates.extend(self.restoring_swaps()?);
        QuantumCircuit::from_parts(c.qreg(), c.cbits(), gates)
    }

    /// `input` placed on the device through the initial layout.
    pub fn placed_input(&self, input: &QuantumCircuit) -> Result<QuantumCircuit> {
        place(input, &self.initial_layout)
    }

    /// Oracle check that routing preserved the semantics of `input`.
    pub fn equivalent_to(&self, input: &QuantumCircuit, conv: Convention, mode: EqualityMode, tol: f64) -> Result<bool> {
        oracle_equal(&self.placed_input(input)?, &self.restored()?, conv, mode, tol)
    }

    pub fn is_coupling_compliant(&self, cmap: &CouplingMap) -> bool {
        coupling_compliant(&self.circuit(), cmap)
    }
}

/// Physical swaps that carry `from` to `to` when applied in order.
pub fn swap_sequence(from: &Layout, to: &Layout) -> Result<Vec<(usize, usize)>> {
    if !from.is_bijection() || !to.is_bijection() || from.num_physical() != to.num_physical() {
        return Err(Error::InvalidLayout("swap sequence needs bijections of equal size".into()));
    }
    let mut cur = from.clone();
    let mut out = Vec::new();
    for p in 0..cur.num_physical() {
        let want = to.p2v(p).expect("bijection");
        if cur.p2v(p) != Some(want) {
            let q = cur.v2p(want);
            cur.swap_physical(p, q)?;
            out.push((p, q));
        }
    }
    Ok(out)
}

/// Relabel a virtual circuit through `layout` onto its physical register.
pub fn place(c: &QuantumCircuit, layout: &Layout) -> Result<QuantumCircuit> {
    if c.qreg() > layout.num_virtual() {
        return Err(Error::InvalidLayout(format!(
            "layout places {} qubits, circuit has {}",
            layout.num_virtual(),
            c.qreg()
        )));
    }
    c.relabeled(layout.num_physical(), |v| layout.v2p(v))
}

/// Every two-qubit gate (and quantum control) sits on a coupled pair.
pub fn coupling_compliant(c: &QuantumCircuit, cmap: &CouplingMap) -> bool {
    c.qreg() <= cmap.size()
        && c.gates().iter().all(|g| {
            let qs = g.qubits();
            qs.len() < 2 || qs.iter().all(|&a| qs.iter().all(|&b| a == b || cmap.adjacent(a, b)))
        })
}

/// Compare two circuits through the oracle, classical bits lowered to qubits.
pub fn oracle_equal(a: &QuantumCircuit, b: &QuantumCircuit, conv: Convention, mode: EqualityMode, tol: f64) -> Result<bool> {
    if a.qreg() != b.qreg() {
        return Err(Error::DimensionMismatch(a.qreg(), b.qreg()));
    }
    let cbits = a.cbits().max(b.cbits());
    let widen = |c: &QuantumCircuit| QuantumCircuit::from_parts(c.qreg(), cbits, c.gates().to_vec());
    let ua = denote_lowered(&widen(a)?, conv)?;
    let ub = denote_lowered(&widen(b)?, conv)?;
    Ok(equal_in_mode(&ua, &ub, mode, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::TOL;

    #[test]
    fn swap_sequence_reaches_target() {
        let a = Layout::from_v2p(vec![0, 1, 2, 3], 4).unwrap();
        let b = Layout::from_v2p(vec![2, 0, 3, 1], 4).unwrap();
        let mut cur = a.clone();
        for (p, q) in swap_sequence(&a, &b).unwrap() {
            cur.swap_physical(p, q).unwrap();
        }
        assert_eq!(cur, b);
    }

    #[test]
    fn one_swap_routing_is_equivalent_in_both_conventions() {
        let input = QuantumCircuit::from_gates(3, vec![Gate::h(0), Gate::cx(0, 2), Gate::t(1)]).unwrap();
        let init = Layout::trivial(3);
        let fin = crate::device::layout_swap(&init, 0, 1).unwrap();
        let out = QuantumCircuit::from_gates(3, vec![Gate::h(0), Gate::swap(0, 1), Gate::cx(1, 2), Gate::t(0)]).unwrap();
        let m = MappedCircuit::new(DAGCircuit::from_circuit(&out), init, fin).unwrap();
        for conv in [Convention::Diagram, Convention::TimeOrdered] {
            assert!(m.equivalent_to(&input, conv, EqualityMode::Exact, TOL).unwrap());
        }
        assert!(!m.is_coupling_compliant(&CouplingMap::line(3)) || coupling_compliant(&out, &CouplingMap::line(3)));
    }

    #[test]
    fn compliance_checks_every_pair() {
        let line = CouplingMap::line(3);
        assert!(coupling_compliant(&QuantumCircuit::from_gates(3, vec![Gate::cx(1, 2)]).unwrap(), &line));
        assert!(!coupling_compliant(&QuantumCircuit::from_gates(3, vec![Gate::cx(0, 2)]).unwrap(), &line));
        assert!(!coupling_compliant(&QuantumCircuit::from_gates(3, vec![Gate::x(0).with_q_if(2)]).unwrap(), &line));
    }
}
