//! Wire-indexed DAG view of a circuit.
//!
//! Op nodes live in an arena and keep an abstract insertion order. Each
//! qubit owns a wire: input boundary, the op nodes touching it in order,
//! output boundary. Mutation is crate-private; every edit is tagged with
//! the name of the primitive that performed it.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::BinaryHeap;
use std::hash::{Hash, Hasher};

use super::circuit::{check_gate, QuantumCircuit};
use super::gate::Gate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Endpoint of a wire edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireNode {
    Input(usize),
    Op(NodeId),
    Output(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Insert,
    Remove,
    Replace,
    Relabel,
    Resize,
}

/// One recorded mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edit {
    pub primitive: &'static str,
    pub kind: EditKind,
}

#[derive(Debug, Clone)]
pub struct DAGCircuit {
    qreg: usize,
    cbits: usize,
    nodes: Vec<Option<Gate>>,
    order: Vec<NodeId>,
    wires: Vec<Vec<NodeId>>,
    edits: Vec<Edit>,
}

pub const APPEND: &str = "apply_operation_back";

impl DAGCircuit {
    pub fn new(qreg: usize, cbits: usize) -> Result<DAGCircuit> {
        if qreg == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(DAGCircuit {
            qreg,
            cbits,
            nodes: Vec::new(),
            order: Vec::new(),
            wires: vec![Vec::new(); qreg],
            edits: Vec::new(),
        })
    }

    pub fn from_circuit(c: &QuantumCircuit) -> DAGCircuit {
        let mut dag = DAGCircuit::new(c.qreg(), c.cbits()).expect("circuit register is non-empty");
        for g in c.gates() {
            dag.append(g.clone()).expect("circuit gates are already validated");
        }
        dag.edits.clear();
        dag
    }

    /// Gates in topological order with insertion-index tie-break.
    pub fn to_circuit(&self) -> QuantumCircuit {
        let gates = self
            .topological_op_nodes()
            .into_iter()
            .map(|id| self.gate(id).clone())
            .collect();
        QuantumCircuit::from_parts(self.qreg, self.cbits, gates).expect("dag holds validated gates")
    }

    pub fn qreg(&self) -> usize {
        self.qreg
    }

    pub fn cbits(&self) -> usize {
        self.cbits
    }

    pub fn op_count(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn gate(&self, id: NodeId) -> &Gate {
        self.nodes[id.0].as_ref().expect("live node id")
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.get(id.0).is_some_and(|n| n.is_some())
    }

    /// Op nodes in abstract (insertion) order.
    pub fn op_nodes(&self) -> &[NodeId] {
        &self.order
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.order.iter().position(|&n| n == id)
    }

    pub fn wire(&self, q: usize) -> &[NodeId] {
        &self.wires[q]
    }

    pub fn input_nodes(&self) -> Vec<WireNode> {
        (0..self.qreg).map(WireNode::Input).collect()
    }

    pub fn output_nodes(&self) -> Vec<WireNode> {
        (0..self.qreg).map(WireNode::Output).collect()
    }

    /// All wire edges as (from, to, qubit).
    pub fn edges(&self) -> Vec<(WireNode, WireNode, usize)> {
        let mut out = Vec::new();
        for (q, wire) in self.wires.iter().enumerate() {
            let mut prev = WireNode::Input(q);
            for &id in wire {
                out.push((prev, WireNode::Op(id), q));
                prev = WireNode::Op(id);
            }
            out.push((prev, WireNode::Output(q), q));
        }
        out
    }

    /// Next op node on wire `q` after `id`, if any.
    pub fn next_on_wire(&self, id: NodeId, q: usize) -> Option<NodeId> {
        let w = &self.wires[q];
        let i = w.iter().position(|&n| n == id)?;
        w.get(i + 1).copied()
    }

    pub fn prev_on_wire(&self, id: NodeId, q: usize) -> Option<NodeId> {
        let w = &self.wires[q];
        let i = w.iter().position(|&n| n == id)?;
        i.checked_sub(1).map(|j| w[j])
    }

    /// Kahn's algorithm over wire dependencies; ties go to the earlier insertion.
    pub fn topological_op_nodes(&self) -> Vec<NodeId> {
        let mut rank = vec![usize::MAX; self.nodes.len()];
        for (i, id) in self.order.iter().enumerate() {
            rank[id.0] = i;
        }
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut succ: Vec<Vec<NodeId>> = vec![Vec::new(); self.nodes.len()];
        for wire in &self.wires {
            for pair in wire.windows(2) {
                if !succ[pair[0].0].contains(&pair[1]) {
                    succ[pair[0].0].push(pair[1]);
                    indeg[pair[1].0] += 1;
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<(usize, usize)>> = self
            .order
            .iter()
            .filter(|id| indeg[id.0] == 0)
            .map(|id| Reverse((rank[id.0], id.0)))
            .collect();
        let mut out = Vec::with_capacity(self.order.len());
        while let Some(Reverse((_, i))) = ready.pop() {
            out.push(NodeId(i));
            for s in &succ[i] {
                indeg[s.0] -= 1;
                if indeg[s.0] == 0 {
                    ready.push(Reverse((rank[s.0], s.0)));
                }
            }
        }
        out
    }

    /// Hash of the abstract circuit (gates in topological order).
    pub fn structural_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.qreg.hash(&mut h);
        for id in self.topological_op_nodes() {
            self.gate(id).hash(&mut h);
        }
        h.finish()
    }

    pub fn edit_log(&self) -> &[Edit] {
        &self.edits
    }

    pub fn clear_edit_log(&mut self) {
        self.edits.clear();
    }

    /// Append a gate at the end of every wire it touches.
    pub fn append(&mut self, gate: Gate) -> Result<NodeId> {
        self.append_tagged(gate, APPEND)
    }

    pub(crate) fn append_tagged(&mut self, gate: Gate, tag: &'static str) -> Result<NodeId> {
        check_gate(self.qreg, self.cbits, &gate)?;
        let id = NodeId(self.nodes.len());
        for q in gate.qubits() {
            self.wires[q].push(id);
        }
        self.nodes.push(Some(gate));
        self.order.push(id);
        self.log(tag, EditKind::Insert);
        Ok(id)
    }

    /// Insert `gate` so it sits at index `pos` of the abstract order.
    pub(crate) fn insert_at(&mut self, pos: usize, gate: Gate, tag: &'static str) -> Result<NodeId> {
        check_gate(self.qreg, self.cbits, &gate)?;
        if pos > self.order.len() {
            return Err(Error::Precondition(format!(
                "insert position {pos} beyond {} ops",
                self.order.len()
            )));
        }
        let id = NodeId(self.nodes.len());
        self.nodes.push(Some(gate));
        self.order.insert(pos, id);
        self.rebuild_wires();
        self.log(tag, EditKind::Insert);
        Ok(id)
    }

    pub(crate) fn remove(&mut self, id: NodeId, tag: &'static str) -> Result<Gate> {
        let pos = self
            .position(id)
            .ok_or_else(|| Error::Precondition(format!("node {} is not live", id.0)))?;
        self.order.remove(pos);
        let gate = self.nodes[id.0].take().expect("live node");
        for q in gate.qubits() {
            self.wires[q].retain(|&n| n != id);
        }
        self.log(tag, EditKind::Remove);
        Ok(gate)
    }

    /// Swap in a new gate on exactly the same qubits.
    pub(crate) fn replace(&mut self, id: NodeId, gate: Gate, tag: &'static str) -> Result<()> {
        check_gate(self.qreg, self.cbits, &gate)?;
        let old = self
            .nodes
            .get(id.0)
            .and_then(|n| n.as_ref())
            .ok_or_else(|| Error::Precondition(format!("node {} is not live", id.0)))?;
        let mut a = old.qubits();
        let mut b = gate.qubits();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::Precondition("replacement must act on the same qubits".into()));
        }
        self.nodes[id.0] = Some(gate);
        self.log(tag, EditKind::Replace);
        Ok(())
    }

    /// Exchange labels `a` and `b` on every op at order index `from` or later.
    pub(crate) fn relabel_from(&mut self, from: usize, a: usize, b: usize, tag: &'static str) -> Result<()> {
        if a >= self.qreg || b >= self.qreg {
            return Err(Error::QubitOutOfRange {
                qubit: a.max(b),
                size: self.qreg,
            });
        }
        for &id in &self.order[from.min(self.order.len())..] {
            let g = self.nodes[id.0].as_mut().expect("live node");
            *g = g.swap_labels(a, b);
        }
        self.rebuild_wires();
        self.log(tag, EditKind::Relabel);
        Ok(())
    }

    /// Apply a qubit permutation to every op at order index `from` or later.
    pub(crate) fn permute_from(&mut self, from: usize, perm: &[usize], tag: &'static str) -> Result<()> {
        if perm.len() != self.qreg {
            return Err(Error::DimensionMismatch(perm.len(), self.qreg));
        }
        for &id in &self.order[from.min(self.order.len())..] {
            let g = self.nodes[id.0].as_mut().expect("live node");
            *g = g.map_qubits(|q| perm[q]);
        }
        self.rebuild_wires();
        self.log(tag, EditKind::Relabel);
        Ok(())
    }

    /// Grow the register with idle qubits.
    pub(crate) fn enlarge(&mut self, qreg: usize, tag: &'static str) -> Result<()> {
        if qreg < self.qreg {
            return Err(Error::Precondition("cannot shrink a register".into()));
        }
        self.wires.resize(qreg, Vec::new());
        self.qreg = qreg;
        self.log(tag, EditKind::Resize);
        Ok(())
    }

    fn rebuild_wires(&mut self) {
        for w in &mut self.wires {
            w.clear();
        }
        for &id in &self.order {
            let g = self.nodes[id.0].as_ref().expect("live node");
            for q in g.qubits() {
                self.wires[q].push(id);
            }
        }
    }

    fn log(&mut self, primitive: &'static str, kind: EditKind) {
        self.edits.push(Edit { primitive, kind });
    }

    /// Consistency of wires with the abstract order (used by tests).
    pub fn check_invariants(&self) -> Result<()> {
        let mut copy = self.clone();
        copy.rebuild_wires();
        if copy.wires != self.wires {
            return Err(Error::MalformedCircuit("wires disagree with op order".into()));
        }
        if self.topological_op_nodes().len() != self.order.len() {
            return Err(Error::MalformedCircuit("dependency cycle".into()));
        }
        Ok(())
    }
}

/// `dag` lists exactly the gates of `qc`, in order, over the same register.
pub fn circuit_dag_equiv(qc: &QuantumCircuit, dag: &DAGCircuit) -> bool {
    qc.qreg() == dag.qreg()
        && qc.len() == dag.op_count()
        && dag.topological_op_nodes().iter().zip(qc.gates()).all(|(&id, g)| dag.gate(id) == g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(n: usize, gates: Vec<Gate>) -> QuantumCircuit {
        QuantumCircuit::from_gates(n, gates).unwrap()
    }

    #[test]
    fn ghz_equiv_is_order_sensitive() {
        let ghz = circ(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(1, 2)]);
        assert!(circuit_dag_equiv(&ghz, &DAGCircuit::from_circuit(&ghz)));
        let swapped = circ(3, vec![Gate::h(0), Gate::cx(1, 2), Gate::cx(0, 1)]);
        assert!(!circuit_dag_equiv(&ghz, &DAGCircuit::from_circuit(&swapped)));
    }

    #[test]
    fn empty_circuit_has_only_boundaries() {
        let dag = DAGCircuit::from_circuit(&QuantumCircuit::new(3).unwrap());
        assert_eq!(dag.op_count(), 0);
        assert_eq!(dag.input_nodes().len(), 3);
        assert_eq!(dag.output_nodes().len(), 3);
        assert_eq!(dag.edges().len(), 3);
    }

    #[test]
    fn cx_has_two_wire_edges_each_way() {
        let dag = DAGCircuit::from_circuit(&circ(2, vec![Gate::cx(0, 1)]));
        let id = dag.op_nodes()[0];
        let edges = dag.edges();
        assert_eq!(edges.iter().filter(|e| e.1 == WireNode::Op(id)).count(), 2);
        assert_eq!(edges.iter().filter(|e| e.0 == WireNode::Op(id)).count(), 2);
    }

    #[test]
    fn disjoint_ops_are_independent() {
        let dag = DAGCircuit::from_circuit(&circ(2, vec![Gate::x(0), Gate::z(1)]));
        let ops = dag.op_nodes();
        assert!(!dag
            .edges()
            .iter()
            .any(|e| e.0 == WireNode::Op(ops[0]) && e.1 == WireNode::Op(ops[1])));
    }

    #[test]
    fn topological_order_restores_list() {
        let c = circ(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::z(2), Gate::cx(1, 2), Gate::x(0)]);
        assert_eq!(DAGCircuit::from_circuit(&c).to_circuit(), c);
    }

    #[test]
    fn insert_and_remove_keep_wires_consistent() {
        let c = circ(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::x(2)]);
        let mut dag = DAGCircuit::from_circuit(&c);
        let id = dag.insert_at(1, Gate::swap(1, 2), "test").unwrap();
        dag.check_invariants().unwrap();
        assert_eq!(dag.wire(1), &[id, dag.op_nodes()[2]]);
        dag.remove(id, "test").unwrap();
        dag.check_invariants().unwrap();
        assert_eq!(dag.to_circuit(), c);
        assert_eq!(dag.edit_log().len(), 2);
        assert!(dag.edit_log().iter().all(|e| e.primitive == "test"));
    }

    #[test]
    fn relabel_from_touches_suffix_only() {
        let c = circ(2, vec![Gate::x(0), Gate::z(0)]);
        let mut dag = DAGCircuit::from_circuit(&c);
        dag.relabel_from(1, 0, 1, "test").unwrap();
        assert_eq!(dag.to_circuit().gates(), &[Gate::x(0), Gate::z(1)]);
    }

    #[test]
    fn replace_requires_same_qubits() {
        let mut dag = DAGCircuit::from_circuit(&circ(2, vec![Gate::x(0)]));
        let id = dag.op_nodes()[0];
        assert!(dag.replace(id, Gate::x(1), "t").is_err());
        dag.replace(id, Gate::z(0), "t").unwrap();
        assert_eq!(dag.gate(id), &Gate::z(0));
    }
}
