//! Commutation groups and cancellation inside them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::primitives::{cancel_pair, merge_u1};
use crate::error::{Error, Result};
use crate::ir::{DAGCircuit, Gate, GateKind, GateName, NodeId};
use crate::semantics::{denote_gates, unitary_equal, Convention, TOL};

/// Kinds whose pairwise commutation on a shared wire licenses grouping.
pub const SAFE_KINDS: [GateName; 8] = [
    GateName::CX,
    GateName::X,
    GateName::Z,
    GateName::H,
    GateName::T,
    GateName::U1,
    GateName::U2,
    GateName::U3,
];

pub fn is_safe(g: &Gate) -> bool {
    SAFE_KINDS.contains(&g.name()) && !g.is_conditioned()
}

/// Exact commutator test on the joint support. Conditioned or non-unitary
/// gates never commute; disjoint gates always do.
pub fn commutes(a: &Gate, b: &Gate) -> bool {
    if a.is_conditioned() || b.is_conditioned() || !a.kind.is_unitary() || !b.kind.is_unitary() {
        return false;
    }
    if !a.shares_qubit(b) {
        return true;
    }
    let mut support: Vec<usize> = a.operands().iter().chain(b.operands()).copied().collect();
    support.sort_unstable();
    support.dedup();
    let local = |g: &Gate| g.map_qubits(|q| support.binary_search(&q).expect("in support"));
    let (la, lb) = (local(a), local(b));
    let n = support.len();
    let ab = denote_gates(n, &[la.clone(), lb.clone()], Convention::Diagram).expect("small unitary");
    let ba = denote_gates(n, &[lb, la], Convention::Diagram).expect("small unitary");
    unitary_equal(&ab, &ba, TOL)
}

/// How a wire is cut into groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grouping {
    /// A gate joins the open group iff it commutes with every member.
    #[default]
    AllPairs,
    /// A gate joins iff it commutes with the last member. This assumes
    /// transitivity and is unsound; kept for tests.
    Chain,
}

/// Per-wire partition of a DAG's gates into commutation groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationSet {
    groups: Vec<Vec<Vec<NodeId>>>,
    index: HashMap<(NodeId, usize), usize>,
    dag_hash: u64,
}

impl CommutationSet {
    /// Build from explicit groups; every gate on wire `q` must appear in
    /// exactly one group of `groups[q]`, in wire order.
    pub fn from_groups(dag: &DAGCircuit, groups: Vec<Vec<Vec<NodeId>>>) -> Result<CommutationSet> {
        if groups.len() != dag.qreg() {
            return Err(Error::DimensionMismatch(groups.len(), dag.qreg()));
        }
        let mut index = HashMap::new();
        for (q, wire) in groups.iter().enumerate() {
            let flat: Vec<NodeId> = wire.iter().flatten().copied().collect();
            if flat != dag.wire(q) {
                return Err(Error::Precondition(format!("groups on wire {q} do not cover it in order")));
            }
            for (gi, grp) in wire.iter().enumerate() {
                for &id in grp {
                    index.insert((id, q), gi);
                }
            }
        }
        Ok(CommutationSet {
            groups,
            index,
            dag_hash: dag.structural_hash(),
        })
    }

    pub fn wire(&self, q: usize) -> &[Vec<NodeId>] {
        &self.groups[q]
    }

    pub fn group_of(&self, id: NodeId, q: usize) -> Option<usize> {
        self.index.get(&(id, q)).copied()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Set was computed for this exact DAG.
    pub fn matches(&self, dag: &DAGCircuit) -> bool {
        self.dag_hash == dag.structural_hash()
    }
}

pub fn commutation_analysis(dag: &DAGCircuit, grouping: Grouping) -> CommutationSet {
    let mut groups = Vec::with_capacity(dag.qreg());
    for q in 0..dag.qreg() {
        let mut wire: Vec<Vec<NodeId>> = Vec::new();
        let mut open = false;
        for &id in dag.wire(q) {
            let g = dag.gate(id);
            if !is_safe(g) {
                wire.push(vec![id]);
                open = false;
                continue;
            }
            let joins = open
                && match grouping {
                    Grouping::AllPairs => wire.last().expect("open").iter().all(|&m| commutes(dag.gate(m), g)),
                    Grouping::Chain => commutes(dag.gate(*wire.last().expect("open").last().expect("non-empty")), g),
                };
            if joins {
                wire.last_mut().expect("open").push(id);
            } else {
                wire.push(vec![id]);
                open = true;
            }
        }
        groups.push(wire);
    }
    CommutationSet::from_groups(dag, groups).expect("groups cover every wire")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CancelConfig {
    /// Leave conditioned gates alone. Turning this off reproduces the bug.
    pub guard_conditioned: bool,
}

impl Default for CancelConfig {
    fn default() -> Self {
        CancelConfig { guard_conditioned: true }
    }
}

/// One rewrite, with gate-list positions as they were just before it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CancelEvent {
    Pair {
        gate: Gate,
        first: usize,
        second: usize,
    },
    Merge {
        qubit: usize,
        originals: Vec<(usize, Gate)>,
        merged: Option<(usize, Gate)>,
    },
}

pub type CancelLog = Vec<CancelEvent>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    One(usize, usize, GateName),
    Two(usize, usize, usize, usize, GateName),
}

/// Cancel self-inverse pairs and merge `u1` angles inside each group.
pub fn commutative_cancellation(dag: &mut DAGCircuit, set: &CommutationSet, cfg: CancelConfig) -> Result<CancelLog> {
    if !set.matches(dag) {
        return Err(Error::Precondition("commutation set is stale".into()));
    }
    let mut buckets: BTreeMap<Key, Vec<NodeId>> = BTreeMap::new();
    for id in dag.topological_op_nodes() {
        let g = dag.gate(id);
        if cfg.guard_conditioned && g.is_conditioned() {
            continue;
        }
        let cancellable = g.kind.is_self_inverse() || matches!(g.kind, GateKind::U1(_));
        if !cancellable || g.q_if.is_some() {
            continue;
        }
        let group = |q: usize| set.group_of(id, q).expect("set covers dag");
        let key = match *g.operands() {
            [q] => Key::One(q, group(q), g.name()),
            [a, b] => Key::Two(a, b, group(a), group(b), g.name()),
            _ => continue,
        };
        buckets.entry(key).or_default().push(id);
    }
    let mut log = Vec::new();
    for (key, ids) in buckets {
        let name = match key {
            Key::One(_, _, n) | Key::Two(_, _, _, _, n) => n,
        };
        if name == GateName::U1 {
            if ids.len() < 2 {
                continue;
            }
            let q = dag.gate(ids[0]).operands()[0];
            let originals: Vec<(usize, Gate)> = ids.iter().map(|&id| (pos(dag, id), dag.gate(id).clone())).collect();
            let kept = merge_u1(dag, &ids)?;
            let merged = kept.map(|id| (pos(dag, id), dag.gate(id).clone()));
            log.push(CancelEvent::Merge {
                qubit: q,
                originals,
                merged,
            });
            continue;
        }
        for pair in ids.chunks_exact(2) {
            let (first, second) = (pos(dag, pair[0]), pos(dag, pair[1]));
            let gate = dag.gate(pair[0]).clone();
            cancel_pair(dag, pair[0], pair[1])?;
            log.push(CancelEvent::Pair { gate, first, second });
        }
    }
    Ok(log)
}

fn pos(dag: &DAGCircuit, id: NodeId) -> usize {
    dag.position(id).expect("live node")
}

/// Number of gates removed by a log.
pub fn removed_by(log: &CancelLog) -> usize {
    log.iter()
        .map(|e| match e {
            CancelEvent::Pair { .. } => 2,
            CancelEvent::Merge { originals, merged, .. } => originals.len() - usize::from(merged.is_some()),
        })
        .sum()
}

/// A triple `(a, b, c)` on a shared wire with `a ~ b`, `b ~ c` and `a !~ c`.
pub fn transitivity_counterexample(alphabet: &[Gate]) -> Option<(Gate, Gate, Gate)> {
    for a in alphabet {
        for b in alphabet {
            if !a.shares_qubit(b) || !commutes(a, b) {
                continue;
            }
            for c in alphabet {
                let shared = a.qubits().iter().any(|q| b.acts_on(*q) && c.acts_on(*q));
                if shared && commutes(b, c) && !commutes(a, c) {
                    return Some((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::QuantumCircuit;
    use crate::passes::mapped::oracle_equal;
    use crate::semantics::EqualityMode;

    fn crossed() -> QuantumCircuit {
        QuantumCircuit::from_gates(
            2,
            vec![
                Gate::cx(1, 0),
                Gate::z(0),
                Gate::x(1),
                Gate::cx(0, 1),
                Gate::z(0),
                Gate::cx(0, 1),
                Gate::cx(1, 0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(commutes(&Gate::z(0), &Gate::cx(0, 1)));
        assert!(!commutes(&Gate::x(0), &Gate::cx(0, 1)));
        assert!(commutes(&Gate::x(0), &Gate::z(1)));
        assert!(!commutes(&Gate::z(0).with_c_if(1), &Gate::z(0)));
    }

    #[test]
    fn crossed_cx_groups() {
        let d = DAGCircuit::from_circuit(&crossed());
        let set = commutation_analysis(&d, Grouping::AllPairs);
        let sizes = |q: usize| set.wire(q).iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(sizes(0), vec![1, 4, 1]);
        assert_eq!(sizes(1), vec![1, 3, 1]);
    }

    #[test]
    fn crossed_cx_cancels_to_three() {
        let c = crossed();
        let mut d = DAGCircuit::from_circuit(&c);
        let set = commutation_analysis(&d, Grouping::AllPairs);
        let log = commutative_cancellation(&mut d, &set, CancelConfig::default()).unwrap();
        let out = d.to_circuit();
        assert_eq!(out.gates(), &[Gate::cx(1, 0), Gate::x(1), Gate::cx(1, 0)]);
        assert_eq!(removed_by(&log), 4);
        assert!(oracle_equal(&c, &out, Convention::Diagram, EqualityMode::Exact, TOL).unwrap());
    }

    #[test]
    fn conditioned_partner_is_kept() {
        let c = QuantumCircuit::from_parts(1, 1, vec![Gate::z(0), Gate::z(0).with_c_if(1)]).unwrap();
        let mut d = DAGCircuit::from_circuit(&c);
        let ids = d.op_nodes().to_vec();
        let set = CommutationSet::from_groups(&d, vec![vec![ids]]).unwrap();
        commutative_cancellation(&mut d, &set, CancelConfig::default()).unwrap();
        assert_eq!(d.to_circuit(), c);
        let mut bad = DAGCircuit::from_circuit(&c);
        let off = CancelConfig { guard_conditioned: false };
        commutative_cancellation(&mut bad, &set, off).unwrap();
        assert!(bad.is_empty());
    }

    #[test]
    fn chain_grouping_breaks_semantics() {
        let c = QuantumCircuit::from_gates(1, vec![Gate::h(0), Gate::u1(0.0, 0), Gate::z(0), Gate::u1(0.0, 0), Gate::h(0)])
            .unwrap();
        let run = |g: Grouping| {
            let mut d = DAGCircuit::from_circuit(&c);
            let set = commutation_analysis(&d, g);
            commutative_cancellation(&mut d, &set, CancelConfig::default()).unwrap();
            oracle_equal(&c, &d.to_circuit(), Convention::Diagram, EqualityMode::Exact, TOL).unwrap()
        };
        assert!(run(Grouping::AllPairs));
        assert!(!run(Grouping::Chain));
    }

    #[test]
    fn stale_set_is_rejected() {
        let mut d = DAGCircuit::from_circuit(&crossed());
        let set = commutation_analysis(&d, Grouping::AllPairs);
        commutative_cancellation(&mut d, &set, CancelConfig::default()).unwrap();
        assert!(commutative_cancellation(&mut d, &set, CancelConfig::default()).is_err());
    }
}
