//! The certified transformation primitives.
//!
//! Each one is an instance of corpus rules (swap-and-relabel, pair
//! cancellation, phase merging, single-qubit fusion) and tags its DAG edits
//! with its own name. Passes change a DAG only through these.

use crate::device::{CouplingMap, Layout};
use crate::error::{Error, Result};
use crate::ir::{DAGCircuit, Gate, GateKind, NodeId};
use crate::semantics::{denote_gates, phase_equal, Convention, TOL};

pub const APPLY_LAYOUT: &str = "apply_layout";
pub const SWAP_AND_UPDATE: &str = "swap_and_update_gate";
pub const CANCEL_SWAP: &str = "cancel_swap";
pub const SWAP_ALONG_PATH: &str = "swap_along_path";
pub const APPEND_MAPPED: &str = "append_mapped_gate";
pub const CANCEL_PAIR: &str = "cancel_pair";
pub const MERGE_U1: &str = "merge_u1";
pub const REPLACE_1Q_RUN: &str = "replace_1q_run";

/// Every primitive name, for edit-log audits.
pub const PRIMITIVES: [&str; 8] = [
    APPLY_LAYOUT,
    SWAP_AND_UPDATE,
    CANCEL_SWAP,
    SWAP_ALONG_PATH,
    APPEND_MAPPED,
    CANCEL_PAIR,
    MERGE_U1,
    REPLACE_1Q_RUN,
];

/// True if every recorded edit came from a primitive.
pub fn edits_are_primitive(dag: &DAGCircuit) -> bool {
    dag.edit_log().iter().all(|e| PRIMITIVES.contains(&e.primitive))
}

fn require_adjacent(cmap: &CouplingMap, p1: usize, p2: usize) -> Result<()> {
    if p1 >= cmap.size() || p2 >= cmap.size() {
        return Err(Error::QubitOutOfRange {
            qubit: p1.max(p2),
            size: cmap.size(),
        });
    }
    if !cmap.adjacent(p1, p2) {
        return Err(Error::NotAdjacent(p1, p2));
    }
    Ok(())
}

/// Move a virtual circuit onto the physical register of `layout`.
///
/// `layout` must be a bijection (see [`Layout::with_ancillas`]).
pub fn apply_layout(dag: &mut DAGCircuit, layout: &Layout) -> Result<()> {
    if !layout.is_bijection() || layout.num_virtual() < dag.qreg() {
        return Err(Error::InvalidLayout("apply_layout needs a bijection covering the register".into()));
    }
    dag.enlarge(layout.num_physical(), APPLY_LAYOUT)?;
    dag.permute_from(0, layout.v2p_slice(), APPLY_LAYOUT)
}

/// Insert `SWAP(p1, p2)` at order index `frontier`, exchange `p1` and `p2`
/// on every later gate, and update `layout` to match.
pub fn swap_and_update_gate(
    dag: &mut DAGCircuit,
    layout: &mut Layout,
    cmap: &CouplingMap,
    frontier: usize,
    p1: usize,
    p2: usize,
) -> Result<NodeId> {
    require_adjacent(cmap, p1, p2)?;
    let id = dag.insert_at(frontier, Gate::swap(p1, p2), SWAP_AND_UPDATE)?;
    dag.relabel_from(frontier + 1, p1, p2, SWAP_AND_UPDATE)?;
    layout.swap_physical(p1, p2)?;
    Ok(id)
}

/// One SWAP per consecutive pair of `path`, inserted at `frontier` with a
/// single relabeling pass over the suffix. Same result as folding
/// [`swap_and_update_gate`] along the path.
pub fn swap_along_path(
    dag: &mut DAGCircuit,
    layout: &mut Layout,
    cmap: &CouplingMap,
    frontier: usize,
    path: &[usize],
) -> Result<usize> {
    for w in path.windows(2) {
        require_adjacent(cmap, w[0], w[1])?;
    }
    let n = path.len().saturating_sub(1);
    let mut perm: Vec<usize> = (0..dag.qreg()).collect();
    for (i, w) in path.windows(2).enumerate() {
        dag.insert_at(frontier + i, Gate::swap(w[0], w[1]), SWAP_ALONG_PATH)?;
        layout.swap_physical(w[0], w[1])?;
        for p in perm.iter_mut() {
            if *p == w[0] {
                *p = w[1];
            } else if *p == w[1] {
                *p = w[0];
            }
        }
    }
    if n > 0 {
        dag.permute_from(frontier + n, &perm, SWAP_ALONG_PATH)?;
    }
    Ok(n)
}

/// Remove the SWAP at order index `position` together with the next gate on
/// its wires, which must be the same SWAP.
pub fn cancel_swap(dag: &mut DAGCircuit, position: usize) -> Result<()> {
    let id = *dag
        .op_nodes()
        .get(position)
        .ok_or_else(|| Error::Precondition(format!("no gate at position {position}")))?;
    let g = dag.gate(id).clone();
    if g.kind != GateKind::Swap || g.is_conditioned() {
        return Err(Error::Precondition(format!("gate at position {position} is not a plain swap")));
    }
    let (a, b) = (g.operands()[0], g.operands()[1]);
    let next = dag.next_on_wire(id, a);
    match next {
        Some(n) if dag.next_on_wire(id, b) == Some(n) && same_swap(dag.gate(n), &g) => {
            dag.remove(id, CANCEL_SWAP)?;
            dag.remove(n, CANCEL_SWAP)?;
            Ok(())
        }
        _ => Err(Error::Precondition(format!(
            "swap at position {position} is not followed by the same swap on both wires"
        ))),
    }
}

fn same_swap(a: &Gate, b: &Gate) -> bool {
    let mut x = a.operands().to_vec();
    let mut y = b.operands().to_vec();
    x.sort_unstable();
    y.sort_unstable();
    b.kind == GateKind::Swap && !b.is_conditioned() && x == y && !a.is_conditioned()
}

/// Append a gate already expressed on physical qubits.
pub fn append_mapped_gate(dag: &mut DAGCircuit, cmap: &CouplingMap, gate: Gate) -> Result<NodeId> {
    let qs = gate.qubits();
    if qs.len() == 2 {
        require_adjacent(cmap, qs[0], qs[1])?;
    }
    dag.append_tagged(gate, APPEND_MAPPED)
}

/// Delete two equal self-inverse gates.
///
/// The caller licenses the move: every gate between them on a shared wire
/// must commute with them (a commutation group provides this).
pub fn cancel_pair(dag: &mut DAGCircuit, a: NodeId, b: NodeId) -> Result<()> {
    let (ga, gb) = (dag.gate(a), dag.gate(b));
    if !ga.kind.is_self_inverse() || ga.kind != gb.kind || ga.operands() != gb.operands() {
        return Err(Error::Precondition(format!("{ga} and {gb} are not an inverse pair")));
    }
    dag.remove(a, CANCEL_PAIR)?;
    dag.remove(b, CANCEL_PAIR)?;
    Ok(())
}

fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = a.rem_euclid(t);
    if r > std::f64::consts::PI {
        r - t
    } else {
        r
    }
}

/// True if `a` is a multiple of `2 pi` within `tol`.
pub fn is_full_turn(a: f64, tol: f64) -> bool {
    wrap_angle(a).abs() <= tol
}

/// Fuse `u1` gates on one wire into the first of them; an angle sum that is
/// a full turn deletes them all. Same licensing rule as [`cancel_pair`].
pub fn merge_u1(dag: &mut DAGCircuit, ids: &[NodeId]) -> Result<Option<NodeId>> {
    let Some((&first, rest)) = ids.split_first() else {
        return Ok(None);
    };
    let q = dag.gate(first).operands()[0];
    let mut total = 0.0;
    for &id in ids {
        let g = dag.gate(id);
        match g.kind {
            GateKind::U1(l) if g.operands() == [q] => total += l,
            _ => return Err(Error::Precondition(format!("{g} is not a u1 on qubit {q}"))),
        }
    }
    for &id in rest {
        dag.remove(id, MERGE_U1)?;
    }
    if is_full_turn(total, TOL) {
        dag.remove(first, MERGE_U1)?;
        return Ok(None);
    }
    let merged = dag.gate(first).with_kind(GateKind::U1(wrap_angle(total)))?;
    dag.replace(first, merged, MERGE_U1)?;
    Ok(Some(first))
}

/// Replace a run of consecutive single-qubit gates on one wire by `gate`
/// (or by nothing). The replacement must equal the run up to phase;
/// conditions on the run are not consulted.
pub fn replace_1q_run(dag: &mut DAGCircuit, run: &[NodeId], gate: Option<Gate>, conv: Convention) -> Result<Option<NodeId>> {
    let Some(&first) = run.first() else {
        return Err(Error::Precondition("empty run".into()));
    };
    let q = dag.gate(first).operands()[0];
    for w in run.windows(2) {
        if dag.gate(w[1]).operands() != [q] || !dag.wire(q).windows(2).any(|p| p == w) {
            return Err(Error::Precondition("run is not consecutive on one wire".into()));
        }
    }
    let kinds: Vec<Gate> = run
        .iter()
        .map(|&id| Gate::new(dag.gate(id).kind, vec![0]))
        .collect::<Result<_>>()?;
    let target = denote_gates(1, &kinds, conv)?;
    let replacement = match &gate {
        Some(g) => denote_gates(1, &[Gate::new(g.kind, vec![0])?], conv)?,
        None => denote_gates(1, &[], conv)?,
    };
    if !phase_equal(&target, &replacement, 1e-8) {
        return Err(Error::Precondition("replacement differs from the run".into()));
    }
    for &id in &run[1..] {
        dag.remove(id, REPLACE_1Q_RUN)?;
    }
    match gate {
        Some(g) => {
            if g.operands() != [q] {
                return Err(Error::Precondition(format!("replacement must act on qubit {q}")));
            }
            dag.replace(first, g, REPLACE_1Q_RUN)?;
            Ok(Some(first))
        }
        None => {
            dag.remove(first, REPLACE_1Q_RUN)?;
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::QuantumCircuit;
    use crate::passes::mapped::oracle_equal;
    use crate::semantics::EqualityMode;

    fn dag(n: usize, gates: Vec<Gate>) -> DAGCircuit {
        DAGCircuit::from_circuit(&QuantumCircuit::from_gates(n, gates).unwrap())
    }

    #[test]
    fn swap_and_update_on_chain() {
        let cmap = CouplingMap::line(3);
        let mut d = dag(3, vec![Gate::cx(0, 2)]);
        let mut l = Layout::trivial(3);
        swap_and_update_gate(&mut d, &mut l, &cmap, 0, 0, 1).unwrap();
        assert_eq!(d.to_circuit().gates(), &[Gate::swap(0, 1), Gate::cx(1, 2)]);
        assert_eq!(l.v2p_slice(), &[1, 0, 2]);
        assert!(swap_and_update_gate(&mut d, &mut l, &cmap, 0, 0, 2).is_err());
    }

    #[test]
    fn twice_restores_layout_and_cancels() {
        let cmap = CouplingMap::line(2);
        let mut d = dag(2, vec![Gate::x(0)]);
        let mut l = Layout::trivial(2);
        swap_and_update_gate(&mut d, &mut l, &cmap, 0, 0, 1).unwrap();
        swap_and_update_gate(&mut d, &mut l, &cmap, 1, 0, 1).unwrap();
        assert_eq!(l, Layout::trivial(2));
        cancel_swap(&mut d, 0).unwrap();
        assert_eq!(d.to_circuit().gates(), &[Gate::x(0)]);
        assert!(edits_are_primitive(&d));
    }

    #[test]
    fn cancel_swap_needs_wire_adjacency() {
        let mut d = dag(3, vec![Gate::swap(0, 1), Gate::x(2), Gate::swap(0, 1)]);
        cancel_swap(&mut d, 0).unwrap();
        assert_eq!(d.to_circuit().gates(), &[Gate::x(2)]);
        let mut d = dag(3, vec![Gate::swap(0, 1), Gate::x(0), Gate::swap(0, 1)]);
        assert!(cancel_swap(&mut d, 0).is_err());
    }

    #[test]
    fn path_swaps_match_fold() {
        let cmap = CouplingMap::line(4);
        let c = QuantumCircuit::from_gates(4, vec![Gate::h(0), Gate::cx(0, 3), Gate::t(2)]).unwrap();
        let (mut a, mut la) = (DAGCircuit::from_circuit(&c), Layout::trivial(4));
        let (mut b, mut lb) = (DAGCircuit::from_circuit(&c), Layout::trivial(4));
        swap_along_path(&mut a, &mut la, &cmap, 1, &[0, 1, 2]).unwrap();
        swap_and_update_gate(&mut b, &mut lb, &cmap, 1, 0, 1).unwrap();
        swap_and_update_gate(&mut b, &mut lb, &cmap, 2, 1, 2).unwrap();
        assert_eq!(a.to_circuit(), b.to_circuit());
        assert_eq!(la, lb);
        assert_eq!(swap_along_path(&mut a, &mut la, &cmap, 0, &[3]).unwrap(), 0);
    }

    #[test]
    fn swap_and_update_preserves_placed_semantics() {
        let mut r = crate::gen::rng(5);
        let cmap = CouplingMap::line(3);
        for _ in 0..20 {
            let c = crate::gen::random_circuit(&mut r, 3, 6, &crate::gen::GateSet::clifford_t());
            let mut d = DAGCircuit::from_circuit(&c);
            let mut l = Layout::trivial(3);
            swap_and_update_gate(&mut d, &mut l, &cmap, 2.min(c.len()), 1, 2).unwrap();
            let m = crate::passes::MappedCircuit::new(d, Layout::trivial(3), l).unwrap();
            assert!(m.equivalent_to(&c, Convention::Diagram, EqualityMode::Exact, TOL).unwrap());
        }
    }

    #[test]
    fn merge_u1_sums_and_drops_full_turns() {
        let mut d = dag(1, vec![Gate::u1(1.0, 0), Gate::u1(2.0, 0)]);
        let ids = d.op_nodes().to_vec();
        merge_u1(&mut d, &ids).unwrap();
        assert_eq!(d.to_circuit().gates(), &[Gate::u1(3.0, 0)]);
        let mut d = dag(1, vec![Gate::u1(3.0, 0), Gate::u1(std::f64::consts::TAU - 3.0, 0)]);
        let ids = d.op_nodes().to_vec();
        assert_eq!(merge_u1(&mut d, &ids).unwrap(), None);
        assert!(d.is_empty());
    }

    #[test]
    fn run_replacement_is_checked() {
        let c = QuantumCircuit::from_gates(1, vec![Gate::h(0), Gate::h(0)]).unwrap();
        let mut d = DAGCircuit::from_circuit(&c);
        let run = d.op_nodes().to_vec();
        assert!(replace_1q_run(&mut d, &run, Some(Gate::x(0)), Convention::Diagram).is_err());
        replace_1q_run(&mut d, &run, None, Convention::Diagram).unwrap();
        assert!(oracle_equal(&c, &d.to_circuit(), Convention::Diagram, EqualityMode::UpToPhase, TOL).unwrap());
    }
}
