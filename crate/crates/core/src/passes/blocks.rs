//! Two-qubit block collection (analysis only).

use crate::ir::{DAGCircuit, NodeId};

/// Gates whose support stays inside one qubit pair, consecutive on both
/// wires. Found by one greedy walk in topological order: single-qubit
/// blocks grow into pair blocks, and measurements, conditioned gates or a
/// gate leaving the pair close the blocks they touch.
pub fn collect_2q_blocks(dag: &DAGCircuit) -> Vec<Vec<NodeId>> {
    struct Block {
        support: Vec<usize>,
        gates: Vec<NodeId>,
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut open: Vec<Option<usize>> = vec![None; dag.qreg()];
    let close = |open: &mut Vec<Option<usize>>, blocks: &[Block], b: usize| {
        for &q in &blocks[b].support {
            if open[q] == Some(b) {
                open[q] = None;
            }
        }
    };
    for id in dag.topological_op_nodes() {
        let g = dag.gate(id);
        let qs = g.qubits();
        if g.is_conditioned() || !g.kind.is_unitary() || qs.len() > 2 {
            for &q in &qs {
                if let Some(b) = open[q] {
                    close(&mut open, &blocks, b);
                }
            }
            continue;
        }
        match qs[..] {
            [q] => match open[q] {
                Some(b) => blocks[b].gates.push(id),
                None => {
                    open[q] = Some(blocks.len());
                    blocks.push(Block {
                        support: vec![q],
                        gates: vec![id],
                    });
                }
            },
            [a, b] => {
                let (ba, bb) = (open[a], open[b]);
                let single = |x: Option<usize>| x.is_none_or(|i| blocks[i].support.len() == 1);
                if ba.is_some() && ba == bb {
                    blocks[ba.expect("open")].gates.push(id);
                } else if single(ba) && single(bb) {
                    let target = match (ba, bb) {
                        (Some(i), Some(j)) => {
                            let moved = std::mem::take(&mut blocks[j].gates);
                            blocks[i].gates.extend(moved);
                            blocks[j].support.clear();
                            i
                        }
                        (Some(i), None) | (None, Some(i)) => i,
                        (None, None) => {
                            blocks.push(Block {
                                support: Vec::new(),
                                gates: Vec::new(),
                            });
                            blocks.len() - 1
                        }
                    };
                    blocks[target].support = vec![a.min(b), a.max(b)];
                    blocks[target].gates.push(id);
                    open[a] = Some(target);
                    open[b] = Some(target);
                } else {
                    for x in [ba, bb].into_iter().flatten() {
                        close(&mut open, &blocks, x);
                    }
                    open[a] = Some(blocks.len());
                    open[b] = Some(blocks.len());
                    blocks.push(Block {
                        support: vec![a.min(b), a.max(b)],
                        gates: vec![id],
                    });
                }
            }
            _ => {}
        }
    }
    let mut out: Vec<Vec<NodeId>> = blocks.into_iter().map(|b| b.gates).filter(|g| !g.is_empty()).collect();
    for b in &mut out {
        b.sort_by_key(|&id| dag.position(id));
    }
    out.sort_by_key(|b| dag.position(b[0]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Gate, QuantumCircuit};

    fn blocks(n: usize, gates: Vec<Gate>) -> Vec<usize> {
        let d = DAGCircuit::from_circuit(&QuantumCircuit::from_gates(n, gates).unwrap());
        collect_2q_blocks(&d).iter().map(Vec::len).collect()
    }

    #[test]
    fn pair_with_inner_phase_is_one_block() {
        assert_eq!(blocks(2, vec![Gate::cx(0, 1), Gate::u1(0.0, 0), Gate::cx(0, 1)]), vec![3]);
    }

    #[test]
    fn different_pairs_split() {
        assert_eq!(blocks(3, vec![Gate::cx(0, 1), Gate::cx(1, 2)]), vec![1, 1]);
        assert!(blocks(1, vec![]).is_empty());
    }

    #[test]
    fn single_qubit_blocks_upgrade() {
        assert_eq!(blocks(2, vec![Gate::h(0), Gate::x(1), Gate::cx(0, 1), Gate::t(1)]), vec![4]);
        assert_eq!(blocks(2, vec![Gate::h(0), Gate::measz(0), Gate::x(0)]), vec![1, 1]);
    }
}
