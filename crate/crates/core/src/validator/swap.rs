use super::{Move, Residual, Status, ValidationVerdict};
use crate::device::{CouplingMap, Layout};
use crate::error::{Error, Result};
use crate::ir::{DAGCircuit, GateKind, QuantumCircuit};
use crate::passes::primitives::{cancel_swap, swap_and_update_gate};
use crate::passes::MappedCircuit;

fn complete_map(n: usize) -> CouplingMap {
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    CouplingMap::new(n, edges).expect("complete graph")
}

fn plain_swap(c: &QuantumCircuit, i: usize) -> Option<(usize, usize)> {
    let g = &c.gates()[i];
    (g.kind == GateKind::Swap && !g.is_conditioned()).then(|| (g.operands()[0], g.operands()[1]))
}

struct Walk {
    circuit: QuantumCircuit,
    layout: Layout,
    leftover: bool,
}

/// Phase 1 puts a relabelling SWAP behind every SWAP; phase 2 cancels
/// SWAP pairs to a fixpoint. `layout` is tracked through phase 1.
fn walk(mut dag: DAGCircuit, mut layout: Layout, trace: &mut Vec<Move>, input_side: bool) -> Result<Walk> {
    let cmap = complete_map(dag.qreg());
    let mut i = 0;
    while i < dag.op_count() {
        if let Some((p1, p2)) = plain_swap(&dag.to_circuit(), i) {
            swap_and_update_gate(&mut dag, &mut layout, &cmap, i + 1, p1, p2)?;
            trace.push(if input_side {
                Move::AbsorbInputSwap { position: i }
            } else {
                Move::SwapAndUpdate { position: i + 1, p1, p2 }
            });
            i += 1;
        }
        i += 1;
    }
    loop {
        let c = dag.to_circuit();
        let hit = (0..c.len()).find(|&i| plain_swap(&c, i).is_some() && cancel_swap(&mut dag, i).is_ok());
        match hit {
            Some(position) if !input_side => trace.push(Move::CancelSwap { position }),
            Some(_) => {}
            None => break,
        }
    }
    let circuit = dag.to_circuit();
    let leftover = (0..circuit.len()).any(|i| plain_swap(&circuit, i).is_some());
    Ok(Walk { circuit, layout, leftover })
}

/// Undo a routing pass: walk the output back from its final layout, read the
/// swap-free result through the initial layout, and compare it with the
/// input walked the same way (which only matters if the input has SWAPs of
/// its own). VALID iff the gate lists agree (up to reordering disjoint
/// gates) and both walks end in the same permutation of the input qubits.
pub fn validate_swap_insertion(input: &QuantumCircuit, output: &MappedCircuit) -> Result<ValidationVerdict> {
    let n = output.dag.qreg();
    let init = &output.initial_layout;
    if input.qreg() > init.num_virtual() || init.num_physical() != n || output.final_layout.num_physical() != n {
        return Err(Error::DimensionMismatch(input.qreg(), init.num_virtual()));
    }
    let mut trace = Vec::new();
    let reference = walk(DAGCircuit::from_circuit(input), Layout::trivial(input.qreg()), &mut trace, true)?;
    let out = walk(output.dag.clone(), output.final_layout.clone(), &mut trace, false)?;
    let leftover = out.leftover || reference.leftover;

    let unplaced: Option<Vec<_>> = out
        .circuit
        .gates()
        .iter()
        .map(|g| {
            let mut ok = true;
            let v = g.map_qubits(|p| match init.p2v(p) {
                Some(v) if v < input.qreg() => v,
                _ => {
                    ok = false;
                    0
                }
            });
            ok.then_some(v)
        })
        .collect();
    trace.push(Move::Unplace);
    let expected = &reference.circuit;
    let Some(gates) = unplaced else {
        let r = Residual::new("a gate acts on an ancilla qubit", expected.gates(), out.circuit.gates());
        let status = if leftover { Status::Inconclusive } else { Status::Invalid };
        return Ok(ValidationVerdict::with(status, trace, r));
    };
    let back = QuantumCircuit::from_parts(input.qreg(), input.cbits().max(out.circuit.cbits()), gates)?;
    let same = back.gates() == expected.gates() || back.dag_equivalent(expected);
    let permuted_alike =
        (0..input.qreg()).all(|v| init.p2v(out.layout.v2p(v)) == Some(reference.layout.v2p(v)));
    if same && permuted_alike && !leftover {
        return Ok(ValidationVerdict::valid(trace));
    }
    let (status, reason) = if leftover {
        (Status::Inconclusive, "swaps remain after cancellation")
    } else if !same {
        (Status::Invalid, "walked-back circuit differs from the input")
    } else {
        (Status::Invalid, "tracked layout disagrees with the declared final layout")
    };
    Ok(ValidationVerdict::with(status, trace, Residual::new(reason, expected.gates(), back.gates())))
}
