//! Finite input domains for exhaustive checks.

use crate::device::CouplingMap;
use crate::ir::{Gate, GateKind, GateName, QuantumCircuit};

/// Every instance of `names` on `qreg` qubits, with each parameter drawn from `angles`.
pub fn gate_alphabet(qreg: usize, names: &[GateName], angles: &[f64]) -> Vec<Gate> {
    let mut out = Vec::new();
    for &name in names {
        let mut operand_sets: Vec<Vec<usize>> = Vec::new();
        match name.arity() {
            1 => operand_sets.extend((0..qreg).map(|q| vec![q])),
            _ => {
                for a in 0..qreg {
                    for b in (0..qreg).filter(|&b| b != a) {
                        operand_sets.push(vec![a, b]);
                    }
                }
            }
        }
        let mut param_sets: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..name.num_params() {
            param_sets = param_sets
                .into_iter()
                .flat_map(|p| {
                    angles.iter().map(move |&a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
        }
        for ps in &param_sets {
            let kind = GateKind::from_parts(name, ps).expect("parameter count matches");
            for ops in &operand_sets {
                out.push(Gate::new(kind.clone(), ops.clone()).expect("distinct in-range operands"));
            }
        }
    }
    out
}

/// All gate sequences over `alphabet` of length `0..=max_len`, shortest first.
pub fn all_circuits(qreg: usize, max_len: usize, alphabet: Vec<Gate>) -> impl Iterator<Item = QuantumCircuit> {
    let k = alphabet.len();
    (0..=max_len).flat_map(move |len| {
        let alphabet = alphabet.clone();
        let total = if len == 0 { 1 } else { k.checked_pow(len as u32).unwrap_or(usize::MAX) };
        (0..total).map(move |mut idx| {
            let mut gates = Vec::with_capacity(len);
            for _ in 0..len {
                gates.push(alphabet[idx % k].clone());
                idx /= k;
            }
            QuantumCircuit::from_gates(qreg, gates).expect("alphabet fits the register")
        })
    })
}

/// Every connected labelled simple graph on `n` nodes.
pub fn connected_graphs(n: usize) -> Vec<CouplingMap> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    assert!(pairs.len() < 32, "too many graphs to enumerate");
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let m = CouplingMap::new(n, edges).expect("valid edges");
            m.is_connected().then_some(m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_graph_counts() {
        // Known counts of connected labelled graphs.
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn circuit_enumeration_size() {
        let alpha = gate_alphabet(2, &[GateName::X, GateName::CX], &[]);
        assert_eq!(alpha.len(), 4);
        assert_eq!(all_circuits(2, 3, alpha).count(), 1 + 4 + 16 + 64);
    }

    #[test]
    fn parameterized_alphabet() {
        assert_eq!(gate_alphabet(1, &[GateName::U2], &[0.0, 1.0, 2.0]).len(), 9);
    }
}
