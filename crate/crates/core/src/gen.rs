//! Seeded random generators for circuits, devices and layouts.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::device::{CouplingMap, Layout};
use crate::ir::{Gate, GateName, QuantumCircuit};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gate names a generator may draw from.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSet {
    pub names: Vec<GateName>,
}

impl GateSet {
    pub fn new(names: &[GateName]) -> GateSet {
        GateSet { names: names.to_vec() }
    }

    /// Every unitary gate.
    pub fn unitary() -> GateSet {
        GateSet::new(&GateName::ALL.iter().copied().filter(|g| !g.is_measurement()).collect::<Vec<_>>())
    }

    pub fn clifford_t() -> GateSet {
        use GateName::*;
        GateSet::new(&[H, X, Y, Z, T, CX, CZ])
    }

    /// The gates the commutation analysis treats as mutually safe.
    pub fn commutation_safe() -> GateSet {
        use GateName::*;
        GateSet::new(&[CX, X, Z, H, T, U1, U2, U3])
    }

    pub fn single_qubit_u() -> GateSet {
        use GateName::*;
        GateSet::new(&[U1, U2, U3])
    }
}

/// An angle: a multiple of pi/4 half the time, otherwise uniform in [-pi, pi).
pub fn angle(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(-4i32..=4) as f64 * PI / 4.0
    } else {
        rng.gen_range(-PI..PI)
    }
}

pub fn random_gate(rng: &mut ChaCha8Rng, qreg: usize, set: &GateSet) -> Gate {
    let candidates: Vec<GateName> = set.names.iter().copied().filter(|g| g.arity() <= qreg).collect();
    let name = *candidates.choose(rng).expect("gate set has a gate that fits the register");
    let params: Vec<f64> = (0..name.num_params()).map(|_| angle(rng)).collect();
    let kind = crate::ir::GateKind::from_parts(name, &params).expect("param count matches");
    let ops = if name.arity() == 1 {
        vec![rng.gen_range(0..qreg)]
    } else {
        let mut qs: Vec<usize> = (0..qreg).collect();
        qs.shuffle(rng);
        qs.truncate(2);
        qs
    };
    Gate::new(kind, ops).expect("generated gate is well-formed")
}

pub fn random_circuit(rng: &mut ChaCha8Rng, qreg: usize, gates: usize, set: &GateSet) -> QuantumCircuit {
    let gs = (0..gates).map(|_| random_gate(rng, qreg, set)).collect();
    QuantumCircuit::from_gates(qreg, gs).expect("generated gates fit the register")
}

/// One to `max_qubits` qubits, zero to `max_gates` gates.
pub fn random_small_circuit(rng: &mut ChaCha8Rng, max_qubits: usize, max_gates: usize, set: &GateSet) -> QuantumCircuit {
    let q = rng.gen_range(1..=max_qubits);
    let g = rng.gen_range(0..=max_gates);
    random_circuit(rng, q, g, set)
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_map(rng: &mut ChaCha8Rng, size: usize, extra_edges: usize) -> CouplingMap {
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..size {
        let j = rng.gen_range(0..i);
        edges.push((order[j], order[i]));
    }
    for _ in 0..extra_edges {
        if size < 2 {
            break;
        }
        let a = rng.gen_range(0..size);
        let b = rng.gen_range(0..size);
        if a != b {
            edges.push((a, b));
        }
    }
    CouplingMap::new(size, edges).expect("in-range edges without self loops")
}

/// Random injective placement of `n` virtual qubits onto `physical`.
pub fn random_layout(rng: &mut ChaCha8Rng, n: usize, physical: usize) -> Layout {
    let mut ps: Vec<usize> = (0..physical).collect();
    ps.shuffle(rng);
    ps.truncate(n);
    Layout::from_v2p(ps, physical).expect("distinct physical qubits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let a = random_circuit(&mut rng(7), 3, 10, &GateSet::unitary());
        let b = random_circuit(&mut rng(7), 3, 10, &GateSet::unitary());
        assert_eq!(a, b);
    }

    #[test]
    fn maps_are_connected() {
        let mut r = rng(3);
        for n in 1..9 {
            assert!(random_connected_map(&mut r, n, 2).is_connected());
        }
    }

    #[test]
    fn single_qubit_register_gets_single_qubit_gates() {
        let c = random_circuit(&mut rng(1), 1, 20, &GateSet::unitary());
        assert!(c.gates().iter().all(|g| g.operands().len() == 1));
    }
}
