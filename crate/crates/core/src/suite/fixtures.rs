//! Named circuits the campaigns and the CLI share.

use crate::device::CouplingMap;
use crate::ir::{Gate, QuantumCircuit};

pub fn ghz(n: usize) -> QuantumCircuit {
    let mut gates = vec![Gate::h(0)];
    gates.extend((1..n).map(|q| Gate::cx(q - 1, q)));
    QuantumCircuit::from_gates(n, gates).expect("ghz fits")
}

/// Four CNOTs that send lookahead routing on the 16-qubit ladder into a cycle.
pub fn ladder_stall() -> QuantumCircuit {
    QuantumCircuit::from_gates(16, vec![Gate::cx(0, 8), Gate::cx(7, 14), Gate::cx(8, 7), Gate::cx(0, 14)])
        .expect("ladder circuit fits")
}

pub fn ladder_map() -> CouplingMap {
    CouplingMap::ibmqx5()
}

/// Two CNOT pairs around a Z pair, inside an outer CNOT sandwich.
pub fn crossed_cx() -> QuantumCircuit {
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
    .expect("crossed circuit fits")
}

/// What cancellation should leave of [`crossed_cx`].
pub fn crossed_cx_reduced() -> QuantumCircuit {
    QuantumCircuit::from_gates(2, vec![Gate::cx(1, 0), Gate::x(1), Gate::cx(1, 0)]).expect("fits")
}

/// The three device shapes the routing campaigns run on.
pub fn routing_maps() -> Vec<(&'static str, CouplingMap)> {
    vec![
        ("chain", CouplingMap::line(6)),
        ("ring", CouplingMap::ring(6)),
        ("grid", CouplingMap::grid(2, 3)),
    ]
}
