//! Quantum circuit transpilation from certified primitives.
//!
//! The crate is layered bottom-up:
//!
//! - [`ir`]: gates, gate lists and the DAG view.
//! - [`qasm`]: reader and writer for the OpenQASM subset.
//! - [`device`]: coupling maps and layouts.
//! - [`semantics`]: the dense unitary oracle and phase-free encodings.
//! - [`calculus`]: certified rewrite rules and the equivalence prover.
//! - [`contracts`]: contract checking, loop measures, counterexamples.
//! - [`passes`]: primitives, transpiler passes and the pass manager.
//! - [`validator`]: per-run translation validation.
//! - [`suite`]: the verification campaigns and their reports.

pub mod calculus;
pub mod contracts;
pub mod device;
pub mod error;
pub mod gen;
pub mod ir;
pub mod passes;
pub mod qasm;
pub mod semantics;
pub mod suite;
pub mod validator;

pub use error::{Error, Result};
pub use ir::{DAGCircuit, Gate, GateKind, GateName, QuantumCircuit};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0xCE871;
