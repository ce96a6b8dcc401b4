//! Circuit intermediate representation: gates, gate lists and the DAG view.

mod circuit;
mod dag;
mod gate;

pub use circuit::{canonical_gates, QuantumCircuit};
pub use dag::{circuit_dag_equiv, DAGCircuit, Edit, EditKind, NodeId, WireNode, APPEND};
pub use gate::{ClassicalCondition, Gate, GateKind, GateName};
