//! Executable contracts and the harness that checks them by enumeration
//! and seeded random testing, plus loop-measure checking and
//! counterexample rendering.

mod check;
mod counterexample;
pub mod enumerate;
mod input;
mod monotone;
mod registry;

pub use check::{
    check_contract, minimize, Budget, Cases, Contract, ContractReport, Failure, Obligation, ObligationReport, Verdict,
    Violation,
};
pub use counterexample::{diagram, gate_label, parse_counterexample, render_counterexample, Counterexample};
pub use input::{shrink_circuit, CaseInput};
pub use monotone::{check_monotone, Emit, MonoDirection, Monotone, MonotoneMonitor, MonotoneVerdict, Stall};
pub use registry::Registry;
