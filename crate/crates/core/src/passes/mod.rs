//! Transpiler passes built from certified primitives, and the pass manager.
//!
//! Passes change a DAG only through [`primitives`]; the manager checks
//! each pass's contract after it runs.

pub mod blocks;
pub mod commutation;
pub mod manager;
pub mod mapped;
pub mod optimize;
pub mod primitives;
pub mod refine;
pub mod routing;

pub use blocks::collect_2q_blocks;
pub use commutation::{
    commutation_analysis, commutative_cancellation, commutes, is_safe, removed_by, transitivity_counterexample,
    CancelConfig, CancelEvent, CancelLog, CommutationSet, Grouping, SAFE_KINDS,
};
pub use manager::{
    parse_pipeline, pass_by_name, run_pass_manager, BasicSwap, Collect2qBlocks, CommutationAnalysis,
    CommutativeCancellation, LookaheadSwap, ManagerOptions, Optimize1q, PassKind, PassReport, PassState,
    PipelineResult, TranspilerPass, PASS_NAMES,
};
pub use mapped::{coupling_compliant, oracle_equal, place, swap_sequence, MappedCircuit};
pub use optimize::{collect_runs, gate_from_rotation, merge_run, optimize_1q_gates, Optimize1qConfig, RunGuard, U_GATES};
pub use refine::DagRepresentation;
pub use routing::{
    basic_swap, basic_swap_instrumented, lookahead_instrumented, lookahead_swap, routing_layout, LookaheadConfig,
    RoutingOutcome, Scorer, StallReport, BASIC_SWAP_MEASURE, LOOKAHEAD_MEASURE,
};
