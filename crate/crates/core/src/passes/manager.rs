//! Pass trait, the built-in passes and the contract-checking pass manager.

use std::time::{Duration, Instant};

use super::blocks::collect_2q_blocks;
use super::commutation::{commutation_analysis, commutative_cancellation, CancelConfig, CancelLog, CommutationSet, Grouping};
use super::mapped::{coupling_compliant, oracle_equal, MappedCircuit};
use super::optimize::{optimize_1q_gates, Optimize1qConfig};
use super::primitives::edits_are_primitive;
use super::routing::{basic_swap, lookahead_swap, LookaheadConfig, RoutingOutcome, BASIC_SWAP_MEASURE, LOOKAHEAD_MEASURE};
use crate::contracts::{Counterexample, Monotone};
use crate::device::{CouplingMap, Layout};
use crate::error::{Error, Result};
use crate::ir::{DAGCircuit, NodeId, QuantumCircuit};
use crate::semantics::{Convention, EqualityMode, ORACLE_CAP, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassKind {
    Analysis,
    Transformation,
    /// A transformation that also places the circuit on the device.
    Routing,
}

/// Everything a pass may read or write.
#[derive(Debug, Clone)]
pub struct PassState {
    pub dag: DAGCircuit,
    pub cmap: Option<CouplingMap>,
    pub convention: Convention,
    /// Set once a routing pass has run.
    pub layouts: Option<(Layout, Layout)>,
    pub commutation: Option<CommutationSet>,
    pub blocks: Option<Vec<Vec<NodeId>>>,
    pub cancel_log: Option<CancelLog>,
}

impl PassState {
    pub fn new(dag: DAGCircuit, cmap: Option<CouplingMap>, convention: Convention) -> PassState {
        PassState {
            dag,
            cmap,
            convention,
            layouts: None,
            commutation: None,
            blocks: None,
            cancel_log: None,
        }
    }

    fn cmap_for(&self, pass: &str) -> Result<CouplingMap> {
        self.cmap.clone().ok_or_else(|| Error::MissingAnalysis {
            pass: pass.into(),
            missing: "a coupling map".into(),
        })
    }

    fn route(&mut self, pass: &str, m: MappedCircuit) -> Result<()> {
        if self.layouts.is_some() {
            return Err(Error::Precondition(format!("{pass}: circuit is already routed")));
        }
        self.layouts = Some((m.initial_layout, m.final_layout));
        self.dag = m.dag;
        Ok(())
    }

    /// Current circuit with its layouts (trivial if never routed).
    pub fn mapped(&self) -> MappedCircuit {
        let (i, f) = self
            .layouts
            .clone()
            .unwrap_or_else(|| (Layout::trivial(self.dag.qreg()), Layout::trivial(self.dag.qreg())));
        MappedCircuit {
            dag: self.dag.clone(),
            initial_layout: i,
            final_layout: f,
        }
    }
}

pub trait TranspilerPass {
    fn name(&self) -> &str;
    fn kind(&self) -> PassKind;
    fn run(&self, state: &mut PassState) -> Result<()>;

    /// Equality the pass promises between its input and output.
    fn phase_mode(&self) -> EqualityMode {
        EqualityMode::Exact
    }

    /// Measure the pass's main loop decreases or increases.
    fn monotone(&self) -> Option<Monotone> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CommutationAnalysis {
    pub grouping: Grouping,
}

impl TranspilerPass for CommutationAnalysis {
    fn name(&self) -> &str {
        "commutation_analysis"
    }
    fn kind(&self) -> PassKind {
        PassKind::Analysis
    }
    fn run(&self, st: &mut PassState) -> Result<()> {
        st.commutation = Some(commutation_analysis(&st.dag, self.grouping));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CommutativeCancellation {
    pub config: CancelConfig,
}

impl TranspilerPass for CommutativeCancellation {
    fn name(&self) -> &str {
        "commutative_cancellation"
    }
    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }
    fn run(&self, st: &mut PassState) -> Result<()> {
        let set = match st.commutation.take() {
            Some(s) if s.matches(&st.dag) => s,
            _ => {
                return Err(Error::MissingAnalysis {
                    pass: self.name().into(),
                    missing: "commutation_analysis".into(),
                })
            }
        };
        st.cancel_log = Some(commutative_cancellation(&mut st.dag, &set, self.config)?);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Collect2qBlocks;

impl TranspilerPass for Collect2qBlocks {
    fn name(&self) -> &str {
        "collect_2q_blocks"
    }
    fn kind(&self) -> PassKind {
        PassKind::Analysis
    }
    fn run(&self, st: &mut PassState) -> Result<()> {
        st.blocks = Some(collect_2q_blocks(&st.dag));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Optimize1q {
    pub merge_conditioned: bool,
}

impl TranspilerPass for Optimize1q {
    fn name(&self) -> &str {
        "optimize_1q_gates"
    }
    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }
    fn phase_mode(&self) -> EqualityMode {
        EqualityMode::UpToPhase
    }
    fn run(&self, st: &mut PassState) -> Result<()> {
        let cfg = Optimize1qConfig {
            convention: st.convention,
            merge_conditioned: self.merge_conditioned,
        };
        optimize_1q_gates(&mut st.dag, cfg).map(|_| ())
    }
}

#[derive(Debug, Clone, Default)]
pub struct BasicSwap {
    pub layout: Option<Layout>,
}

impl TranspilerPass for BasicSwap {
    fn name(&self) -> &str {
        "basic_swap"
    }
    fn kind(&self) -> PassKind {
        PassKind::Routing
    }
    fn monotone(&self) -> Option<Monotone> {
        Some(Monotone::decreasing(BASIC_SWAP_MEASURE).with_bound(0))
    }
    fn run(&self, st: &mut PassState) -> Result<()> {
        let cmap = st.cmap_for(self.name())?;
        let m = basic_swap(&st.dag, &cmap, self.layout.as_ref())?;
        st.route(self.name(), m)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LookaheadSwap {
    pub layout: Option<Layout>,
    pub config: LookaheadConfig,
}

impl TranspilerPass for LookaheadSwap {
    fn name(&self) -> &str {
        "lookahead_swap"
    }
    fn kind(&self) -> PassKind {
        PassKind::Routing
    }
    fn monotone(&self) -> Option<Monotone> {
        Some(Monotone::increasing(LOOKAHEAD_MEASURE).with_bound(0))
    }
    fn run(&self, st: &mut PassState) -> Result<()> {
        let cmap = st.cmap_for(self.name())?;
        match lookahead_swap(&st.dag, &cmap, self.layout.as_ref(), self.config)? {
            RoutingOutcome::Mapped(m) => st.route(self.name(), m),
            RoutingOutcome::Stalled(s) => Err(Error::StepLimit(s.iteration)),
        }
    }
}

pub const PASS_NAMES: [&str; 6] = [
    "commutation_analysis",
    "commutative_cancellation",
    "collect_2q_blocks",
    "optimize_1q_gates",
    "basic_swap",
    "lookahead_swap",
];

pub fn pass_by_name(name: &str) -> Result<Box<dyn TranspilerPass>> {
    Ok(match name {
        "commutation_analysis" => Box::new(CommutationAnalysis::default()),
        "commutative_cancellation" => Box::new(CommutativeCancellation::default()),
        "collect_2q_blocks" => Box::new(Collect2qBlocks),
        "optimize_1q_gates" => Box::new(Optimize1q::default()),
        "basic_swap" => Box::new(BasicSwap::default()),
        "lookahead_swap" => Box::new(LookaheadSwap::default()),
        other => return Err(Error::UnknownPass(other.to_string())),
    })
}

/// Comma-separated pass names, as given on the command line.
pub fn parse_pipeline(spec: &str) -> Result<Vec<Box<dyn TranspilerPass>>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(pass_by_name)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassReport {
    pub name: String,
    pub gates_in: usize,
    pub gates_out: usize,
    pub swaps: usize,
    pub elapsed: Duration,
}

impl PassReport {
    pub fn line(&self, timings: bool) -> String {
        let time = if timings {
            format!("{}", self.elapsed.as_millis())
        } else {
            "-".to_string()
        };
        format!(
            "PASS {} gates_in={} gates_out={} swaps={} time={time}",
            self.name, self.gates_in, self.gates_out, self.swaps
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManagerOptions {
    pub convention: Convention,
    pub tol: f64,
    /// Assert each pass's postcondition (oracle checks skip registers above the cap).
    pub check_contracts: bool,
}

impl Default for ManagerOptions {
    fn default() -> Self {
        ManagerOptions {
            convention: Convention::Diagram,
            tol: TOL,
            check_contracts: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub state: PassState,
    pub reports: Vec<PassReport>,
    /// Set when a pass broke its contract; later passes did not run.
    pub aborted: Option<Counterexample>,
}

impl PipelineResult {
    pub fn mapped(&self) -> MappedCircuit {
        self.state.mapped()
    }

    pub fn lines(&self, timings: bool) -> Vec<String> {
        self.reports.iter().map(|r| r.line(timings)).collect()
    }
}

fn oracle_fits(c: &QuantumCircuit) -> bool {
    c.qreg() + c.cbits() <= ORACLE_CAP
}

/// Why `pass` broke its contract on `before`, if it did.
fn contract_failure(
    pass: &dyn TranspilerPass,
    before: &PassState,
    after: &PassState,
    opts: &ManagerOptions,
) -> Result<Option<String>> {
    let (cin, cout) = (before.dag.to_circuit(), after.dag.to_circuit());
    match pass.kind() {
        PassKind::Analysis => {
            if before.dag.structural_hash() != after.dag.structural_hash() {
                return Ok(Some("analysis pass changed the dag".into()));
            }
        }
        PassKind::Transformation => {
            if !edits_are_primitive(&after.dag) {
                return Ok(Some("dag edited outside the primitive library".into()));
            }
            if oracle_fits(&cin) && oracle_fits(&cout) && !oracle_equal(&cin, &cout, opts.convention, pass.phase_mode(), opts.tol)? {
                return Ok(Some(format!("output differs from input ({})", pass.phase_mode().as_str())));
            }
        }
        PassKind::Routing => {
            if !edits_are_primitive(&after.dag) {
                return Ok(Some("dag edited outside the primitive library".into()));
            }
            let cmap = after.cmap.as_ref().expect("routing ran with a map");
            if !coupling_compliant(&cout, cmap) {
                return Ok(Some("output violates the coupling map".into()));
            }
            let m = after.mapped();
            if oracle_fits(&cout) && !m.equivalent_to(&cin, opts.convention, pass.phase_mode(), opts.tol)? {
                return Ok(Some("routed output is not equivalent to its input".into()));
            }
        }
    }
    Ok(None)
}

/// Run `passes` in order on `input`, asserting each contract in between.
pub fn run_pass_manager(
    passes: &[Box<dyn TranspilerPass>],
    input: &QuantumCircuit,
    cmap: Option<&CouplingMap>,
    opts: ManagerOptions,
) -> Result<PipelineResult> {
    let mut state = PassState::new(DAGCircuit::from_circuit(input), cmap.cloned(), opts.convention);
    let mut reports = Vec::new();
    for pass in passes {
        state.dag.clear_edit_log();
        let before = state.clone();
        let start = Instant::now();
        pass.run(&mut state)?;
        let elapsed = start.elapsed();
        let out = state.dag.to_circuit();
        reports.push(PassReport {
            name: pass.name().to_string(),
            gates_in: before.dag.op_count(),
            gates_out: state.dag.op_count(),
            swaps: out.count_swaps().saturating_sub(before.dag.to_circuit().count_swaps()),
            elapsed,
        });
        if opts.check_contracts {
            if let Some(detail) = contract_failure(pass.as_ref(), &before, &state, &opts)? {
                let mut ce = Counterexample::new(pass.name(), "pre=>post", detail);
                ce.circuit = Some(before.dag.to_circuit());
                ce.coupling = state.cmap.clone();
                return Ok(PipelineResult {
                    state: before,
                    reports,
                    aborted: Some(ce),
                });
            }
        }
    }
    Ok(PipelineResult {
        state,
        reports,
        aborted: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Gate;

    fn ghz() -> QuantumCircuit {
        QuantumCircuit::from_gates(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(0, 2)]).unwrap()
    }

    #[test]
    fn commutation_route_optimize_on_ghz() {
        let passes = parse_pipeline("commutation_analysis,commutative_cancellation,basic_swap,optimize_1q_gates").unwrap();
        let cmap = CouplingMap::line(3);
        let r = run_pass_manager(&passes, &ghz(), Some(&cmap), ManagerOptions::default()).unwrap();
        assert!(r.aborted.is_none());
        let m = r.mapped();
        assert!(m.is_coupling_compliant(&cmap));
        assert!(m.equivalent_to(&ghz(), Convention::Diagram, EqualityMode::Exact, TOL).unwrap());
        assert_eq!(r.lines(false)[2], "PASS basic_swap gates_in=3 gates_out=4 swaps=1 time=-");
    }

    #[test]
    fn empty_pipeline_is_identity() {
        let r = run_pass_manager(&[], &ghz(), None, ManagerOptions::default()).unwrap();
        assert_eq!(r.state.dag.to_circuit(), ghz());
        assert!(r.reports.is_empty());
    }

    #[test]
    fn cancellation_needs_analysis() {
        let passes = parse_pipeline("commutative_cancellation").unwrap();
        let e = run_pass_manager(&passes, &ghz(), None, ManagerOptions::default()).unwrap_err();
        assert!(matches!(e, Error::MissingAnalysis { .. }));
        assert!(matches!(pass_by_name("noise_adaptive_swap"), Err(Error::UnknownPass(_))));
    }

    #[test]
    fn force_merging_optimizer_aborts() {
        let c = QuantumCircuit::from_parts(
            1,
            1,
            vec![Gate::u1(0.5, 0), Gate::u3(0.3, 0.0, 0.0, 0).with_c_if(1), Gate::u1(0.2, 0)],
        )
        .unwrap();
        let passes: Vec<Box<dyn TranspilerPass>> = vec![Box::new(Optimize1q { merge_conditioned: true })];
        let r = run_pass_manager(&passes, &c, None, ManagerOptions::default()).unwrap();
        let ce = r.aborted.expect("contract violation");
        assert_eq!(ce.op, "optimize_1q_gates");
        assert_eq!(ce.circuit.unwrap(), c);
    }
}
