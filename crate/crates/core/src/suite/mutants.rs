//! Deliberately broken variants of library primitives, each paired with the
//! check that must catch it.

use rand::Rng;

use super::fixtures::{ladder_map, ladder_stall};
use super::optimize::merge_case;
use super::routing::{layout_swap_contract, routing_cases, routing_contract, shortest_path_contract, simple_layout_contract};
use super::{Context, Section, SuiteConfig};
use crate::contracts::{check_contract, check_monotone, Budget, Cases, Contract, ContractReport, Emit, Monotone, Verdict};
use crate::device::{CouplingMap, Layout};
use crate::error::Result;
use crate::gen;
use crate::ir::{DAGCircuit, Gate, GateKind, QuantumCircuit};
use crate::passes::primitives::replace_1q_run;
use crate::passes::{
    collect_runs, commutation_analysis, commutative_cancellation, lookahead_instrumented, merge_run, oracle_equal,
    CancelConfig, CommutationSet, Grouping, LookaheadConfig, Optimize1qConfig, RunGuard, LOOKAHEAD_MEASURE, U_GATES,
};
use crate::semantics::{u3_from_quat, Convention, EqualityMode};

/// What a detector made of one mutant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    /// `FAIL` or `STALL` when caught, `PASS` when missed.
    pub verdict: &'static str,
    pub detail: String,
}

impl Detection {
    fn from_report<I>(r: &ContractReport<I>) -> Detection {
        let detail = r
            .failure
            .as_ref()
            .map(|f| format!("{} {}", f.violation.obligation, f.violation.detail))
            .unwrap_or_default();
        Detection {
            verdict: r.verdict().as_str(),
            detail,
        }
    }

    pub fn caught(&self) -> bool {
        self.verdict == "FAIL" || self.verdict == "STALL"
    }
}

pub struct Mutant {
    pub name: &'static str,
    /// The library operation the bug is planted in.
    pub target: &'static str,
    pub detector: &'static str,
    pub run: fn(&SuiteConfig) -> Result<Detection>,
}

type Circ = QuantumCircuit;

fn circuit_contract(name: &str, cfg: &SuiteConfig, mode: EqualityMode) -> Contract<Circ, Circ> {
    let (conv, tol) = (cfg.convention, cfg.tol);
    Contract::new(name).post(move |c: &Circ, out: &Circ| oracle_equal(c, out, conv, mode, tol).unwrap_or(false))
}

fn check_circuits(name: &str, cfg: &SuiteConfig, op: &dyn Fn(&Circ) -> Result<Circ>, cases: Vec<Circ>, mode: EqualityMode) -> Detection {
    let contract = circuit_contract(name, cfg, mode);
    Detection::from_report(&check_contract(name, op, &contract, Cases::exhaustive(cases), &Budget::default()))
}

fn layout_swap_p2v_only(_: &SuiteConfig) -> Result<Detection> {
    let op = |(l, a, b): &(Layout, usize, usize)| {
        let mut p2v = l.p2v_slice().to_vec();
        p2v.swap(*a, *b);
        Ok(Layout::from_raw_parts(l.v2p_slice().to_vec(), p2v))
    };
    let cases = vec![(Layout::trivial(2), 0, 1), (Layout::trivial(3), 1, 2)];
    let r = check_contract("layout_swap", &op, &layout_swap_contract(), Cases::exhaustive(cases), &Budget::default());
    Ok(Detection::from_report(&r))
}

fn shortest_path_skips_hops(_: &SuiteConfig) -> Result<Detection> {
    let op = |(_, a, b): &(CouplingMap, usize, usize)| Ok(if a == b { vec![*a] } else { vec![*a, *b] });
    let cases: Vec<_> = (0..3).flat_map(|a| (0..3).map(move |b| (CouplingMap::line(3), a, b))).collect();
    let r = check_contract("shortest_path", &op, &shortest_path_contract(), Cases::exhaustive(cases), &Budget::default());
    Ok(Detection::from_report(&r))
}

fn simple_layout_collides(_: &SuiteConfig) -> Result<Detection> {
    let op = |(n, m): &(usize, CouplingMap)| {
        let mut p2v = vec![None; m.size()];
        p2v[0] = Some(0);
        Ok(Layout::from_raw_parts(vec![0; *n], p2v))
    };
    let cases: Vec<_> = (1..=4).map(|n| (n, CouplingMap::line(4))).collect();
    let r = check_contract("simple_layout", &op, &simple_layout_contract(), Cases::exhaustive(cases), &Budget::default());
    Ok(Detection::from_report(&r))
}

/// Routing loop with a bug in where the path swaps go relative to the gate.
fn route_with(c: &Circ, m: &CouplingMap, swaps_after_gate: bool, relabel: bool) -> Result<crate::passes::MappedCircuit> {
    let init = crate::passes::routing_layout(c.qreg(), m, None)?;
    let mut layout = init.clone();
    let mut out = Vec::new();
    for g in c.gates() {
        let mut swaps = Vec::new();
        let mut next = layout.clone();
        if let [a, b] = *g.qubits() {
            let path = m.shortest_path(next.v2p(a), next.v2p(b))?;
            for w in path[..path.len() - 1].windows(2) {
                swaps.push(Gate::swap(w[0], w[1]));
                if relabel {
                    next.swap_physical(w[0], w[1])?;
                }
            }
        }
        let placed = g.map_qubits(|v| next.v2p(v));
        if swaps_after_gate {
            out.push(placed);
            out.extend(swaps);
        } else {
            out.extend(swaps);
            out.push(placed);
        }
        layout = next;
    }
    let circuit = QuantumCircuit::from_parts(m.size(), c.cbits(), out)?;
    crate::passes::MappedCircuit::new(DAGCircuit::from_circuit(&circuit), init, layout)
}

fn routing_detector(cfg: &SuiteConfig, name: &str, op: &dyn Fn(&(Circ, CouplingMap)) -> Result<crate::passes::MappedCircuit>) -> Detection {
    let map = CouplingMap::line(3);
    let mut cases = vec![(QuantumCircuit::from_gates(3, vec![Gate::cx(0, 2)]).expect("fits"), map.clone())];
    cases.extend(routing_cases(cfg, 0, &CouplingMap::line(6)).into_iter().take(50));
    let contract = routing_contract(name, cfg);
    Detection::from_report(&check_contract(name, op, &contract, Cases::exhaustive(cases), &Budget::default()))
}

fn basic_swap_no_relabel(cfg: &SuiteConfig) -> Result<Detection> {
    Ok(routing_detector(cfg, "basic_swap", &|(c, m)| route_with(c, m, false, false)))
}

fn basic_swap_late_swaps(cfg: &SuiteConfig) -> Result<Detection> {
    Ok(routing_detector(cfg, "basic_swap", &|(c, m)| route_with(c, m, true, true)))
}

fn cancel_swap_through_gate(cfg: &SuiteConfig) -> Result<Detection> {
    let op = |c: &Circ| {
        let mut gates = c.gates().to_vec();
        if let Some(i) = gates.iter().position(|g| g.kind == GateKind::Swap) {
            let g = gates[i].clone();
            if let Some(j) = gates[i + 1..].iter().position(|h| *h == g) {
                gates.remove(i + 1 + j);
                gates.remove(i);
            }
        }
        QuantumCircuit::from_parts(c.qreg(), c.cbits(), gates)
    };
    let cases = vec![
        QuantumCircuit::from_gates(3, vec![Gate::swap(0, 1), Gate::x(2), Gate::swap(0, 1)])?,
        QuantumCircuit::from_gates(3, vec![Gate::swap(0, 1), Gate::x(0), Gate::swap(0, 1)])?,
    ];
    Ok(check_circuits("cancel_swap", cfg, &op, cases, EqualityMode::Exact))
}

fn merge_cases(cfg: &SuiteConfig) -> Vec<Circ> {
    let mut r = gen::rng(cfg.seed_for("mutants"));
    (0..4).map(|i| merge_case(i, &mut r)).collect()
}

fn optimize_merges_conditioned(cfg: &SuiteConfig) -> Result<Detection> {
    let conv = cfg.convention;
    let op = move |c: &Circ| {
        let mut d = DAGCircuit::from_circuit(c);
        let cfg = Optimize1qConfig {
            convention: conv,
            merge_conditioned: true,
        };
        crate::passes::optimize_1q_gates(&mut d, cfg)?;
        Ok(d.to_circuit())
    };
    Ok(check_circuits("optimize_1q_gates", cfg, &op, merge_cases(cfg), EqualityMode::UpToPhase))
}

fn optimize_wrong_order(cfg: &SuiteConfig) -> Result<Detection> {
    let wrong = match cfg.convention {
        Convention::Diagram => Convention::TimeOrdered,
        Convention::TimeOrdered => Convention::Diagram,
    };
    let op = move |c: &Circ| {
        let mut d = DAGCircuit::from_circuit(c);
        let cfg = Optimize1qConfig {
            convention: wrong,
            merge_conditioned: false,
        };
        crate::passes::optimize_1q_gates(&mut d, cfg)?;
        Ok(d.to_circuit())
    };
    let cases = vec![QuantumCircuit::from_gates(1, vec![Gate::u3(0.4, 0.2, -0.3, 0), Gate::u3(1.1, -0.7, 0.5, 0)])?];
    Ok(check_circuits("optimize_1q_gates", cfg, &op, cases, EqualityMode::UpToPhase))
}

/// Fusion that writes `u3(theta, lambda, phi)`; the primitive refuses it.
fn fusion_swaps_angles(cfg: &SuiteConfig) -> Result<Detection> {
    let conv = cfg.convention;
    let op = move |c: &Circ| {
        let mut d = DAGCircuit::from_circuit(c);
        for run in collect_runs(&d, &U_GATES, RunGuard::Unconditioned) {
            if run.len() < 2 {
                continue;
            }
            let kinds: Vec<GateKind> = run.iter().map(|&id| d.gate(id).kind).collect();
            let q = d.gate(run[0]).operands()[0];
            let (t, p, l) = u3_from_quat(&merge_run(&kinds, conv)?)?;
            replace_1q_run(&mut d, &run, Some(Gate::u3(t, l, p, q)), conv)?;
        }
        Ok(d.to_circuit())
    };
    let cases = vec![QuantumCircuit::from_gates(1, vec![Gate::u1(0.7, 0), Gate::u3(0.4, 0.2, -0.3, 0)])?];
    Ok(check_circuits("optimize_1q_gates", cfg, &op, cases, EqualityMode::UpToPhase))
}

fn chain_witness() -> Result<Circ> {
    QuantumCircuit::from_gates(1, vec![Gate::h(0), Gate::u1(0.0, 0), Gate::z(0), Gate::u1(0.0, 0), Gate::h(0)])
}

fn cancellation_chain_grouping(cfg: &SuiteConfig) -> Result<Detection> {
    let op = |c: &Circ| {
        let mut d = DAGCircuit::from_circuit(c);
        let set = commutation_analysis(&d, Grouping::Chain);
        commutative_cancellation(&mut d, &set, CancelConfig::default())?;
        Ok(d.to_circuit())
    };
    Ok(check_circuits("commutative_cancellation", cfg, &op, vec![chain_witness()?], EqualityMode::Exact))
}

/// One group per wire regardless of conditions, and no cancellation guard.
fn cancellation_ignores_conditions(cfg: &SuiteConfig) -> Result<Detection> {
    let op = |c: &Circ| {
        let mut d = DAGCircuit::from_circuit(c);
        let groups = (0..d.qreg()).map(|q| vec![d.wire(q).to_vec()]).collect();
        let set = CommutationSet::from_groups(&d, groups)?;
        commutative_cancellation(&mut d, &set, CancelConfig { guard_conditioned: false })?;
        Ok(d.to_circuit())
    };
    let cases = vec![QuantumCircuit::from_parts(1, 1, vec![Gate::z(0), Gate::z(0).with_c_if(1)])?];
    Ok(check_circuits("commutative_cancellation", cfg, &op, cases, EqualityMode::Exact))
}

fn lookahead_stock(_: &SuiteConfig) -> Result<Detection> {
    let map = ladder_map();
    let runner = |c: &Circ, emit: &mut Emit<'_>| {
        lookahead_instrumented(&DAGCircuit::from_circuit(c), &map, None, LookaheadConfig::default(), emit).map(|_| ())
    };
    let v = check_monotone("lookahead_swap", &runner, &Monotone::increasing(LOOKAHEAD_MEASURE), [ladder_stall()])?;
    let detail = match &v {
        crate::contracts::MonotoneVerdict::Stall { stall, .. } => format!("iteration {}", stall.iteration),
        crate::contracts::MonotoneVerdict::Pass { .. } => String::new(),
    };
    Ok(Detection {
        verdict: v.label(),
        detail,
    })
}

/// Measure emitted once per inserted SWAP instead of once per routed gate.
fn basic_swap_per_swap_measure(cfg: &SuiteConfig) -> Result<Detection> {
    let runner = |(c, m): &(Circ, CouplingMap), emit: &mut Emit<'_>| {
        let layout = crate::passes::routing_layout(c.qreg(), m, None)?;
        let mut remaining = c.len() as i64;
        for g in c.gates() {
            if emit(remaining).is_break() {
                return Ok(());
            }
            if let [a, b] = *g.qubits() {
                let d = m.distance(layout.v2p(a), layout.v2p(b))?;
                for _ in 1..d {
                    if emit(remaining).is_break() {
                        return Ok(());
                    }
                }
            }
            remaining -= 1;
        }
        let _ = emit(remaining);
        Ok(())
    };
    let mut r = gen::rng(cfg.seed_for("per-swap"));
    let m = CouplingMap::line(5);
    let mut cases = vec![(QuantumCircuit::from_gates(3, vec![Gate::cx(0, 2)])?, CouplingMap::line(3))];
    cases.extend((0..20).map(|_| {
        let a = r.gen_range(0..2usize);
        (QuantumCircuit::from_gates(5, vec![Gate::cx(a, 4 - a)]).expect("fits"), m.clone())
    }));
    let mono = Monotone::decreasing(crate::passes::BASIC_SWAP_MEASURE).with_bound(0);
    let v = check_monotone("basic_swap", &runner, &mono, cases)?;
    Ok(Detection {
        verdict: v.label(),
        detail: String::new(),
    })
}

pub fn mutants() -> Vec<Mutant> {
    vec![
        Mutant { name: "layout-swap-p2v-only", target: "layout_swap", detector: "bijection invariant", run: layout_swap_p2v_only },
        Mutant { name: "path-skips-hops", target: "shortest_path", detector: "adjacency postcondition", run: shortest_path_skips_hops },
        Mutant { name: "layout-collides", target: "simple_layout", detector: "bijection postcondition", run: simple_layout_collides },
        Mutant { name: "route-no-relabel", target: "swap_along_path", detector: "coupling compliance", run: basic_swap_no_relabel },
        Mutant { name: "route-late-swaps", target: "swap_and_update_gate", detector: "layout-tracked oracle", run: basic_swap_late_swaps },
        Mutant { name: "cancel-swap-through-gate", target: "cancel_swap", detector: "oracle", run: cancel_swap_through_gate },
        Mutant { name: "merge-conditioned", target: "replace_1q_run", detector: "oracle up to phase", run: optimize_merges_conditioned },
        Mutant { name: "merge-wrong-order", target: "merge_run", detector: "oracle up to phase", run: optimize_wrong_order },
        Mutant { name: "fusion-swapped-angles", target: "replace_1q_run", detector: "primitive certificate", run: fusion_swaps_angles },
        Mutant { name: "chained-grouping", target: "commutation_analysis", detector: "oracle", run: cancellation_chain_grouping },
        Mutant { name: "ignore-conditions", target: "cancel_pair", detector: "oracle", run: cancellation_ignores_conditions },
        Mutant { name: "lookahead-cycle", target: "lookahead_swap", detector: "-gates_remaining.size monotone", run: lookahead_stock },
        Mutant { name: "measure-per-swap", target: "basic_swap", detector: "remaining_gates monotone", run: basic_swap_per_swap_measure },
    ]
}

pub(super) fn mutant_campaign(ctx: &mut Context) -> Result<Section> {
    let mut s = Section::new("mutants");
    let all = mutants();
    let width = all.iter().map(|m| m.name.len()).max().unwrap_or(0);
    let mut caught = 0;
    for m in &all {
        let d = (m.run)(&ctx.cfg)?;
        s.line(format!("MUTANT {:<width$} target={} detector=\"{}\" verdict={}", m.name, m.target, m.detector, d.verdict));
        s.check(d.caught(), format!("mutant {} survived", m.name));
        caught += usize::from(d.caught());
    }
    s.line(format!("MUTANTS total={} caught={caught}", all.len()));
    let _ = Verdict::Pass;
    Ok(s)
}
