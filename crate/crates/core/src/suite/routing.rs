use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;

use super::fixtures::{ladder_map, ladder_stall as ladder_circuit, routing_maps};
use super::{Context, Section, SuiteConfig};
use crate::contracts::{
    check_contract, check_monotone, enumerate::connected_graphs, parse_counterexample, render_counterexample, Budget,
    Cases, Contract, ContractReport, Emit, Monotone, MonotoneVerdict, Verdict,
};
use crate::device::{layout_swap, simple_layout, CouplingMap, Layout};
use crate::error::Result;
use crate::gen::{self, GateSet};
use crate::ir::{DAGCircuit, Gate, GateKind, QuantumCircuit};
use crate::passes::primitives::edits_are_primitive;
use crate::passes::{
    basic_swap, basic_swap_instrumented, lookahead_instrumented, lookahead_swap, LookaheadConfig, MappedCircuit,
    RoutingOutcome, BASIC_SWAP_MEASURE, LOOKAHEAD_MEASURE,
};
use crate::semantics::EqualityMode;
use crate::validator::{validate_swap_insertion, Status};

pub(super) const DEVICE_OPS: [&str; 3] = ["simple_layout", "shortest_path", "layout_swap"];
const MAX_QUBITS: usize = 5;
const MAX_GATES: usize = 20;
pub(super) const MUTATIONS: usize = 20;

fn report_lines<I>(s: &mut Section, rep: &ContractReport<I>, timings: bool) {
    for l in rep.lines(timings) {
        s.line(l);
    }
    if let Some(f) = &rep.failure {
        s.line(render_counterexample(&f.counterexample));
    }
    s.check(rep.verdict() == Verdict::Pass, format!("{} contract {}", rep.op, rep.verdict()));
}

fn bfs(m: &CouplingMap, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; m.size()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        let d = dist[p].expect("queued nodes have a distance");
        for &n in m.neighbors(p) {
            if dist[n].is_none() {
                dist[n] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

pub(super) fn simple_layout_contract() -> Contract<(usize, CouplingMap), Layout> {
    Contract::new("simple_layout")
        .pre(|(n, m): &(usize, CouplingMap)| *n >= 1 && *n <= m.size())
        .post(|(n, m), l: &Layout| l.num_virtual() == *n && l.num_physical() == m.size() && l.is_consistent())
        .invariant(|(_, m)| m.is_connected(), |(_, m), _| m.is_connected())
}

pub(super) fn shortest_path_contract() -> Contract<(CouplingMap, usize, usize), Vec<usize>> {
    Contract::new("shortest_path")
        .pre(|(m, a, b): &(CouplingMap, usize, usize)| *a < m.size() && *b < m.size() && m.is_connected())
        .post(|(m, a, b), path: &Vec<usize>| {
            path.first() == Some(a)
                && path.last() == Some(b)
                && path.windows(2).all(|w| m.adjacent(w[0], w[1]))
                && bfs(m, *a)[*b] == Some(path.len() - 1)
        })
}

pub(super) fn layout_swap_contract() -> Contract<(Layout, usize, usize), Layout> {
    Contract::new("layout_swap")
        .pre(|(l, a, b): &(Layout, usize, usize)| *a < l.num_physical() && *b < l.num_physical() && a != b)
        .post(|(l, a, b), out: &Layout| {
            out.p2v(*a) == l.p2v(*b)
                && out.p2v(*b) == l.p2v(*a)
                && (0..l.num_physical()).filter(|p| p != a && p != b).all(|p| out.p2v(p) == l.p2v(p))
        })
        .invariant(|(l, _, _)| l.is_consistent(), |_, out| out.is_consistent())
}

pub(super) fn device(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let mut s = Section::new("device");
    let budget = Budget::default();

    let maps = [CouplingMap::line(6), CouplingMap::ring(6), CouplingMap::grid(2, 3)];
    let items: Vec<(usize, CouplingMap)> = maps.iter().flat_map(|m| (1..=6).map(move |n| (n, m.clone()))).collect();
    let contract = simple_layout_contract();
    let op = |(n, m): &(usize, CouplingMap)| simple_layout(*n, m);
    let rep = check_contract("simple_layout", &op, &contract, Cases::exhaustive(items), &budget);
    ctx.registry.record(&rep);
    report_lines(&mut s, &rep, cfg.timings);

    let contract = shortest_path_contract();
    let op = |(m, a, b): &(CouplingMap, usize, usize)| m.shortest_path(*a, *b);
    let small = (1..=5).flat_map(|n| {
        connected_graphs(n)
            .into_iter()
            .flat_map(move |m| (0..n).flat_map(move |a| (0..n).map(move |b| (a, b))).map(move |(a, b)| (m.clone(), a, b)).collect::<Vec<_>>())
    });
    let rep = check_contract("shortest_path", &op, &contract, Cases::exhaustive(small), &budget);
    let exhaustive_ok = rep.verdict() == Verdict::Pass;
    report_lines(&mut s, &rep, cfg.timings);
    let random = Cases::random(cfg.cases, cfg.seed_for("shortest_path"), |r| {
        let n = r.gen_range(6..=8);
        let extra = r.gen_range(0..n);
        let m = gen::random_connected_map(r, n, extra);
        (m, r.gen_range(0..n), r.gen_range(0..n))
    });
    let rep = check_contract("shortest_path", &op, &contract, random, &budget);
    report_lines(&mut s, &rep, cfg.timings);
    if exhaustive_ok {
        ctx.registry.record(&rep);
    }

    let contract = layout_swap_contract();
    let ladder = ladder_map();
    let cases = Cases::random(cfg.cases, cfg.seed_for("layout_swap"), move |r| {
        let n = r.gen_range(1..=ladder.size());
        let l = gen::random_layout(r, n, ladder.size());
        let (a, b) = ladder.edges()[r.gen_range(0..ladder.edges().len())];
        (l, a, b)
    });
    let op = |(l, a, b): &(Layout, usize, usize)| layout_swap(l, *a, *b);
    let rep = check_contract("layout_swap", &op, &contract, cases, &budget);
    ctx.registry.record(&rep);
    report_lines(&mut s, &rep, cfg.timings);

    let verified: Vec<&str> = ctx.registry.verified().collect();
    s.line(format!("REGISTRY verified={}", verified.join(",")));
    Ok(s)
}

fn ensure_device(ctx: &mut Context) -> Result<()> {
    if DEVICE_OPS.iter().any(|op| !ctx.registry.is_verified(op)) {
        device(ctx)?;
    }
    Ok(())
}

/// Random circuits for one routing device, reproducible from the seed.
pub(super) fn routing_cases(cfg: &SuiteConfig, map_index: usize, map: &CouplingMap) -> Vec<(QuantumCircuit, CouplingMap)> {
    let mut rng = gen::rng(cfg.seed_for("routing") ^ map_index as u64);
    let set = GateSet::unitary();
    (0..cfg.cases)
        .map(|_| (gen::random_small_circuit(&mut rng, MAX_QUBITS, MAX_GATES, &set), map.clone()))
        .collect()
}

pub(super) fn routing_contract(name: &str, cfg: &SuiteConfig) -> Contract<(QuantumCircuit, CouplingMap), MappedCircuit> {
    let (conv, tol) = (cfg.convention, cfg.tol);
    Contract::new(name)
        .pre(|(c, m): &(QuantumCircuit, CouplingMap)| c.qreg() <= m.size() && m.is_connected() && c.is_unitary())
        .post(move |(c, m), out: &MappedCircuit| {
            out.is_coupling_compliant(m) && out.equivalent_to(c, conv, EqualityMode::Exact, tol).unwrap_or(false)
        })
        .invariant(
            |(c, _)| c.gates().iter().all(|g| g.qubits().len() <= 2),
            |_, out| out.dag.check_invariants().is_ok() && edits_are_primitive(&out.dag),
        )
}

fn monotone_lines<I>(s: &mut Section, op: &str, measure: &str, v: &MonotoneVerdict<I>) {
    match v {
        MonotoneVerdict::Pass { runs, iterations } => {
            s.line(format!("MONO {op} {measure} PASS runs={runs} iterations={iterations}"));
        }
        MonotoneVerdict::Stall { stall, counterexample, .. } => {
            s.line(format!("MONO {op} {measure} STALL iteration={}", stall.iteration));
            s.line(render_counterexample(counterexample));
        }
    }
}

pub(super) fn basic_swap_campaign(ctx: &mut Context) -> Result<Section> {
    let start = Instant::now();
    ensure_device(ctx)?;
    let cfg = ctx.cfg;
    let mut s = Section::new("basic-swap");
    if let Err(e) = ctx.registry.require("basic_swap", &DEVICE_OPS) {
        s.check(false, e.to_string());
        return Ok(s);
    }
    let budget = Budget::default();
    let mut total = 0;
    for (i, (name, map)) in routing_maps().into_iter().enumerate() {
        let cases = routing_cases(&cfg, i, &map);
        total += cases.len();
        let op_name = format!("basic_swap@{name}");
        let contract = routing_contract(&op_name, &cfg);
        let op = |(c, m): &(QuantumCircuit, CouplingMap)| basic_swap(&DAGCircuit::from_circuit(c), m, None);
        let rep = check_contract(&op_name, &op, &contract, Cases::exhaustive(cases.clone()), &budget);
        report_lines(&mut s, &rep, cfg.timings);
        let runner = |(c, m): &(QuantumCircuit, CouplingMap), emit: &mut Emit<'_>| {
            basic_swap_instrumented(&DAGCircuit::from_circuit(c), m, None, emit).map(|_| ())
        };
        let mono = Monotone::decreasing(BASIC_SWAP_MEASURE).with_bound(0);
        let v = check_monotone(&op_name, &runner, &mono, cases)?;
        monotone_lines(&mut s, &op_name, BASIC_SWAP_MEASURE, &v);
        s.check(v.is_pass(), format!("{op_name} measure stalled"));
    }
    s.line(format!("CAMPAIGN basic_swap maps=3 cases={total} time={}", cfg.time(start)));
    Ok(s)
}

type Mutation = fn(&MappedCircuit) -> Option<(Vec<Gate>, Layout)>;

fn first_swap(gates: &[Gate]) -> Option<usize> {
    gates.iter().position(|g| g.kind == GateKind::Swap)
}

const MUTATION_KINDS: [(&str, Mutation); 6] = [
    ("swap-to-cx", |m| {
        let mut g = m.circuit().into_gates();
        let i = first_swap(&g)?;
        let ops = g[i].operands().to_vec();
        g[i] = Gate::cx(ops[0], ops[1]);
        Some((g, m.final_layout.clone()))
    }),
    ("drop-swap", |m| {
        let mut g = m.circuit().into_gates();
        g.remove(first_swap(&g)?);
        Some((g, m.final_layout.clone()))
    }),
    ("drop-gate", |m| {
        let mut g = m.circuit().into_gates();
        g.remove(g.iter().position(|g| g.kind != GateKind::Swap)?);
        Some((g, m.final_layout.clone()))
    }),
    ("flip-cx", |m| {
        let mut g = m.circuit().into_gates();
        let i = g.iter().position(|g| g.kind == GateKind::CX)?;
        let ops = g[i].operands().to_vec();
        g[i] = Gate::cx(ops[1], ops[0]);
        Some((g, m.final_layout.clone()))
    }),
    ("stale-final", |m| {
        let l = &m.final_layout;
        let f = layout_swap(l, l.v2p(0), l.v2p(1)).ok()?;
        Some((m.circuit().into_gates(), f))
    }),
    ("stray-x", |m| {
        let mut g = m.circuit().into_gates();
        g.push(Gate::x(m.final_layout.v2p(0)));
        Some((g, m.final_layout.clone()))
    }),
];

fn mutate(m: &MappedCircuit, kind: Mutation) -> Result<Option<MappedCircuit>> {
    let Some((gates, fin)) = kind(m) else {
        return Ok(None);
    };
    let c = QuantumCircuit::from_parts(m.dag.qreg(), m.dag.cbits(), gates)?;
    MappedCircuit::new(DAGCircuit::from_circuit(&c), m.initial_layout.clone(), fin).map(Some)
}

pub(super) fn validation(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let start = Instant::now();
    let mut s = Section::new("validation");
    let (conv, tol) = (cfg.convention, cfg.tol);
    let (mut valid, mut invalid, mut inconclusive, mut false_valid) = (0, 0, 0, 0);
    let mut routed = Vec::new();
    for (i, (name, map)) in routing_maps().into_iter().enumerate() {
        for (c, m) in routing_cases(&cfg, i, &map) {
            let out = basic_swap(&DAGCircuit::from_circuit(&c), &m, None)?;
            let v = validate_swap_insertion(&c, &out)?;
            match v.status {
                Status::Valid => {
                    valid += 1;
                    if !out.equivalent_to(&c, conv, EqualityMode::Exact, tol)? {
                        false_valid += 1;
                    }
                }
                Status::Invalid => invalid += 1,
                Status::Inconclusive => inconclusive += 1,
            }
            routed.push((name, c, out));
        }
    }
    s.line(format!(
        "VALIDATE basic_swap outputs={} valid={valid} invalid={invalid} inconclusive={inconclusive} false_valid={false_valid}",
        routed.len()
    ));
    s.check(valid == routed.len(), format!("{} routed outputs not VALID", routed.len() - valid));

    let mut made = 0;
    let mut caught = 0;
    for (k, (name, c, out)) in routed.iter().enumerate() {
        if made == MUTATIONS {
            break;
        }
        if out.dag.qreg() < 2 || c.qreg() < 2 {
            continue;
        }
        let (kind, f) = MUTATION_KINDS[made % MUTATION_KINDS.len()];
        let Some(bad) = mutate(out, f)? else {
            continue;
        };
        if bad.equivalent_to(c, conv, EqualityMode::UpToPhase, tol)? {
            continue;
        }
        let v = validate_swap_insertion(c, &bad)?;
        made += 1;
        if v.status == Status::Valid {
            false_valid += 1;
        }
        if v.status == Status::Invalid {
            caught += 1;
        }
        s.line(format!("MUTATION {made:>2} {kind:<11} case={k} map={name} verdict={}", v.status));
    }
    s.line(format!(
        "MUTATIONS made={made} invalid={caught} false_valid={false_valid} time={}",
        cfg.time(start)
    ));
    s.check(made == MUTATIONS, format!("only {made} mutations confirmed inequivalent"));
    s.check(caught == made, format!("{} mutations not INVALID", made - caught));
    s.check(false_valid == 0, format!("{false_valid} false VALID verdicts"));
    Ok(s)
}

pub(super) fn lookahead_campaign(ctx: &mut Context) -> Result<Section> {
    let start = Instant::now();
    ensure_device(ctx)?;
    let cfg = ctx.cfg;
    let mut s = Section::new("lookahead");
    let budget = Budget::default();
    let lcfg = LookaheadConfig::default();
    for (i, (name, map)) in routing_maps().into_iter().enumerate() {
        let cases = routing_cases(&cfg, i, &map);
        let op_name = format!("lookahead_swap@{name}");
        let contract = routing_contract(&op_name, &cfg);
        let op = |(c, m): &(QuantumCircuit, CouplingMap)| {
            lookahead_swap(&DAGCircuit::from_circuit(c), m, None, lcfg)?
                .mapped()
                .ok_or(crate::Error::StepLimit(lcfg.max_steps))
        };
        let rep = check_contract(&op_name, &op, &contract, Cases::exhaustive(cases.clone()), &budget);
        report_lines(&mut s, &rep, cfg.timings);
        let runner = |(c, m): &(QuantumCircuit, CouplingMap), emit: &mut Emit<'_>| {
            lookahead_instrumented(&DAGCircuit::from_circuit(c), m, None, lcfg, emit).map(|_| ())
        };
        let v = check_monotone(&op_name, &runner, &Monotone::increasing(LOOKAHEAD_MEASURE).with_bound(0), cases)?;
        monotone_lines(&mut s, &op_name, LOOKAHEAD_MEASURE, &v);
        s.check(v.is_pass(), format!("{op_name} measure stalled"));
    }
    s.line(format!("CAMPAIGN lookahead_swap maps=3 time={}", cfg.time(start)));
    Ok(s)
}

pub(super) fn ladder_stall(_: &mut Context) -> Result<Section> {
    let mut s = Section::new("ladder-stall");
    let c = ladder_circuit();
    let map = ladder_map();
    let lcfg = LookaheadConfig::default();
    s.line(format!(
        "CONFIG depth={} width={} max_steps={} scorer={}",
        lcfg.depth,
        lcfg.width,
        lcfg.max_steps,
        lcfg.scorer.as_str()
    ));
    match lookahead_swap(&DAGCircuit::from_circuit(&c), &map, None, lcfg)? {
        RoutingOutcome::Stalled(r) => {
            let swaps: Vec<String> = r.swaps.iter().map(|(a, b)| format!("({a},{b})")).collect();
            s.line(format!(
                "STALL lookahead_swap iteration={} cycle={} swaps={} remaining={}",
                r.iteration,
                r.cycle,
                swaps.join(""),
                r.remaining.len()
            ));
            s.check(r.iteration < lcfg.max_steps, "stall not within the step limit");
        }
        RoutingOutcome::Mapped(_) => s.check(false, "lookahead_swap routed the ladder circuit"),
    }
    let runner = |c: &QuantumCircuit, emit: &mut Emit<'_>| {
        lookahead_instrumented(&DAGCircuit::from_circuit(c), &map, None, lcfg, emit).map(|_| ())
    };
    let v = check_monotone("lookahead_swap", &runner, &Monotone::increasing(LOOKAHEAD_MEASURE), [c.clone()])?;
    match v {
        MonotoneVerdict::Stall { stall, mut counterexample, .. } => {
            counterexample.coupling = Some(map.clone());
            s.line(format!("MONO lookahead_swap {LOOKAHEAD_MEASURE} STALL iteration={}", stall.iteration));
            let text = render_counterexample(&counterexample);
            s.line(text.trim_end());
            s.check(stall.iteration < lcfg.max_steps, "monotone stall past the step limit");
            s.check(counterexample.circuit.as_ref().map(|x| x.gates()) == Some(c.gates()), "counterexample is not the four CNOTs");
            s.check(parse_counterexample(&text).ok() == Some(counterexample), "counterexample does not re-parse");
        }
        MonotoneVerdict::Pass { .. } => s.check(false, "measure never stalled"),
    }
    Ok(s)
}
