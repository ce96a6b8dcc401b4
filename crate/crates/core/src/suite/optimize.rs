use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;

use super::fixtures::{crossed_cx as crossed, crossed_cx_reduced};
use super::{Context, Section};
use crate::calculus::{ProverConfig, ANGLE_GRID};
use crate::contracts::enumerate::{all_circuits, gate_alphabet};
use crate::contracts::gate_label;
use crate::error::Result;
use crate::gen::{self, GateSet};
use crate::ir::{DAGCircuit, Gate, GateName, QuantumCircuit};
use crate::passes::{
    collect_2q_blocks, commutation_analysis, commutative_cancellation, is_safe, optimize_1q_gates, oracle_equal,
    transitivity_counterexample, CancelConfig, Grouping, Optimize1qConfig,
};
use crate::semantics::EqualityMode;
use crate::validator::{validate_cnot_cancellation, Status};

pub(super) const MERGE_CASES: usize = 10;

fn labels(gates: &[Gate]) -> String {
    if gates.is_empty() {
        return "-".into();
    }
    gates.iter().map(gate_label).collect::<Vec<_>>().join(" ")
}

pub(super) fn blocks(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let mut s = Section::new("blocks");
    let mut rng = gen::rng(cfg.seed_for("blocks"));
    let (mut found, mut bad) = (0, 0);
    for _ in 0..cfg.cases {
        let c = gen::random_small_circuit(&mut rng, 4, 16, &GateSet::unitary());
        let d = DAGCircuit::from_circuit(&c);
        let hash = d.structural_hash();
        let bs = collect_2q_blocks(&d);
        found += bs.len();
        let mut seen = BTreeSet::new();
        let ok = bs.iter().all(|b| {
            let qs: BTreeSet<usize> = b.iter().flat_map(|&id| d.gate(id).qubits()).collect();
            qs.len() <= 2 && b.iter().all(|&id| seen.insert(id))
        }) && d.op_nodes().iter().all(|&id| d.gate(id).qubits().len() < 2 || seen.contains(&id))
            && d.structural_hash() == hash;
        if !ok {
            bad += 1;
        }
    }
    s.line(format!("BLOCKS circuits={} blocks={found} violations={bad}", cfg.cases));
    s.check(bad == 0, format!("{bad} circuits with malformed blocks"));
    Ok(s)
}

/// A `u` run split by one conditioned gate, `c_if` on even cases and `q_if` on odd ones.
pub(super) fn merge_case(i: usize, rng: &mut rand_chacha::ChaCha8Rng) -> QuantumCircuit {
    let mut a = || rng.gen_range(-PI..PI);
    let (x, y, z, w) = (a(), a(), a(), a());
    let t = 0.3 + (x.abs() / PI) * 2.2;
    let outer: [Gate; 2] = match i % 3 {
        0 => [Gate::u1(x, 0), Gate::u1(y, 0)],
        1 => [Gate::u3(y, z, w, 0), Gate::u2(z, x, 0)],
        _ => [Gate::u2(w, y, 0), Gate::u1(z, 0)],
    };
    let mid = match i % 4 {
        0 | 1 => Gate::u3(t, y, z, 0),
        2 => Gate::u1(t, 0),
        _ => Gate::u2(t, w, 0),
    };
    let [first, last] = outer;
    if i % 2 == 0 {
        QuantumCircuit::from_parts(1, 1, vec![first, mid.with_c_if(1), last]).expect("fits")
    } else {
        QuantumCircuit::from_parts(2, 0, vec![first, mid.with_q_if(1), last]).expect("fits")
    }
}

pub(super) fn conditioned_merge(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let mut s = Section::new("conditioned-merge");
    let mut rng = gen::rng(cfg.seed_for("conditioned-merge"));
    let (conv, tol) = (cfg.convention, cfg.tol);
    for i in 0..MERGE_CASES {
        let c = merge_case(i, &mut rng);
        let kind = if i % 2 == 0 { "c_if" } else { "q_if" };
        let mut guarded = DAGCircuit::from_circuit(&c);
        let opt = Optimize1qConfig {
            convention: conv,
            merge_conditioned: false,
        };
        optimize_1q_gates(&mut guarded, opt)?;
        let guarded = guarded.to_circuit();
        let kept = guarded == c;
        let mut forced = DAGCircuit::from_circuit(&c);
        optimize_1q_gates(
            &mut forced,
            Optimize1qConfig {
                merge_conditioned: true,
                ..opt
            },
        )?;
        let forced = forced.to_circuit();
        let wrong = !oracle_equal(&c, &forced, conv, EqualityMode::UpToPhase, tol)?;
        s.line(format!(
            "CASE {i} {kind} input=[{}] guarded={} forced=[{}] oracle={}",
            labels(c.gates()),
            if kept { "unchanged" } else { "CHANGED" },
            labels(forced.gates()),
            if wrong { "INEQUIVALENT" } else { "equivalent" }
        ));
        s.check(kept, format!("case {i}: guarded optimizer touched a conditioned run"));
        s.check(forced.len() < c.len(), format!("case {i}: forced merge did not fire"));
        s.check(wrong, format!("case {i}: forced merge was not caught by the oracle"));
    }
    Ok(s)
}

fn safe_alphabet(qreg: usize, rich: bool) -> Vec<Gate> {
    use GateName::*;
    let mut a = gate_alphabet(qreg, &[CX, X, Z, H, T], &[]);
    if rich {
        a.extend(gate_alphabet(qreg, &[U1], &ANGLE_GRID));
        a.extend(gate_alphabet(qreg, &[U2], &[0.0, PI]));
        a.extend(gate_alphabet(qreg, &[U3], &[PI / 3.0]));
    } else {
        a.extend(gate_alphabet(qreg, &[U1], &[PI / 7.0]));
    }
    a
}

/// Number of circuits whose cancellation output the oracle rejects.
fn breaks(circuits: impl Iterator<Item = QuantumCircuit>, grouping: Grouping, ctx: &Context) -> Result<(usize, usize)> {
    let (mut n, mut broken) = (0, 0);
    for c in circuits {
        n += 1;
        let mut d = DAGCircuit::from_circuit(&c);
        let set = commutation_analysis(&d, grouping);
        commutative_cancellation(&mut d, &set, CancelConfig::default())?;
        if !oracle_equal(&c, &d.to_circuit(), ctx.cfg.convention, EqualityMode::Exact, ctx.cfg.tol)? {
            broken += 1;
        }
    }
    Ok((n, broken))
}

pub(super) fn commutation(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let start = Instant::now();
    let mut s = Section::new("commutation");
    use GateName::*;

    let mut outside = gate_alphabet(3, &[Y, CY, CZ, Swap], &[]);
    outside.extend(gate_alphabet(3, &[CX, X, Z, H], &[]));
    let triple = transitivity_counterexample(&outside).filter(|(a, b, c)| [a, b, c].iter().any(|g| !is_safe(g)));
    match &triple {
        Some((a, b, c)) => s.line(format!(
            "TRIPLE A={} B={} C={} A~B B~C A!~C",
            gate_label(a),
            gate_label(b),
            gate_label(c)
        )),
        None => s.line("TRIPLE none"),
    }
    s.check(triple.is_some(), "no transitivity counterexample outside the safe set");

    let (n2, b2) = breaks(all_circuits(2, 3, safe_alphabet(2, true)), Grouping::AllPairs, ctx)?;
    s.line(format!("SAFE exhaustive qubits=2 max_len=3 circuits={n2} breaks={b2}"));
    let (n3, b3) = breaks(all_circuits(3, 3, safe_alphabet(3, false)), Grouping::AllPairs, ctx)?;
    s.line(format!("SAFE exhaustive qubits=3 max_len=3 circuits={n3} breaks={b3}"));
    let mut rng = gen::rng(cfg.seed_for("commutation"));
    let random: Vec<QuantumCircuit> = (0..cfg.cases * 2)
        .map(|_| gen::random_circuit(&mut rng, 3, 12, &GateSet::commutation_safe()))
        .collect();
    let (nr, br) = breaks(random.into_iter(), Grouping::AllPairs, ctx)?;
    s.line(format!("SAFE random qubits=3 gates=12 circuits={nr} breaks={br}"));
    s.check(b2 + b3 + br == 0, format!("{} safe-set circuits broken by cancellation", b2 + b3 + br));

    let witness =
        QuantumCircuit::from_gates(1, vec![Gate::h(0), Gate::u1(0.0, 0), Gate::z(0), Gate::u1(0.0, 0), Gate::h(0)])?;
    let (_, wb) = breaks(std::iter::once(witness.clone()), Grouping::Chain, ctx)?;
    s.line(format!("CHAIN witness=[{}] broken={}", labels(witness.gates()), wb == 1));
    s.check(wb == 1, "chained grouping not caught on its witness");
    s.line(format!("COMMUTATION time={}", cfg.time(start)));
    Ok(s)
}

pub(super) fn crossed_cx(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let mut s = Section::new("crossed-cx");
    let c = crossed();
    let mut d = DAGCircuit::from_circuit(&c);
    let set = commutation_analysis(&d, Grouping::AllPairs);
    for q in 0..c.qreg() {
        let sizes: Vec<String> = set.wire(q).iter().map(|g| g.len().to_string()).collect();
        s.line(format!("GROUPS Q{q} sizes={}", sizes.join(",")));
    }
    let log = commutative_cancellation(&mut d, &set, CancelConfig::default())?;
    let out = d.to_circuit();
    s.line(format!("INPUT  [{}]", labels(c.gates())));
    s.line(format!("OUTPUT [{}] events={}", labels(out.gates()), log.len()));
    let eq = oracle_equal(&c, &out, cfg.convention, EqualityMode::Exact, cfg.tol)?;
    s.check(eq, "output is not oracle-equivalent");
    s.check(out.len() < c.len(), "no gate was removed");
    s.check(out.dag_equivalent(&crossed_cx_reduced()), "output differs from the expected reduction");
    let prover = ProverConfig {
        budget: cfg.budget,
        convention: cfg.convention,
    };
    let with_log = validate_cnot_cancellation(&c, &out, Some(&log), &prover)?;
    let without = validate_cnot_cancellation(&c, &out, None, &prover)?;
    s.line(format!("VALIDATE log={} prover={}", with_log.status, without.status));
    s.check(with_log.status == Status::Valid, "logged validation not VALID");
    s.check(without.status != Status::Invalid, "prover fallback reported INVALID");
    Ok(s)
}
