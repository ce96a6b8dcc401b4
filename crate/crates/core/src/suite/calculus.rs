use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Context, Section};
use crate::calculus::{certify_pattern, standard_rules, CertifyConfig, Direction, RewriteRule, RuleSet};
use crate::error::Result;
use crate::gen::{self, GateSet};
use crate::ir::Gate;
use crate::semantics::{denote_gates, equal_in_mode, EqualityMode};

pub(super) const MIN_RULES: usize = 14;
const CHAIN_QUBITS: usize = 5;
const CHAIN_GATES: usize = 12;
const CHAIN_STEPS: usize = 6;

pub(super) fn patterns(ctx: &mut Context) -> Result<Section> {
    let cfg = &ctx.cfg;
    let start = Instant::now();
    let mut s = Section::new("patterns");
    let ccfg = CertifyConfig {
        convention: cfg.convention,
        seed: cfg.seed,
        tol: cfg.tol,
        ..CertifyConfig::default()
    };
    let rules = standard_rules(cfg.convention);
    s.check(rules.len() >= MIN_RULES, format!("only {} rules shipped", rules.len()));
    let width = rules.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &rules {
        let c = certify_pattern(r, &ccfg)?;
        let us = if cfg.timings {
            c.elapsed.as_micros().to_string()
        } else {
            "-".into()
        };
        let verdict = if c.passed { "CERTIFIED" } else { "REJECTED" };
        s.line(format!(
            "RULE {:<width$} {:<11} {verdict} residual={:.1e} samples={} us={us}",
            r.name,
            r.mode.as_str(),
            c.residual,
            c.samples
        ));
        s.check(c.passed && c.residual <= cfg.tol, format!("rule {} residual {:.3e}", r.name, c.residual));
    }
    s.line(format!("PATTERNS rules={} time={}", rules.len(), cfg.time(start)));
    Ok(s)
}

/// Place the source side of a random rule at `at`, on random distinct qubits.
fn plant(rng: &mut ChaCha8Rng, rule: &RewriteRule, dir: Direction, qreg: usize) -> Option<Vec<Gate>> {
    if rule.num_qubits > qreg {
        return None;
    }
    let mut qs: Vec<usize> = (0..qreg).collect();
    qs.shuffle(rng);
    let vals: Vec<f64> = (0..rule.num_angles).map(|_| gen::angle(rng)).collect();
    let (from, _) = rule.sides(dir);
    from.iter().map(|pg| pg.instantiate(|q| qs[q], &vals).ok()).collect()
}

/// A start circuit seeded with rule instances so chains have something to rewrite.
fn chain_start(rng: &mut ChaCha8Rng, rules: &[&RewriteRule]) -> (usize, Vec<Gate>) {
    let qreg = rng.gen_range(2..=CHAIN_QUBITS);
    let target = rng.gen_range(1..=CHAIN_GATES);
    let set = GateSet::unitary();
    let mut gates = Vec::new();
    while gates.len() < target {
        if rng.gen_bool(0.5) {
            let r = rules[rng.gen_range(0..rules.len())];
            let dir = if r.supports(Direction::Backward) && rng.gen_bool(0.5) {
                Direction::Backward
            } else {
                Direction::Forward
            };
            if let Some(inst) = plant(rng, r, dir, qreg) {
                if gates.len() + inst.len() <= CHAIN_GATES {
                    gates.extend(inst);
                    continue;
                }
            }
        }
        gates.push(gen::random_gate(rng, qreg, &set));
    }
    (qreg, gates)
}

pub(super) fn chains(ctx: &mut Context) -> Result<Section> {
    let cfg = ctx.cfg;
    let start = Instant::now();
    let mut s = Section::new("chains");
    let rules = RuleSet::standard(cfg.convention);
    let usable: Vec<&RewriteRule> = rules.usable().collect();
    let mut rng = gen::rng(cfg.seed_for("chains"));
    let (mut applied, mut violations) = (0usize, 0usize);
    for i in 0..cfg.chains {
        let (qreg, first) = chain_start(&mut rng, &usable);
        let mut gates = first.clone();
        let mut mode = EqualityMode::Exact;
        for _ in 0..rng.gen_range(1..=CHAIN_STEPS) {
            let mut sites: Vec<(&RewriteRule, Direction, usize)> = Vec::new();
            for &r in &usable {
                for d in [Direction::Forward, Direction::Backward] {
                    if r.supports(d) {
                        sites.extend(r.matches(&gates, d).into_iter().map(|p| (r, d, p)));
                    }
                }
            }
            let Some(&(r, d, p)) = sites.choose(&mut rng) else {
                break;
            };
            gates = crate::calculus::apply_rule_gates(&gates, r, p, d)?;
            mode = mode.weaker(r.mode);
            applied += 1;
        }
        let u = denote_gates(qreg, &first, cfg.convention)?;
        let v = denote_gates(qreg, &gates, cfg.convention)?;
        if !equal_in_mode(&u, &v, mode, cfg.tol) {
            if violations == 0 {
                s.line(format!("VIOLATION chain={i} qreg={qreg} mode={}", mode.as_str()));
            }
            violations += 1;
        }
    }
    s.line(format!(
        "CHAINS chains={} applications={applied} violations={violations} time={}",
        cfg.chains,
        cfg.time(start)
    ));
    s.check(violations == 0, format!("{violations} chains changed the denotation"));
    s.check(applied > 0 || cfg.chains == 0, "no rule ever applied");
    Ok(s)
}
