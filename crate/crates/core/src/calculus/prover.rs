//! Equivalence proofs by rewriting.
//!
//! Both circuits are first normalized by greedily applying gate-count
//! reducing rules (angle-summing merges excluded, since they cannot be
//! undone). If the normal forms differ, a bidirectional breadth-first search
//! explores every other rewrite until the frontiers meet or the state budget
//! runs out.
//!
//! Search states are gate lists in canonical order, so lists that differ
//! only by exchanging gates on disjoint qubits coincide. Trace links are
//! checked modulo that reordering and an angle tolerance of `1e-9`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::certify::RuleSet;
use super::pattern::{apply_rule_gates, Direction, RewriteRule};
use crate::error::{Error, Result};
use crate::ir::{canonical_gates, Gate, GateName, QuantumCircuit};
use crate::semantics::{Convention, EqualityMode};

/// The structural rules of the equivalence calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructuralRule {
    /// `C == C`.
    Symmetry,
    /// From `C1 == C2` conclude `C2 == C1`.
    Reflexivity,
    /// Chain two equivalences.
    Transitivity,
    /// Rewrite inside a context `A; [window]; B`.
    Sequencing,
    /// A certified rule instance.
    PrimitivePatterns,
}

impl StructuralRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StructuralRule::Symmetry => "Symmetry",
            StructuralRule::Reflexivity => "Reflexivity",
            StructuralRule::Transitivity => "Transitivity",
            StructuralRule::Sequencing => "Sequencing",
            StructuralRule::PrimitivePatterns => "PrimitivePatterns",
        }
    }
}

/// One link of a proof: `prev == after` by rule `rule`.
///
/// When `flipped`, the rule rewrites `after` into `prev` and the link is
/// used backwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofStep {
    pub rule: String,
    pub position: usize,
    pub direction: Direction,
    pub flipped: bool,
    pub after: Vec<Gate>,
}

impl ProofStep {
    pub fn justification(&self) -> Vec<StructuralRule> {
        let mut j = vec![StructuralRule::PrimitivePatterns, StructuralRule::Sequencing];
        if self.flipped {
            j.push(StructuralRule::Reflexivity);
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofTrace {
    pub qreg: usize,
    pub start: Vec<Gate>,
    pub steps: Vec<ProofStep>,
    pub mode: EqualityMode,
}

impl ProofTrace {
    pub fn end(&self) -> &[Gate] {
        self.steps.last().map_or(&self.start, |s| &s.after)
    }

    /// Structural rules used at the top level of the derivation.
    pub fn structural_rules(&self) -> Vec<StructuralRule> {
        if self.steps.is_empty() {
            return vec![StructuralRule::Symmetry];
        }
        let mut out = Vec::new();
        if self.steps.len() > 1 {
            out.push(StructuralRule::Transitivity);
        }
        for s in &self.steps {
            for j in s.justification() {
                if !out.contains(&j) {
                    out.push(j);
                }
            }
        }
        out
    }

    /// Re-check every link against the rules it cites.
    pub fn replay(&self, rules: &RuleSet) -> Result<()> {
        let mut prev: &[Gate] = &self.start;
        for (i, s) in self.steps.iter().enumerate() {
            let rule = rules
                .get(&s.rule)
                .ok_or_else(|| Error::Precondition(format!("step {i}: unknown rule {}", s.rule)))?;
            let (from, to) = if s.flipped { (&s.after[..], prev) } else { (prev, &s.after[..]) };
            let from = canonical_gates(self.qreg, from);
            let got = apply_rule_gates(&from, rule, s.position, s.direction)?;
            if !same_state(self.qreg, &got, to) {
                return Err(Error::Precondition(format!("step {i}: {} does not produce the recorded circuit", s.rule)));
            }
            prev = &s.after;
        }
        Ok(())
    }

    /// A proof of the swapped equivalence.
    pub fn reversed(&self) -> ProofTrace {
        let mut states: Vec<&[Gate]> = vec![&self.start];
        states.extend(self.steps.iter().map(|s| s.after.as_slice()));
        let steps = self
            .steps
            .iter()
            .enumerate()
            .rev()
            .map(|(i, s)| ProofStep {
                rule: s.rule.clone(),
                position: s.position,
                direction: s.direction,
                flipped: !s.flipped,
                after: states[i].to_vec(),
            })
            .collect();
        ProofTrace {
            qreg: self.qreg,
            start: self.end().to_vec(),
            steps,
            mode: self.mode,
        }
    }

    pub fn start_circuit(&self) -> Result<QuantumCircuit> {
        QuantumCircuit::from_gates(self.qreg, self.start.clone())
    }

    pub fn end_circuit(&self) -> Result<QuantumCircuit> {
        QuantumCircuit::from_gates(self.qreg, self.end().to_vec())
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |gs: &[Gate]| {
            if gs.is_empty() {
                "id".to_string()
            } else {
                gs.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("; ")
            }
        };
        writeln!(f, "proof ({}) {} steps", self.mode.as_str(), self.steps.len())?;
        writeln!(f, "  start: {}", show(&self.start))?;
        for (i, s) in self.steps.iter().enumerate() {
            let just: Vec<&str> = s.justification().iter().map(|j| j.as_str()).collect();
            let dir = match s.direction {
                Direction::Forward => "->",
                Direction::Backward => "<-",
            };
            writeln!(f, "  {:>3}: {} {dir} @{} [{}] => {}", i + 1, s.rule, s.position, just.join(", "), show(&s.after))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProofResult {
    Proved(ProofTrace),
    Unknown { explored: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct ProverConfig {
    pub budget: usize,
    pub convention: Convention,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            budget: 10_000,
            convention: Convention::Diagram,
        }
    }
}

/// A single certified rule instance relates the two windows exactly.
pub fn equiv(w1: &[Gate], w2: &[Gate], rules: &RuleSet) -> bool {
    rules.usable().any(|r| {
        [Direction::Forward, Direction::Backward].into_iter().any(|d| {
            let (from, to) = r.sides(d);
            from.len() == w1.len()
                && to.len() == w2.len()
                && r.find_match(w1, 0, d)
                    .is_some_and(|m| m.skipped.is_empty() && r.rewrite(w1, &m, d).ok().as_deref() == Some(w2))
        })
    })
}

const ANGLE_TOL: f64 = 1e-9;

type StateKey = Vec<(GateName, Vec<usize>, Vec<i64>)>;

fn state_key(gates: &[Gate]) -> StateKey {
    gates
        .iter()
        .map(|g| {
            let ps = g.kind.params().iter().map(|p| (p / ANGLE_TOL / 10.0).round() as i64).collect();
            (g.name(), g.qubits(), ps)
        })
        .collect()
}

/// Equal modulo disjoint reordering and angle tolerance.
fn same_state(qreg: usize, a: &[Gate], b: &[Gate]) -> bool {
    let (a, b) = (canonical_gates(qreg, a), canonical_gates(qreg, b));
    a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            x.name() == y.name()
                && x.operands() == y.operands()
                && x.c_if == y.c_if
                && x.q_if == y.q_if
                && x.kind.params().iter().zip(y.kind.params()).all(|(p, q)| (p - q).abs() <= ANGLE_TOL)
        })
}

/// Rules that sum angles; applying them loses information.
fn is_lossy(r: &RewriteRule) -> bool {
    r.lhs
        .iter()
        .chain(&r.rhs)
        .flat_map(|g| &g.params)
        .any(|p| p.as_var().is_none() && p.as_constant().is_none())
}

fn step(qreg: usize, rule: &RewriteRule, gates: &[Gate], position: usize, dir: Direction) -> Option<ProofStep> {
    let m = rule.find_match(gates, position, dir)?;
    let after = canonical_gates(qreg, &rule.rewrite(gates, &m, dir).ok()?);
    Some(ProofStep {
        rule: rule.name.clone(),
        position,
        direction: dir,
        flipped: false,
        after,
    })
}

/// Greedy fixpoint of lossless gate-count reducing rewrites.
fn normalize(qreg: usize, gates: Vec<Gate>, rules: &[&RewriteRule]) -> (Vec<Gate>, Vec<ProofStep>) {
    let mut cur = canonical_gates(qreg, &gates);
    let mut steps = Vec::new();
    'outer: loop {
        for r in rules {
            for d in [Direction::Forward, Direction::Backward] {
                if r.delta(d) >= 0 || !r.supports(d) || is_lossy(r) {
                    continue;
                }
                for p in 0..cur.len() {
                    if let Some(s) = step(qreg, r, &cur, p, d) {
                        cur = s.after.clone();
                        steps.push(s);
                        continue 'outer;
                    }
                }
            }
        }
        return (cur, steps);
    }
}

/// Single rewrites from `gates`. Non-growing ones are followed by
/// normalization; growing ones must stay within `max_len` gates.
fn neighbours(qreg: usize, gates: &[Gate], rules: &[&RewriteRule], max_len: usize) -> Vec<Vec<ProofStep>> {
    let mut out = Vec::new();
    for r in rules {
        for d in [Direction::Forward, Direction::Backward] {
            let delta = r.delta(d);
            if !r.supports(d) || gates.len() as isize + delta > max_len as isize {
                continue;
            }
            for p in 0..gates.len() {
                if let Some(s) = step(qreg, r, gates, p, d) {
                    let mut path = Vec::new();
                    if delta <= 0 {
                        let (_, norm) = normalize(qreg, s.after.clone(), rules);
                        path.push(s);
                        path.extend(norm);
                    } else {
                        path.push(s);
                    }
                    out.push(path);
                }
            }
        }
    }
    out
}

/// Turn a flipped link into a forward one when the inverse rewrite exists.
fn straighten(qreg: usize, prev: &[Gate], s: ProofStep, rules: &RuleSet) -> ProofStep {
    if !s.flipped {
        return s;
    }
    if let Some(r) = rules.get(&s.rule) {
        let d = s.direction.flip();
        if r.supports(d) {
            let prev = canonical_gates(qreg, prev);
            for p in 0..prev.len() {
                if let Some(fwd) = step(qreg, r, &prev, p, d) {
                    if same_state(qreg, &fwd.after, &s.after) {
                        return fwd;
                    }
                }
            }
        }
    }
    s
}

/// Gates a search state may exceed the larger normal form by.
const GROWTH_SLACK: usize = 3;

struct Search {
    states: Vec<Vec<Gate>>,
    parent: Vec<Option<(usize, Vec<ProofStep>)>>,
    index: HashMap<StateKey, usize>,
    queue: VecDeque<usize>,
}

impl Search {
    fn new(root: Vec<Gate>) -> Search {
        let mut index = HashMap::new();
        index.insert(state_key(&root), 0);
        Search {
            states: vec![root],
            parent: vec![None],
            index,
            queue: VecDeque::from([0]),
        }
    }

    /// Steps from the root to state `i`.
    fn path(&self, mut i: usize) -> Vec<ProofStep> {
        let mut chunks = Vec::new();
        while let Some((p, steps)) = &self.parent[i] {
            chunks.push(steps.clone());
            i = *p;
        }
        chunks.reverse();
        chunks.concat()
    }
}

fn mode_of(steps: &[ProofStep], rules: &RuleSet) -> EqualityMode {
    steps
        .iter()
        .filter_map(|s| rules.get(&s.rule))
        .fold(EqualityMode::Exact, |m, r| m.weaker(r.mode))
}

fn assemble(qreg: usize, start: Vec<Gate>, left: Vec<ProofStep>, right_root: Vec<Gate>, right: Vec<ProofStep>, rules: &RuleSet) -> ProofTrace {
    let back = ProofTrace {
        qreg,
        start: right_root,
        steps: right,
        mode: EqualityMode::Exact,
    }
    .reversed();
    let mut steps = left;
    let mut prev = steps.last().map_or(start.clone(), |s| s.after.clone());
    for s in back.steps {
        let s = straighten(qreg, &prev, s, rules);
        prev = s.after.clone();
        steps.push(s);
    }
    let mode = mode_of(&steps, rules);
    ProofTrace {
        qreg,
        start,
        steps,
        mode,
    }
}

pub fn equiv_prove(c1: &QuantumCircuit, c2: &QuantumCircuit, cfg: &ProverConfig) -> Result<ProofResult> {
    equiv_prove_with(c1, c2, RuleSet::standard(cfg.convention), cfg.budget)
}

pub fn equiv_prove_with(c1: &QuantumCircuit, c2: &QuantumCircuit, rules: &RuleSet, budget: usize) -> Result<ProofResult> {
    if c1.qreg() != c2.qreg() {
        return Err(Error::DimensionMismatch(c1.qreg(), c2.qreg()));
    }
    let qreg = c1.qreg();
    let usable: Vec<&RewriteRule> = rules.usable().collect();
    let (n1, s1) = normalize(qreg, c1.gates().to_vec(), &usable);
    let (n2, s2) = normalize(qreg, c2.gates().to_vec(), &usable);
    if state_key(&n1) == state_key(&n2) {
        return Ok(ProofResult::Proved(assemble(qreg, c1.gates().to_vec(), s1, c2.gates().to_vec(), s2, rules)));
    }
    let max_len = n1.len().max(n2.len()) + GROWTH_SLACK;
    let mut sides = [Search::new(n1), Search::new(n2)];
    let mut explored = 2;
    while explored < budget && sides.iter().any(|s| !s.queue.is_empty()) {
        for side in 0..2 {
            let Some(i) = sides[side].queue.pop_front() else {
                continue;
            };
            let here = sides[side].states[i].clone();
            for path in neighbours(qreg, &here, &usable, max_len) {
                let state = path.last().expect("non-empty path").after.clone();
                let key = state_key(&state);
                if sides[side].index.contains_key(&key) {
                    continue;
                }
                let j = sides[side].states.len();
                sides[side].states.push(state);
                sides[side].parent.push(Some((i, path)));
                sides[side].index.insert(key.clone(), j);
                sides[side].queue.push_back(j);
                explored += 1;
                if let Some(&k) = sides[1 - side].index.get(&key) {
                    let (a, b) = if side == 0 { (j, k) } else { (k, j) };
                    let mut left = s1.clone();
                    left.extend(sides[0].path(a));
                    let mut right = s2.clone();
                    right.extend(sides[1].path(b));
                    return Ok(ProofResult::Proved(assemble(qreg, c1.gates().to_vec(), left, c2.gates().to_vec(), right, rules)));
                }
                if explored >= budget {
                    break;
                }
            }
        }
    }
    Ok(ProofResult::Unknown { explored })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(n: usize, g: Vec<Gate>) -> QuantumCircuit {
        QuantumCircuit::from_gates(n, g).unwrap()
    }

    fn prove(a: &QuantumCircuit, b: &QuantumCircuit) -> ProofTrace {
        match equiv_prove(a, b, &ProverConfig::default()).unwrap() {
            ProofResult::Proved(t) => t,
            ProofResult::Unknown { .. } => panic!("no proof"),
        }
    }

    #[test]
    fn hh_window_is_primitive() {
        let rules = RuleSet::standard(Convention::Diagram);
        assert!(equiv(&[Gate::h(0), Gate::h(0)], &[], rules));
        assert!(!equiv(&[Gate::h(0)], &[Gate::x(0)], rules));
    }

    #[test]
    fn cnot_cancellation_proof() {
        let a = circ(2, vec![Gate::cx(0, 1), Gate::cx(0, 1)]);
        let t = prove(&a, &QuantumCircuit::new(2).unwrap());
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].rule, "cx_cancel");
        t.replay(RuleSet::standard(Convention::Diagram)).unwrap();
    }

    #[test]
    fn reflexive_proof_is_symmetry() {
        let a = circ(1, vec![Gate::h(0)]);
        let t = prove(&a, &a);
        assert!(t.steps.is_empty());
        assert_eq!(t.structural_rules(), vec![StructuralRule::Symmetry]);
    }

    #[test]
    fn reversed_trace_replays() {
        let rules = RuleSet::standard(Convention::Diagram);
        let a = circ(3, vec![Gate::z(0), Gate::cx(0, 1), Gate::cx(0, 1), Gate::x(2), Gate::x(2)]);
        let b = circ(3, vec![Gate::z(0)]);
        let t = prove(&a, &b);
        t.replay(rules).unwrap();
        let r = t.reversed();
        assert_eq!(r.start, b.gates());
        assert_eq!(r.end(), a.gates());
        r.replay(rules).unwrap();
        assert!(r.structural_rules().contains(&StructuralRule::Reflexivity));
    }

    #[test]
    fn commutation_needed() {
        let a = circ(2, vec![Gate::z(0), Gate::cx(0, 1), Gate::z(0)]);
        let b = circ(2, vec![Gate::cx(0, 1)]);
        let t = prove(&a, &b);
        t.replay(RuleSet::standard(Convention::Diagram)).unwrap();
        assert_eq!(t.end(), b.gates());
    }

    #[test]
    fn inequivalent_is_unknown() {
        let a = circ(1, vec![Gate::h(0)]);
        let b = circ(1, vec![Gate::x(0)]);
        assert!(matches!(
            equiv_prove(&a, &b, &ProverConfig { budget: 200, ..ProverConfig::default() }).unwrap(),
            ProofResult::Unknown { .. }
        ));
    }

    #[test]
    fn phase_rule_weakens_mode() {
        let a = circ(1, vec![Gate::x(0), Gate::z(0)]);
        let b = circ(1, vec![Gate::y(0)]);
        assert_eq!(prove(&a, &b).mode, EqualityMode::UpToPhase);
    }
}
