use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::{Gate, GateKind, GateName, QuantumCircuit};
use crate::semantics::EqualityMode;

/// Linear angle expression `constant + sum(coeff * var)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleExpr {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl AngleExpr {
    pub fn var(v: usize) -> AngleExpr {
        AngleExpr {
            constant: 0.0,
            terms: vec![(v, 1.0)],
        }
    }

    pub fn constant(c: f64) -> AngleExpr {
        AngleExpr {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn plus(mut self, other: AngleExpr) -> AngleExpr {
        self.constant += other.constant;
        for (v, k) in other.terms {
            match self.terms.iter_mut().find(|t| t.0 == v) {
                Some(t) => t.1 += k,
                None => self.terms.push((v, k)),
            }
        }
        self
    }

    pub fn eval(&self, vals: &[f64]) -> f64 {
        self.terms.iter().fold(self.constant, |acc, &(v, k)| {
            if k == 1.0 {
                acc + vals[v]
            } else {
                acc + k * vals[v]
            }
        })
    }

    /// `Some(v)` when the expression is exactly the variable `v`.
    pub fn as_var(&self) -> Option<usize> {
        match self.terms.as_slice() {
            [(v, k)] if *k == 1.0 && self.constant == 0.0 => Some(*v),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.terms.is_empty().then_some(self.constant)
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|t| t.0)
    }
}

impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(v, k)| if k == 1.0 { format!("a{v}") } else { format!("{k}*a{v}") })
            .collect();
        if self.constant != 0.0 || parts.is_empty() {
            parts.push(crate::qasm::format_angle(self.constant));
        }
        f.write_str(&parts.join("+"))
    }
}

/// Gate template over pattern qubits and angle variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternGate {
    pub name: GateName,
    pub qubits: Vec<usize>,
    pub params: Vec<AngleExpr>,
}

impl PatternGate {
    pub fn new(name: GateName, qubits: Vec<usize>) -> PatternGate {
        PatternGate {
            name,
            qubits,
            params: Vec::new(),
        }
    }

    pub fn with_params(name: GateName, qubits: Vec<usize>, params: Vec<AngleExpr>) -> PatternGate {
        PatternGate { name, qubits, params }
    }

    /// Concrete gate under a qubit assignment and angle values.
    pub fn instantiate(&self, qubit_of: impl Fn(usize) -> usize, vals: &[f64]) -> Result<Gate> {
        let params: Vec<f64> = self.params.iter().map(|e| e.eval(vals)).collect();
        let kind = GateKind::from_parts(self.name, &params)?;
        Gate::new(kind, self.qubits.iter().map(|&q| qubit_of(q)).collect())
    }
}

impl fmt::Display for PatternGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("p{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Equation between two gate patterns over `num_qubits` pattern qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewriteRule {
    pub name: String,
    pub num_qubits: usize,
    pub num_angles: usize,
    pub lhs: Vec<PatternGate>,
    pub rhs: Vec<PatternGate>,
    pub mode: EqualityMode,
    /// Pattern qubit assumed to start (and end) in `|0>`.
    pub ancilla: Option<usize>,
    certified: bool,
}

/// A successful match of one side of a rule inside a gate list.
#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    pub matched: Vec<usize>,
    pub skipped: Vec<usize>,
    qubits: Vec<usize>,
    angles: Vec<f64>,
}

const MATCH_TOL: f64 = 1e-12;

impl RewriteRule {
    pub fn new(
        name: impl Into<String>,
        num_qubits: usize,
        num_angles: usize,
        lhs: Vec<PatternGate>,
        rhs: Vec<PatternGate>,
        mode: EqualityMode,
    ) -> Result<RewriteRule> {
        let name = name.into();
        let bad = |reason: String| Error::InvalidRule {
            name: name.clone(),
            reason,
        };
        for g in lhs.iter().chain(&rhs) {
            if g.qubits.len() != g.name.arity() {
                return Err(bad(format!("{} takes {} qubit(s)", g.name, g.name.arity())));
            }
            if g.params.len() != g.name.num_params() {
                return Err(bad(format!("{} takes {} angle(s)", g.name, g.name.num_params())));
            }
            if g.name.is_measurement() {
                return Err(bad("measurements cannot appear in rules".into()));
            }
            if let Some(&q) = g.qubits.iter().find(|&&q| q >= num_qubits) {
                return Err(bad(format!("pattern qubit {q} out of range")));
            }
            if g.qubits.len() == 2 && g.qubits[0] == g.qubits[1] {
                return Err(bad("repeated pattern qubit".into()));
            }
            if let Some(v) = g.params.iter().flat_map(|p| p.vars()).find(|&v| v >= num_angles) {
                return Err(bad(format!("angle variable {v} out of range")));
            }
        }
        if lhs.is_empty() && rhs.is_empty() {
            return Err(bad("both sides empty".into()));
        }
        Ok(RewriteRule {
            name,
            num_qubits,
            num_angles,
            lhs,
            rhs,
            mode,
            ancilla: None,
            certified: false,
        })
    }

    pub fn with_ancilla(mut self, q: usize) -> RewriteRule {
        self.ancilla = Some(q);
        self
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub(crate) fn set_certified(&mut self, ok: bool) {
        self.certified = ok;
    }

    pub fn sides(&self, dir: Direction) -> (&[PatternGate], &[PatternGate]) {
        match dir {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }

    /// The direction can be matched: its source side is non-empty, binds
    /// every angle as a plain variable or constant, and covers every
    /// qubit and variable of the target side.
    pub fn supports(&self, dir: Direction) -> bool {
        let (from, to) = self.sides(dir);
        if from.is_empty() {
            return false;
        }
        let params_ok = from
            .iter()
            .flat_map(|g| &g.params)
            .all(|p| p.as_var().is_some() || p.as_constant().is_some());
        let bound_vars: Vec<usize> = from.iter().flat_map(|g| &g.params).filter_map(|p| p.as_var()).collect();
        let bound_qubits: Vec<usize> = from.iter().flat_map(|g| g.qubits.iter().copied()).collect();
        let to_ok = to.iter().all(|g| {
            g.qubits.iter().all(|q| bound_qubits.contains(q))
                && g.params.iter().flat_map(|p| p.vars()).all(|v| bound_vars.contains(&v))
        });
        params_ok && to_ok
    }

    /// Change in gate count when applied in `dir`.
    pub fn delta(&self, dir: Direction) -> isize {
        let (from, to) = self.sides(dir);
        to.len() as isize - from.len() as isize
    }

    /// Match the source side of `dir` with its first gate at `position`.
    pub fn find_match(&self, gates: &[Gate], position: usize, dir: Direction) -> Option<Match> {
        if !self.supports(dir) {
            return None;
        }
        let (from, _) = self.sides(dir);
        let mut qubits = vec![usize::MAX; self.num_qubits];
        let mut angles = vec![f64::NAN; self.num_angles];
        let first = gates.get(position)?;
        if !bind(&from[0], first, &mut qubits, &mut angles) {
            return None;
        }
        let mut matched = vec![position];
        let mut skipped = Vec::new();
        let mut i = position + 1;
        for pg in &from[1..] {
            loop {
                let g = gates.get(i)?;
                let touches = g.qubits().iter().any(|q| qubits.contains(q));
                if !touches {
                    skipped.push(i);
                    i += 1;
                    continue;
                }
                if !bind(pg, g, &mut qubits, &mut angles) {
                    return None;
                }
                matched.push(i);
                i += 1;
                break;
            }
        }
        let used: Vec<usize> = qubits.iter().copied().filter(|&q| q != usize::MAX).collect();
        if skipped
            .iter()
            .any(|&s| gates[s].qubits().iter().any(|q| used.contains(q)))
        {
            return None;
        }
        Some(Match {
            matched,
            skipped,
            qubits,
            angles,
        })
    }

    /// Rewrite `gates` at a match.
    pub fn rewrite(&self, gates: &[Gate], m: &Match, dir: Direction) -> Result<Vec<Gate>> {
        let (_, to) = self.sides(dir);
        let start = m.matched[0];
        let end = *m.matched.last().expect("non-empty match");
        let mut out = Vec::with_capacity(gates.len() + to.len());
        out.extend_from_slice(&gates[..start]);
        for pg in to {
            out.push(pg.instantiate(|q| m.qubits[q], &m.angles)?);
        }
        out.extend(m.skipped.iter().map(|&s| gates[s].clone()));
        out.extend_from_slice(&gates[end + 1..]);
        Ok(out)
    }

    /// Positions where the source side of `dir` matches.
    pub fn matches(&self, gates: &[Gate], dir: Direction) -> Vec<usize> {
        (0..gates.len())
            .filter(|&p| self.find_match(gates, p, dir).is_some())
            .collect()
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &[PatternGate]| {
            if s.is_empty() {
                "id".to_string()
            } else {
                s.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("; ")
            }
        };
        let eq = match self.mode {
            EqualityMode::Exact => "==",
            EqualityMode::UpToPhase => "~=",
        };
        write!(f, "{}: {} {eq} {}", self.name, side(&self.lhs), side(&self.rhs))
    }
}

fn bind(pg: &PatternGate, g: &Gate, qubits: &mut [usize], angles: &mut [f64]) -> bool {
    if g.is_conditioned() || g.name() != pg.name {
        return false;
    }
    for (&p, &q) in pg.qubits.iter().zip(g.operands()) {
        if qubits[p] == usize::MAX {
            if qubits.contains(&q) {
                return false;
            }
            qubits[p] = q;
        } else if qubits[p] != q {
            return false;
        }
    }
    for (expr, val) in pg.params.iter().zip(g.kind.params()) {
        if let Some(v) = expr.as_var() {
            if angles[v].is_nan() {
                angles[v] = val;
            } else if (angles[v] - val).abs() > MATCH_TOL {
                return false;
            }
        } else if let Some(c) = expr.as_constant() {
            if (c - val).abs() > MATCH_TOL {
                return false;
            }
        } else {
            return false;
        }
    }
    true
}

/// Apply a certified rule at `position` of `c`.
pub fn apply_rule(c: &QuantumCircuit, rule: &RewriteRule, position: usize, dir: Direction) -> Result<QuantumCircuit> {
    let gates = apply_rule_gates(c.gates(), rule, position, dir)?;
    QuantumCircuit::from_parts(c.qreg(), c.cbits(), gates)
}

pub fn apply_rule_gates(gates: &[Gate], rule: &RewriteRule, position: usize, dir: Direction) -> Result<Vec<Gate>> {
    if !rule.is_certified() {
        return Err(Error::UncertifiedRule(rule.name.clone()));
    }
    if rule.ancilla.is_some() {
        return Err(Error::AncillaRule(rule.name.clone()));
    }
    let m = rule.find_match(gates, position, dir).ok_or_else(|| Error::NoMatch {
        rule: rule.name.clone(),
        position,
    })?;
    rule.rewrite(gates, &m, dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx_cancel() -> RewriteRule {
        let mut r = RewriteRule::new(
            "cx_cancel",
            2,
            0,
            vec![PatternGate::new(GateName::CX, vec![0, 1]), PatternGate::new(GateName::CX, vec![0, 1])],
            vec![],
            EqualityMode::Exact,
        )
        .unwrap();
        r.set_certified(true);
        r
    }

    #[test]
    fn matches_through_disjoint_gates() {
        let gates = vec![Gate::cx(0, 1), Gate::x(2), Gate::cx(0, 1)];
        let r = cx_cancel();
        let m = r.find_match(&gates, 0, Direction::Forward).unwrap();
        assert_eq!(m.matched, vec![0, 2]);
        assert_eq!(r.rewrite(&gates, &m, Direction::Forward).unwrap(), vec![Gate::x(2)]);
    }

    #[test]
    fn blocked_by_shared_qubit() {
        let gates = vec![Gate::cx(0, 1), Gate::x(1), Gate::cx(0, 1)];
        assert!(cx_cancel().find_match(&gates, 0, Direction::Forward).is_none());
        let rev = vec![Gate::cx(1, 0), Gate::cx(0, 1)];
        assert!(cx_cancel().find_match(&rev, 0, Direction::Forward).is_none());
    }

    #[test]
    fn empty_side_is_not_matchable() {
        assert!(!cx_cancel().supports(Direction::Backward));
    }

    #[test]
    fn uncertified_rule_is_refused() {
        let mut r = cx_cancel();
        r.set_certified(false);
        let c = QuantumCircuit::from_gates(2, vec![Gate::cx(0, 1), Gate::cx(0, 1)]).unwrap();
        assert_eq!(apply_rule(&c, &r, 0, Direction::Forward), Err(Error::UncertifiedRule("cx_cancel".into())));
    }

    #[test]
    fn conditioned_gates_never_match() {
        let gates = vec![Gate::cx(0, 1).with_c_if(1), Gate::cx(0, 1)];
        assert!(cx_cancel().find_match(&gates, 0, Direction::Forward).is_none());
    }

    #[test]
    fn linear_side_cannot_be_source() {
        let merge = RewriteRule::new(
            "u1_merge",
            1,
            2,
            vec![
                PatternGate::with_params(GateName::U1, vec![0], vec![AngleExpr::var(0)]),
                PatternGate::with_params(GateName::U1, vec![0], vec![AngleExpr::var(1)]),
            ],
            vec![PatternGate::with_params(
                GateName::U1,
                vec![0],
                vec![AngleExpr::var(0).plus(AngleExpr::var(1))],
            )],
            EqualityMode::Exact,
        )
        .unwrap();
        assert!(merge.supports(Direction::Forward));
        assert!(!merge.supports(Direction::Backward));
    }

    #[test]
    fn invalid_rules_rejected() {
        assert!(RewriteRule::new("bad", 1, 0, vec![PatternGate::new(GateName::CX, vec![0, 1])], vec![], EqualityMode::Exact).is_err());
        assert!(RewriteRule::new("bad", 2, 0, vec![PatternGate::new(GateName::CX, vec![0, 0])], vec![], EqualityMode::Exact).is_err());
    }
}
