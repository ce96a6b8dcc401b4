//! Verification campaigns with deterministic, line-oriented reports.
//!
//! Each section runs one campaign and renders as a block of lines closed by
//! `RESULT <section> PASS|FAIL`. With timings off, two runs with the same
//! configuration render byte-identical text.

mod calculus;
pub mod fixtures;
mod mutants;
mod optimize;
pub mod refine;
mod routing;

use std::time::Instant;

pub use mutants::{mutants, Detection, Mutant};

use crate::contracts::Registry;
use crate::error::{Error, Result};
use crate::semantics::{Convention, TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub convention: Convention,
    pub tol: f64,
    /// Random circuits per device in the routing campaigns.
    pub cases: usize,
    /// Random rewrite chains in the calculus campaign.
    pub chains: usize,
    /// Random circuits for the DAG refinement check.
    pub refine_cases: usize,
    /// Random states for the Bloch and quaternion refinement checks.
    pub bloch_cases: usize,
    /// Prover search budget.
    pub budget: usize,
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: crate::DEFAULT_SEED,
            convention: Convention::Diagram,
            tol: TOL,
            cases: 500,
            chains: 1000,
            refine_cases: 200,
            bloch_cases: 100,
            budget: 10_000,
            timings: true,
        }
    }
}

impl SuiteConfig {
    /// Per-campaign seed, so sections do not depend on which ran before.
    fn seed_for(&self, section: &str) -> u64 {
        section.bytes().fold(self.seed, |h, b| h.rotate_left(5) ^ b as u64)
    }

    fn time(&self, start: Instant) -> String {
        if self.timings {
            start.elapsed().as_millis().to_string()
        } else {
            "-".into()
        }
    }
}

/// Configuration plus the contracts verified so far.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: SuiteConfig,
    pub registry: Registry,
}

impl Context {
    pub fn new(cfg: SuiteConfig) -> Context {
        Context {
            cfg,
            registry: Registry::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub name: &'static str,
    pub lines: Vec<String>,
    failures: Vec<String>,
}

impl Section {
    fn new(name: &'static str) -> Section {
        Section {
            name,
            lines: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn line(&mut self, l: impl Into<String>) {
        self.lines.push(l.into());
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn render(&self) -> String {
        let mut out = format!("== {}\n", self.name);
        for l in &self.lines {
            for part in l.lines() {
                out.push_str(part);
                out.push('\n');
            }
        }
        for f in &self.failures {
            out.push_str(&format!("FAIL {f}\n"));
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("RESULT {} {verdict}\n", self.name));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub sections: Vec<Section>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn render(&self) -> String {
        self.sections.iter().map(Section::render).collect()
    }
}

pub const SECTIONS: [&str; 13] = [
    "patterns",
    "chains",
    "device",
    "basic-swap",
    "validation",
    "lookahead",
    "ladder-stall",
    "blocks",
    "conditioned-merge",
    "commutation",
    "crossed-cx",
    "refinement",
    "mutants",
];

pub fn run_section(name: &str, ctx: &mut Context) -> Result<Section> {
    match name {
        "patterns" => calculus::patterns(ctx),
        "chains" => calculus::chains(ctx),
        "device" => routing::device(ctx),
        "basic-swap" => routing::basic_swap_campaign(ctx),
        "validation" => routing::validation(ctx),
        "lookahead" => routing::lookahead_campaign(ctx),
        "ladder-stall" => routing::ladder_stall(ctx),
        "blocks" => optimize::blocks(ctx),
        "conditioned-merge" => optimize::conditioned_merge(ctx),
        "commutation" => optimize::commutation(ctx),
        "crossed-cx" => optimize::crossed_cx(ctx),
        "refinement" => refine::refinement(ctx),
        "mutants" => mutants::mutant_campaign(ctx),
        other => Err(Error::Precondition(format!("unknown suite {other}"))),
    }
}

/// The section a pass name is checked by, optionally narrowed by a suite name.
pub fn section_for_pass(pass: &str, suite: Option<&str>) -> Result<&'static str> {
    let s = match (pass, suite) {
        ("lookahead_swap", Some("ladder-stall")) => "ladder-stall",
        ("commutative_cancellation", Some("crossed-cx")) => "crossed-cx",
        (_, Some(s)) => return Err(Error::Precondition(format!("no suite {s} for pass {pass}"))),
        ("basic_swap", None) => "basic-swap",
        ("lookahead_swap", None) => "lookahead",
        ("optimize_1q_gates", None) => "conditioned-merge",
        ("commutation_analysis" | "commutative_cancellation", None) => "commutation",
        ("collect_2q_blocks", None) => "blocks",
        (other, None) => return Err(Error::UnknownPass(other.to_string())),
    };
    Ok(s)
}

/// Every section in order.
pub fn run_suite(cfg: SuiteConfig) -> Result<SuiteReport> {
    let mut ctx = Context::new(cfg);
    let sections = SECTIONS.iter().map(|s| run_section(s, &mut ctx)).collect::<Result<_>>()?;
    Ok(SuiteReport { sections })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_section_name_dispatches() {
        for p in crate::passes::PASS_NAMES {
            assert!(section_for_pass(p, None).is_ok(), "{p}");
        }
        assert_eq!(section_for_pass("lookahead_swap", Some("ladder-stall")).unwrap(), "ladder-stall");
        assert!(section_for_pass("basic_swap", Some("ladder-stall")).is_err());
        assert!(run_section("nope", &mut Context::new(SuiteConfig::default())).is_err());
    }

    #[test]
    fn render_closes_with_result() {
        let mut s = Section::new("x");
        s.line("a\nb");
        assert_eq!(s.render(), "== x\na\nb\nRESULT x PASS\n");
        s.check(false, "broken");
        assert!(s.render().ends_with("FAIL broken\nRESULT x FAIL\n"));
    }
}
