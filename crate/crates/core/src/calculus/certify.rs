use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::standard_rules;
use super::pattern::{PatternGate, RewriteRule};
use crate::error::Result;
use crate::ir::{Gate, QuantumCircuit};
use crate::semantics::{apply_to_basis, denote_gates, residual, Convention, TOL};

/// Angle values tried for every variable (full product over the rule's variables).
pub const ANGLE_GRID: [f64; 8] = [0.0, PI / 7.0, -PI / 7.0, PI / 3.0, -PI / 3.0, PI / 2.0, PI, 1.2345];

#[derive(Debug, Clone, Copy)]
pub struct CertifyConfig {
    pub convention: Convention,
    pub seed: u64,
    pub random_draws: usize,
    pub tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            convention: Convention::Diagram,
            seed: crate::DEFAULT_SEED,
            random_draws: 32,
            tol: TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub rule: String,
    pub passed: bool,
    /// Largest Frobenius distance between the two sides over all samples.
    pub residual: f64,
    pub samples: usize,
    pub elapsed: Duration,
}

fn name_seed(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn assignments(k: usize, rng: &mut ChaCha8Rng, draws: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                ANGLE_GRID.iter().map(move |&a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    if k > 0 {
        for _ in 0..draws {
            out.push((0..k).map(|_| rng.gen_range(-PI..PI)).collect());
        }
    }
    out
}

fn instance(side: &[PatternGate], vals: &[f64]) -> Result<Vec<Gate>> {
    side.iter().map(|g| g.instantiate(|q| q, vals)).collect()
}

/// Check a rule against the oracle under the configured convention.
pub fn certify_pattern(rule: &RewriteRule, cfg: &CertifyConfig) -> Result<Certification> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ name_seed(&rule.name));
    let samples = assignments(rule.num_angles, &mut rng, cfg.random_draws);
    let n = rule.num_qubits;
    let mut worst: f64 = 0.0;
    for vals in &samples {
        let lhs = instance(&rule.lhs, vals)?;
        let rhs = instance(&rule.rhs, vals)?;
        let r = match rule.ancilla {
            None => {
                let a = denote_gates(n, &lhs, cfg.convention)?;
                let b = denote_gates(n, &rhs, cfg.convention)?;
                residual(a.data(), b.data(), rule.mode)
            }
            Some(anc) => {
                let lc = QuantumCircuit::from_gates(n, lhs)?;
                let rc = QuantumCircuit::from_gates(n, rhs)?;
                let mut a = Vec::new();
                let mut b = Vec::new();
                for i in (0..1usize << n).filter(|i| (i >> anc) & 1 == 0) {
                    a.extend_from_slice(apply_to_basis(&lc, i, cfg.convention)?.amplitudes());
                    b.extend_from_slice(apply_to_basis(&rc, i, cfg.convention)?.amplitudes());
                }
                residual(&a, &b, rule.mode)
            }
        };
        worst = worst.max(r);
    }
    Ok(Certification {
        rule: rule.name.clone(),
        passed: worst <= cfg.tol,
        residual: worst,
        samples: samples.len(),
        elapsed: start.elapsed(),
    })
}

/// A collection of rules with their certification outcome recorded.
#[derive(Debug, Clone)]
pub struct RuleSet {
    convention: Convention,
    rules: Vec<RewriteRule>,
    certifications: Vec<Certification>,
}

impl RuleSet {
    /// Certify each rule; the failures are kept but stay unusable.
    pub fn certify(rules: Vec<RewriteRule>, cfg: &CertifyConfig) -> Result<RuleSet> {
        let mut certified = Vec::with_capacity(rules.len());
        let mut certs = Vec::with_capacity(rules.len());
        for mut r in rules {
            let c = certify_pattern(&r, cfg)?;
            r.set_certified(c.passed);
            certified.push(r);
            certs.push(c);
        }
        Ok(RuleSet {
            convention: cfg.convention,
            rules: certified,
            certifications: certs,
        })
    }

    /// The certified standard corpus, computed once per convention.
    pub fn standard(conv: Convention) -> &'static RuleSet {
        static DIAGRAM: OnceLock<RuleSet> = OnceLock::new();
        static TIME: OnceLock<RuleSet> = OnceLock::new();
        let cell = match conv {
            Convention::Diagram => &DIAGRAM,
            Convention::TimeOrdered => &TIME,
        };
        cell.get_or_init(|| {
            let cfg = CertifyConfig {
                convention: conv,
                ..CertifyConfig::default()
            };
            RuleSet::certify(standard_rules(conv), &cfg).expect("corpus instantiates")
        })
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn certifications(&self) -> &[Certification] {
        &self.certifications
    }

    pub fn get(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Certified rules that hold on the full space (usable for rewriting).
    pub fn usable(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rules.iter().filter(|r| r.is_certified() && r.ancilla.is_none())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::pattern::PatternGate;
    use crate::ir::GateName;
    use crate::semantics::EqualityMode;

    #[test]
    fn whole_corpus_certifies_in_both_conventions() {
        for conv in [Convention::Diagram, Convention::TimeOrdered] {
            let set = RuleSet::standard(conv);
            for c in set.certifications() {
                assert!(c.passed, "{} failed with residual {}", c.rule, c.residual);
            }
        }
    }

    #[test]
    fn bogus_rule_rejected_with_residual_two() {
        let bogus = RewriteRule::new(
            "x_is_z",
            1,
            0,
            vec![PatternGate::new(GateName::X, vec![0])],
            vec![PatternGate::new(GateName::Z, vec![0])],
            EqualityMode::Exact,
        )
        .unwrap();
        let c = certify_pattern(&bogus, &CertifyConfig::default()).unwrap();
        assert!(!c.passed);
        assert!((c.residual - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_convention_merge_fails() {
        let diagram_rules = standard_rules(Convention::Diagram);
        let merge = diagram_rules.iter().find(|r| r.name == "u1_u3_merge").unwrap();
        let cfg = CertifyConfig {
            convention: Convention::TimeOrdered,
            ..CertifyConfig::default()
        };
        assert!(!certify_pattern(merge, &cfg).unwrap().passed);
    }

    #[test]
    fn ancilla_rule_fails_without_ancilla_assumption() {
        let mut r = RuleSet::standard(Convention::Diagram).get("bridge_ancilla").unwrap().clone();
        assert!(r.is_certified());
        r.ancilla = None;
        assert!(!certify_pattern(&r, &CertifyConfig::default()).unwrap().passed);
    }

    #[test]
    fn grid_is_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(assignments(2, &mut rng, 32).len(), 64 + 32);
        assert_eq!(assignments(0, &mut rng, 32).len(), 1);
    }
}
