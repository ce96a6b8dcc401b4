//! Rewrite calculus: parametric rules, oracle certification, and the
//! rewriting prover with replayable proof traces.

mod certify;
mod corpus;
mod pattern;
mod prover;

pub use certify::{certify_pattern, Certification, CertifyConfig, RuleSet, ANGLE_GRID};
pub use corpus::standard_rules;
pub use pattern::{apply_rule, apply_rule_gates, AngleExpr, Direction, Match, PatternGate, RewriteRule};
pub use prover::{
    equiv, equiv_prove, equiv_prove_with, ProofResult, ProofStep, ProofTrace, ProverConfig, StructuralRule,
};
