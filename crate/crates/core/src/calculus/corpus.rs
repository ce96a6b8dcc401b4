//! The standard rule corpus.
//!
//! Rules are stated for a given composition convention; the two merge rules
//! that place a `u1` next to a `u3` depend on it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::pattern::{AngleExpr, PatternGate, RewriteRule};
use crate::ir::GateName;
use crate::semantics::{Convention, EqualityMode};

fn g(name: GateName, qubits: &[usize]) -> PatternGate {
    PatternGate::new(name, qubits.to_vec())
}

fn gp(name: GateName, qubits: &[usize], params: Vec<AngleExpr>) -> PatternGate {
    PatternGate::with_params(name, qubits.to_vec(), params)
}

fn v(i: usize) -> AngleExpr {
    AngleExpr::var(i)
}

fn k(c: f64) -> AngleExpr {
    AngleExpr::constant(c)
}

fn rule(name: &str, nq: usize, na: usize, lhs: Vec<PatternGate>, rhs: Vec<PatternGate>, mode: EqualityMode) -> RewriteRule {
    RewriteRule::new(name, nq, na, lhs, rhs, mode).expect("corpus rules are well-formed")
}

fn exact(name: &str, nq: usize, na: usize, lhs: Vec<PatternGate>, rhs: Vec<PatternGate>) -> RewriteRule {
    rule(name, nq, na, lhs, rhs, EqualityMode::Exact)
}

/// Uncertified corpus for `conv`. Run it through certification before use.
pub fn standard_rules(conv: Convention) -> Vec<RewriteRule> {
    use GateName::*;
    let mut rules = Vec::new();

    for (name, gate) in [
        ("x_cancel", X),
        ("y_cancel", Y),
        ("z_cancel", Z),
        ("h_cancel", H),
    ] {
        rules.push(exact(name, 1, 0, vec![g(gate, &[0]), g(gate, &[0])], vec![]));
    }
    for (name, gate) in [("cx_cancel", CX), ("cy_cancel", CY), ("cz_cancel", CZ), ("swap_cancel", Swap)] {
        rules.push(exact(name, 2, 0, vec![g(gate, &[0, 1]), g(gate, &[0, 1])], vec![]));
    }

    rules.push(exact(
        "swap_decompose",
        2,
        0,
        vec![g(Swap, &[0, 1])],
        vec![g(CX, &[0, 1]), g(CX, &[1, 0]), g(CX, &[0, 1])],
    ));
    rules.push(exact(
        "bridge",
        3,
        0,
        vec![g(CX, &[0, 1]), g(CX, &[1, 2]), g(CX, &[0, 1]), g(CX, &[1, 2])],
        vec![g(CX, &[0, 2])],
    ));
    rules.push(
        exact(
            "bridge_ancilla",
            3,
            0,
            vec![g(CX, &[0, 1]), g(CX, &[1, 2]), g(CX, &[0, 1])],
            vec![g(CX, &[0, 2])],
        )
        .with_ancilla(1),
    );

    rules.push(exact(
        "z_commute_cx_control",
        2,
        0,
        vec![g(Z, &[0]), g(CX, &[0, 1])],
        vec![g(CX, &[0, 1]), g(Z, &[0])],
    ));
    rules.push(exact(
        "u1_commute_cx_control",
        2,
        1,
        vec![gp(U1, &[0], vec![v(0)]), g(CX, &[0, 1])],
        vec![g(CX, &[0, 1]), gp(U1, &[0], vec![v(0)])],
    ));
    rules.push(exact(
        "x_commute_cx_target",
        2,
        0,
        vec![g(X, &[1]), g(CX, &[0, 1])],
        vec![g(CX, &[0, 1]), g(X, &[1])],
    ));
    rules.push(exact(
        "cx_shared_control",
        3,
        0,
        vec![g(CX, &[0, 1]), g(CX, &[0, 2])],
        vec![g(CX, &[0, 2]), g(CX, &[0, 1])],
    ));
    rules.push(exact(
        "cx_shared_target",
        3,
        0,
        vec![g(CX, &[0, 2]), g(CX, &[1, 2])],
        vec![g(CX, &[1, 2]), g(CX, &[0, 2])],
    ));

    rules.push(exact(
        "swap_relabel_1q",
        2,
        3,
        vec![g(Swap, &[0, 1]), gp(U3, &[0], vec![v(0), v(1), v(2)])],
        vec![gp(U3, &[1], vec![v(0), v(1), v(2)]), g(Swap, &[0, 1])],
    ));
    rules.push(exact(
        "swap_relabel_cx",
        3,
        0,
        vec![g(Swap, &[0, 1]), g(CX, &[0, 2])],
        vec![g(CX, &[1, 2]), g(Swap, &[0, 1])],
    ));

    rules.push(exact(
        "u1_merge",
        1,
        2,
        vec![gp(U1, &[0], vec![v(0)]), gp(U1, &[0], vec![v(1)])],
        vec![gp(U1, &[0], vec![v(0).plus(v(1))])],
    ));
    // u1 before u3 shifts phi under the diagram convention, lambda under time order.
    let (first, second) = match conv {
        Convention::Diagram => (1, 2),
        Convention::TimeOrdered => (2, 1),
    };
    let shifted = |slot: usize| {
        let mut ps = vec![v(1), v(2), v(3)];
        ps[slot] = ps[slot].clone().plus(v(0));
        gp(U3, &[0], ps)
    };
    rules.push(exact(
        "u1_u3_merge",
        1,
        4,
        vec![gp(U1, &[0], vec![v(0)]), gp(U3, &[0], vec![v(1), v(2), v(3)])],
        vec![shifted(first)],
    ));
    rules.push(exact(
        "u3_u1_merge",
        1,
        4,
        vec![gp(U3, &[0], vec![v(1), v(2), v(3)]), gp(U1, &[0], vec![v(0)])],
        vec![shifted(second)],
    ));

    rules.push(exact("z_as_u1", 1, 0, vec![g(Z, &[0])], vec![gp(U1, &[0], vec![k(PI)])]));
    rules.push(exact("t_as_u1", 1, 0, vec![g(T, &[0])], vec![gp(U1, &[0], vec![k(FRAC_PI_4)])]));
    rules.push(exact("h_as_u2", 1, 0, vec![g(H, &[0])], vec![gp(U2, &[0], vec![k(0.0), k(PI)])]));
    rules.push(exact("x_as_u3", 1, 0, vec![g(X, &[0])], vec![gp(U3, &[0], vec![k(PI), k(0.0), k(PI)])]));
    rules.push(exact(
        "y_as_u3",
        1,
        0,
        vec![g(Y, &[0])],
        vec![gp(U3, &[0], vec![k(PI), k(FRAC_PI_2), k(FRAC_PI_2)])],
    ));
    rules.push(rule(
        "xz_is_y",
        1,
        0,
        vec![g(X, &[0]), g(Z, &[0])],
        vec![g(Y, &[0])],
        EqualityMode::UpToPhase,
    ));
    rules
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_large_enough_and_uniquely_named() {
        let rules = standard_rules(Convention::Diagram);
        assert!(rules.len() >= 14);
        let mut names: Vec<&str> = rules.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), rules.len());
    }

    #[test]
    fn merge_side_depends_on_convention() {
        let d = standard_rules(Convention::Diagram);
        let t = standard_rules(Convention::TimeOrdered);
        let find = |rs: &[RewriteRule]| rs.iter().find(|r| r.name == "u1_u3_merge").unwrap().rhs.clone();
        assert_ne!(find(&d), find(&t));
    }
}
