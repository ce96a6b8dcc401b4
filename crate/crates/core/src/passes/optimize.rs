//! Single-qubit run fusion.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::primitives::replace_1q_run;
use crate::error::Result;
use crate::ir::{DAGCircuit, Gate, GateKind, GateName, NodeId};
use crate::semantics::{quat_mul, u3_from_quat, Convention, UnitQuaternion, QUAT_TOL};

pub const U_GATES: [GateName; 3] = [GateName::U1, GateName::U2, GateName::U3];

/// Which gates may join a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunGuard {
    /// Gates with `c_if` or `q_if` end the run and are left out.
    #[default]
    Unconditioned,
    /// Conditions are ignored. Only for reproducing the merge bug.
    Any,
}

/// Maximal runs of consecutive single-qubit gates of `kinds` on one wire,
/// ordered by the position of their first gate.
pub fn collect_runs(dag: &DAGCircuit, kinds: &[GateName], guard: RunGuard) -> Vec<Vec<NodeId>> {
    let member = |id: NodeId, q: usize| {
        let g = dag.gate(id);
        kinds.contains(&g.name())
            && g.operands() == [q]
            && match guard {
                RunGuard::Unconditioned => !g.is_conditioned(),
                RunGuard::Any => g.q_if != Some(q),
            }
    };
    let mut runs = Vec::new();
    for q in 0..dag.qreg() {
        let mut cur: Vec<NodeId> = Vec::new();
        for &id in dag.wire(q) {
            if member(id, q) {
                cur.push(id);
            } else if !cur.is_empty() {
                runs.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            runs.push(cur);
        }
    }
    runs.sort_by_key(|r| dag.position(r[0]));
    runs
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= QUAT_TOL
}

/// The one-gate form of a rotation: `u1` if `theta = 0`, `u2` if
/// `theta = pi/2`, `u3` otherwise, `None` for the identity.
pub fn gate_from_rotation(q: &UnitQuaternion) -> Result<Option<GateKind>> {
    if q.same_rotation(&UnitQuaternion::IDENTITY, QUAT_TOL) {
        return Ok(None);
    }
    let (theta, phi, lambda) = u3_from_quat(q)?;
    Ok(Some(if near(theta, 0.0) {
        GateKind::U1(wrap(phi + lambda))
    } else if near(theta, FRAC_PI_2) {
        GateKind::U2(wrap(phi), wrap(lambda))
    } else {
        GateKind::U3(theta, wrap(phi), wrap(lambda))
    }))
}

/// Compose a run's rotations into the product matching `conv`.
pub fn merge_run(kinds: &[GateKind], conv: Convention) -> Result<UnitQuaternion> {
    let mut acc = UnitQuaternion::IDENTITY;
    for k in kinds {
        let q = UnitQuaternion::from_gate(k)?;
        acc = match conv {
            Convention::Diagram => quat_mul(&q, &acc),
            Convention::TimeOrdered => quat_mul(&acc, &q),
        };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Optimize1qConfig {
    pub convention: Convention,
    /// Merge runs through conditioned gates, dropping the conditions. Wrong
    /// on purpose; kept so tests can show the oracle rejects it.
    pub merge_conditioned: bool,
}

/// Replace every run of two or more `u1`/`u2`/`u3` gates with one gate
/// (or nothing). Returns the number of runs rewritten.
pub fn optimize_1q_gates(dag: &mut DAGCircuit, cfg: Optimize1qConfig) -> Result<usize> {
    let guard = if cfg.merge_conditioned {
        RunGuard::Any
    } else {
        RunGuard::Unconditioned
    };
    let mut rewritten = 0;
    for run in collect_runs(dag, &U_GATES, guard) {
        if run.len() < 2 {
            continue;
        }
        let kinds: Vec<GateKind> = run.iter().map(|&id| dag.gate(id).kind).collect();
        let q = dag.gate(run[0]).operands()[0];
        let merged = gate_from_rotation(&merge_run(&kinds, cfg.convention)?)?;
        let gate = merged.map(|k| Gate::new(k, vec![q])).transpose()?;
        replace_1q_run(dag, &run, gate, cfg.convention)?;
        rewritten += 1;
    }
    Ok(rewritten)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::QuantumCircuit;
    use crate::passes::mapped::oracle_equal;
    use crate::semantics::{EqualityMode, TOL};

    fn dag(n: usize, gates: Vec<Gate>) -> DAGCircuit {
        DAGCircuit::from_circuit(&QuantumCircuit::from_gates(n, gates).unwrap())
    }

    fn names(d: &DAGCircuit, runs: &[Vec<NodeId>]) -> Vec<Vec<GateName>> {
        runs.iter().map(|r| r.iter().map(|&id| d.gate(id).name()).collect()).collect()
    }

    #[test]
    fn cx_breaks_a_run() {
        let d = dag(2, vec![Gate::u1(0.1, 0), Gate::u3(0.2, 0.3, 0.4, 0), Gate::cx(0, 1), Gate::u2(0.5, 0.6, 0)]);
        let runs = collect_runs(&d, &U_GATES, RunGuard::Unconditioned);
        assert_eq!(names(&d, &runs), vec![vec![GateName::U1, GateName::U3], vec![GateName::U2]]);
    }

    #[test]
    fn conditioned_gate_is_excluded() {
        let c = QuantumCircuit::from_parts(
            1,
            1,
            vec![Gate::u1(0.1, 0), Gate::u3(0.2, 0.3, 0.4, 0).with_c_if(1), Gate::u2(0.5, 0.6, 0)],
        )
        .unwrap();
        let d = DAGCircuit::from_circuit(&c);
        let runs = collect_runs(&d, &U_GATES, RunGuard::Unconditioned);
        assert_eq!(names(&d, &runs), vec![vec![GateName::U1], vec![GateName::U2]]);
        assert!(collect_runs(&dag(1, vec![]), &U_GATES, RunGuard::Unconditioned).is_empty());
    }

    #[test]
    fn u1_then_u3_adds_to_phi() {
        for conv in [Convention::Diagram, Convention::TimeOrdered] {
            let c = QuantumCircuit::from_gates(1, vec![Gate::u1(0.7, 0), Gate::u3(0.4, 0.2, -0.3, 0)]).unwrap();
            let mut d = DAGCircuit::from_circuit(&c);
            let cfg = Optimize1qConfig {
                convention: conv,
                ..Default::default()
            };
            optimize_1q_gates(&mut d, cfg).unwrap();
            let out = d.to_circuit();
            assert_eq!(out.len(), 1);
            assert!(oracle_equal(&c, &out, conv, EqualityMode::UpToPhase, TOL).unwrap());
            if conv == Convention::Diagram {
                let GateKind::U3(t, p, l) = out.gates()[0].kind else {
                    panic!("expected u3");
                };
                assert!(near(t, 0.4) && near(p, 0.9) && near(l, -0.3), "{t} {p} {l}");
            }
        }
    }

    #[test]
    fn h_h_as_u2_is_dropped() {
        let h = Gate::u2(0.0, PI, 0);
        let mut d = dag(1, vec![h.clone(), h]);
        assert_eq!(optimize_1q_gates(&mut d, Optimize1qConfig::default()).unwrap(), 1);
        assert!(d.is_empty());
    }

    #[test]
    fn idempotent_on_random_circuits() {
        let mut r = crate::gen::rng(3);
        for _ in 0..30 {
            let c = crate::gen::random_circuit(&mut r, 2, 12, &crate::gen::GateSet::unitary());
            let mut d = DAGCircuit::from_circuit(&c);
            optimize_1q_gates(&mut d, Optimize1qConfig::default()).unwrap();
            let once = d.to_circuit();
            assert!(once.len() <= c.len());
            assert!(oracle_equal(&c, &once, Convention::Diagram, EqualityMode::UpToPhase, TOL).unwrap());
            optimize_1q_gates(&mut d, Optimize1qConfig::default()).unwrap();
            assert_eq!(d.to_circuit(), once);
        }
    }

    #[test]
    fn force_merge_through_condition_is_wrong() {
        let c = QuantumCircuit::from_parts(
            1,
            1,
            vec![Gate::u1(0.5, 0), Gate::u3(0.3, 0.0, 0.0, 0).with_c_if(1), Gate::u1(0.2, 0)],
        )
        .unwrap();
        let mut safe = DAGCircuit::from_circuit(&c);
        optimize_1q_gates(&mut safe, Optimize1qConfig::default()).unwrap();
        assert_eq!(safe.to_circuit(), c);
        let mut forced = DAGCircuit::from_circuit(&c);
        let cfg = Optimize1qConfig {
            merge_conditioned: true,
            ..Default::default()
        };
        optimize_1q_gates(&mut forced, cfg).unwrap();
        assert!(!oracle_equal(&c, &forced.to_circuit(), Convention::Diagram, EqualityMode::UpToPhase, TOL).unwrap());
    }
}
