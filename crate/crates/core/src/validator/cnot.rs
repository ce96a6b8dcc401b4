use std::f64::consts::TAU;

use super::{Move, Residual, Status, ValidationVerdict};
use crate::calculus::{equiv_prove, ProofResult, ProverConfig};
use crate::error::{Error, Result};
use crate::ir::{Gate, GateKind, QuantumCircuit};
use crate::passes::{commutes, CancelEvent, CancelLog};
use crate::semantics::TOL;

fn malformed(what: impl std::fmt::Display) -> Error {
    Error::Precondition(format!("malformed log: {what}"))
}

fn insert(gates: &mut Vec<Gate>, at: usize, g: Gate) -> Result<()> {
    if at > gates.len() {
        return Err(malformed(format!("position {at} past end {}", gates.len())));
    }
    gates.insert(at, g);
    Ok(())
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d <= TOL || TAU - d <= TOL
}

/// First gate strictly between `lo` and `hi` that touches `g`'s qubits and
/// does not commute with it.
fn blocker(gates: &[Gate], lo: usize, hi: usize, g: &Gate) -> Option<usize> {
    (lo + 1..hi).find(|&i| gates[i].shares_qubit(g) && !commutes(&gates[i], g))
}

enum Replay {
    Done(Vec<Gate>),
    Refuted(String, Vec<Gate>),
}

fn replay(output: &QuantumCircuit, log: &CancelLog, trace: &mut Vec<Move>) -> Result<Replay> {
    let mut gates = output.gates().to_vec();
    for ev in log.iter().rev() {
        match ev {
            CancelEvent::Pair { gate, first, second } => {
                if first >= second {
                    return Err(malformed(format!("pair positions {first} >= {second}")));
                }
                insert(&mut gates, *first, gate.clone())?;
                insert(&mut gates, *second, gate.clone())?;
                trace.push(Move::Reinsert {
                    gate: gate.clone(),
                    first: *first,
                    second: *second,
                });
                if !gate.kind.is_self_inverse() || gate.is_conditioned() {
                    return Ok(Replay::Refuted(format!("{} is not an unconditioned self-inverse gate", gate.name()), gates));
                }
                if let Some(b) = blocker(&gates, *first, *second, gate) {
                    return Ok(Replay::Refuted(format!("gate at {b} does not commute with the cancelled pair"), gates));
                }
            }
            CancelEvent::Merge { qubit, originals, merged } => {
                if originals.is_empty() || originals.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(malformed("merge originals out of order"));
                }
                if let Some((at, m)) = merged {
                    if gates.get(*at) != Some(m) {
                        return Err(malformed(format!("merged gate not found at {at}")));
                    }
                    gates.remove(*at);
                }
                for (at, g) in originals {
                    insert(&mut gates, *at, g.clone())?;
                }
                trace.push(Move::Split {
                    qubit: *qubit,
                    parts: originals.len(),
                });
                let mut sum = 0.0;
                for (_, g) in originals {
                    match g.kind {
                        GateKind::U1(l) if g.operands() == [*qubit] && !g.is_conditioned() => sum += l,
                        _ => return Ok(Replay::Refuted(format!("merge part {g} is not an unconditioned u1 on Q{qubit}"), gates)),
                    }
                }
                let target = match merged {
                    Some((_, m)) => match m.kind {
                        GateKind::U1(l) => l,
                        _ => return Ok(Replay::Refuted(format!("merged gate {m} is not u1"), gates)),
                    },
                    None => 0.0,
                };
                if !same_angle(sum, target) {
                    return Ok(Replay::Refuted(format!("angles sum to {sum}, merged gate has {target}"), gates));
                }
                let probe = Gate::u1(0.0, *qubit);
                let (lo, hi) = (originals[0].0, originals[originals.len() - 1].0);
                let moved = (lo + 1..hi).filter(|i| !originals.iter().any(|(p, _)| p == i));
                if let Some(b) = moved.into_iter().find(|&i| gates[i].shares_qubit(&probe) && !commutes(&gates[i], &probe)) {
                    return Ok(Replay::Refuted(format!("gate at {b} does not commute with u1 on Q{qubit}"), gates));
                }
            }
        }
    }
    Ok(Replay::Done(gates))
}

/// Undo a cancellation run. With its log, every event is replayed backwards
/// and its side conditions re-checked. Without one, the prover searches for
/// a rewrite proof and reports INCONCLUSIVE when it runs out of budget.
pub fn validate_cnot_cancellation(
    input: &QuantumCircuit,
    output: &QuantumCircuit,
    log: Option<&CancelLog>,
    prover: &ProverConfig,
) -> Result<ValidationVerdict> {
    if input.qreg() != output.qreg() {
        return Err(Error::DimensionMismatch(input.qreg(), output.qreg()));
    }
    let mut trace = Vec::new();
    let Some(log) = log else {
        if input.gates() == output.gates() {
            return Ok(ValidationVerdict::valid(trace));
        }
        return Ok(match equiv_prove(output, input, prover)? {
            ProofResult::Proved(p) => {
                trace.extend(p.steps.iter().map(|s| Move::Rule {
                    rule: s.rule.clone(),
                    position: s.position,
                }));
                ValidationVerdict::valid(trace)
            }
            ProofResult::Unknown { explored } => ValidationVerdict::with(
                Status::Inconclusive,
                trace,
                Residual::new(format!("no proof within budget ({explored} circuits explored)"), input.gates(), output.gates()),
            ),
        });
    };
    match replay(output, log, &mut trace)? {
        Replay::Refuted(reason, gates) => Ok(ValidationVerdict::with(Status::Invalid, trace, Residual::new(reason, input.gates(), &gates))),
        Replay::Done(gates) => {
            let back = QuantumCircuit::from_parts(input.qreg(), input.cbits().max(output.cbits()), gates)?;
            if back.gates() == input.gates() || back.dag_equivalent(input) {
                Ok(ValidationVerdict::valid(trace))
            } else {
                let r = Residual::new("replayed circuit differs from the input", input.gates(), back.gates());
                Ok(ValidationVerdict::with(Status::Invalid, trace, r))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::DAGCircuit;
    use crate::passes::{commutation_analysis, commutative_cancellation, CancelConfig, Grouping};

    fn crossed() -> QuantumCircuit {
        QuantumCircuit::from_gates(
            2,
            vec![Gate::cx(1, 0), Gate::z(0), Gate::x(1), Gate::cx(0, 1), Gate::z(0), Gate::cx(0, 1), Gate::cx(1, 0)],
        )
        .unwrap()
    }

    fn run(c: &QuantumCircuit, g: Grouping) -> (QuantumCircuit, CancelLog) {
        let mut d = DAGCircuit::from_circuit(c);
        let set = commutation_analysis(&d, g);
        let log = commutative_cancellation(&mut d, &set, CancelConfig::default()).unwrap();
        (d.to_circuit(), log)
    }

    #[test]
    fn logged_cancellation_is_valid() {
        let c = crossed();
        let (out, log) = run(&c, Grouping::AllPairs);
        let v = validate_cnot_cancellation(&c, &out, Some(&log), &ProverConfig::default()).unwrap();
        assert_eq!(v.status, Status::Valid, "{}", v.render());
        assert_eq!(v.trace.len(), log.len());
    }

    #[test]
    fn u1_merges_replay() {
        let c = QuantumCircuit::from_gates(2, vec![Gate::u1(0.3, 0), Gate::cx(0, 1), Gate::u1(0.4, 0), Gate::h(1)]).unwrap();
        let (out, log) = run(&c, Grouping::AllPairs);
        assert_eq!(out.len(), 3);
        let v = validate_cnot_cancellation(&c, &out, Some(&log), &ProverConfig::default()).unwrap();
        assert_eq!(v.status, Status::Valid, "{}", v.render());
    }

    #[test]
    fn without_log_falls_back_to_prover() {
        let c = QuantumCircuit::from_gates(2, vec![Gate::cx(0, 1), Gate::cx(0, 1), Gate::h(0)]).unwrap();
        let out = QuantumCircuit::from_gates(2, vec![Gate::h(0)]).unwrap();
        let v = validate_cnot_cancellation(&c, &out, None, &ProverConfig::default()).unwrap();
        assert_eq!(v.status, Status::Valid, "{}", v.render());
        assert!(!v.trace.is_empty());
    }

    #[test]
    fn chain_grouping_run_is_invalid() {
        let c = QuantumCircuit::from_gates(1, vec![Gate::h(0), Gate::u1(0.0, 0), Gate::z(0), Gate::u1(0.0, 0), Gate::h(0)])
            .unwrap();
        let (out, log) = run(&c, Grouping::Chain);
        assert!(!log.is_empty());
        let v = validate_cnot_cancellation(&c, &out, Some(&log), &ProverConfig::default()).unwrap();
        assert_eq!(v.status, Status::Invalid, "{}", v.render());
    }

    #[test]
    fn malformed_log_is_an_error() {
        let c = crossed();
        let log = vec![CancelEvent::Pair {
            gate: Gate::z(0),
            first: 40,
            second: 41,
        }];
        assert!(validate_cnot_cancellation(&c, &c, Some(&log), &ProverConfig::default()).is_err());
    }

    #[test]
    fn dropped_gate_is_invalid() {
        let c = crossed();
        let (out, log) = run(&c, Grouping::AllPairs);
        let mut gates = out.into_gates();
        gates.remove(1);
        let bad = QuantumCircuit::from_gates(2, gates).unwrap();
        let v = validate_cnot_cancellation(&c, &bad, Some(&log), &ProverConfig::default());
        assert!(v.map_or(true, |v| v.status == Status::Invalid));
    }
}
