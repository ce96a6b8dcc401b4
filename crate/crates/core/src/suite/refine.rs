use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Context, Section, SuiteConfig};
use crate::device::CouplingMap;
use crate::error::{Error, Result};
use crate::gen::{self, GateSet};
use crate::ir::DAGCircuit;
use crate::passes::{DagRepresentation, PASS_NAMES};
use crate::semantics::refinement::{
    refinement_check, BlochOp, BlochRegister, BlochRepresentation, QuatGate, QuatOp, QuaternionRepresentation,
    RefinementReport, RefinementVerdict,
};
use crate::semantics::{quat_from_u3, u3_matrix, BlochState, StateVector, Unitary};

const BLOCH_QUBITS: usize = 2;
const STEPS: usize = 8;

fn verdict_line(s: &mut Section, label: &str, r: &RefinementReport, want_pass: bool) {
    let detail = match &r.verdict {
        RefinementVerdict::Pass => String::new(),
        RefinementVerdict::Fail(cex) => format!(" sample={} step={} transform={}", cex.sample, cex.step, cex.transform),
        RefinementVerdict::RejectedByContract(why) => format!(" rejected={}", why.join("; ")),
    };
    s.line(format!("REFINE {label} {} checked={}{detail}", r.verdict.label(), r.checked));
    let ok = match r.verdict {
        RefinementVerdict::Pass => want_pass,
        RefinementVerdict::Fail(_) => !want_pass,
        RefinementVerdict::RejectedByContract(_) => false,
    };
    s.check(ok, format!("{label}: unexpected {}", r.verdict.label()));
}

fn bloch_state(rng: &mut ChaCha8Rng) -> BlochState {
    BlochState::new(rng.gen_range(0.2..PI - 0.2), rng.gen_range(-PI..PI))
}

fn phased(reg: &BlochRegister, gamma: f64) -> StateVector {
    reg.to_state_vector().scale(C64::from_polar(1.0, gamma))
}

fn bloch_samples(rng: &mut ChaCha8Rng, n: usize, qubits: usize) -> Vec<(BlochRegister, StateVector)> {
    (0..n)
        .map(|_| {
            let reg = BlochRegister::Product((0..qubits).map(|_| bloch_state(rng)).collect());
            let s = phased(&reg, rng.gen_range(-PI..PI));
            (reg, s)
        })
        .collect()
}

fn rotation(rng: &mut ChaCha8Rng, qubits: usize) -> BlochOp {
    BlochOp::Rotate {
        qubit: rng.gen_range(0..qubits),
        theta: gen::angle(rng),
        phi: gen::angle(rng),
        lambda: gen::angle(rng),
    }
}

/// Representations `refine-check` accepts.
pub const REPRESENTATIONS: [&str; 4] = ["dag", "bloch", "quaternion", "bloch-multiqubit"];

fn dag(cfg: &SuiteConfig, s: &mut Section) -> Result<()> {
    let mut rng = gen::rng(cfg.seed_for("refinement/dag"));
    let rep = DagRepresentation {
        cmap: CouplingMap::line(4),
        convention: cfg.convention,
    };
    let samples: Vec<_> = (0..cfg.refine_cases)
        .map(|_| {
            let c = gen::random_small_circuit(&mut rng, 4, 12, &GateSet::unitary());
            (DAGCircuit::from_circuit(&c), c)
        })
        .collect();
    let passes: Vec<String> = PASS_NAMES.iter().map(|p| p.to_string()).collect();
    for p in &passes {
        let r = refinement_check(&rep, std::slice::from_ref(p), &samples)?;
        verdict_line(s, &format!("dag/{p}"), &r, true);
    }
    let r = refinement_check(&rep, &passes, &samples)?;
    verdict_line(s, "dag/pipeline", &r, true);
    Ok(())
}

fn bloch(cfg: &SuiteConfig, s: &mut Section) -> Result<()> {
    let mut rng = gen::rng(cfg.seed_for("refinement/bloch"));
    let rep = BlochRepresentation {
        single_qubit_contract: true,
    };
    let samples = bloch_samples(&mut rng, cfg.bloch_cases, BLOCH_QUBITS);
    let ops: Vec<BlochOp> = (0..STEPS).map(|_| rotation(&mut rng, BLOCH_QUBITS)).collect();
    let r = refinement_check(&rep, &ops, &samples)?;
    verdict_line(s, "bloch/rotations", &r, true);
    Ok(())
}

fn quaternion(cfg: &SuiteConfig, s: &mut Section) -> Result<()> {
    let mut rng = gen::rng(cfg.seed_for("refinement/quaternion"));
    let rep = QuaternionRepresentation {
        single_qubit_contract: true,
    };
    let samples: Vec<(QuatGate, Unitary)> = (0..cfg.bloch_cases)
        .map(|_| {
            let (t, p, l) = (gen::angle(&mut rng), gen::angle(&mut rng), gen::angle(&mut rng));
            let phase = C64::from_polar(1.0, rng.gen_range(-PI..PI));
            let m = u3_matrix(t, p, l).map(|x| x * phase);
            let g = QuatGate {
                q: quat_from_u3(t, p, l),
                controlled: false,
            };
            (g, Unitary::from_row_major(1, m.to_vec()).expect("2x2"))
        })
        .collect();
    let ops: Vec<QuatOp> = (0..STEPS)
        .map(|_| QuatOp::Compose {
            theta: gen::angle(&mut rng),
            phi: gen::angle(&mut rng),
            lambda: gen::angle(&mut rng),
        })
        .collect();
    let r = refinement_check(&rep, &ops, &samples)?;
    verdict_line(s, "quaternion/rotations", &r, true);
    Ok(())
}

/// Multi-qubit operations on the Bloch representation; this must fail.
fn bloch_multiqubit(cfg: &SuiteConfig, s: &mut Section) -> Result<()> {
    let mut rng = gen::rng(cfg.seed_for("refinement/bloch-multiqubit"));
    let rep = BlochRepresentation {
        single_qubit_contract: false,
    };
    let samples = bloch_samples(&mut rng, cfg.bloch_cases, 1);
    let mut ops: Vec<BlochOp> = (0..3).map(|_| rotation(&mut rng, 1)).collect();
    ops.push(BlochOp::Tensor {
        state: BlochState::new(0.7, 0.1),
        gamma: 0.5,
    });
    ops.push(BlochOp::Cx { control: 0, target: 1 });
    let r = refinement_check(&rep, &ops, &samples)?;
    verdict_line(s, "bloch/tensor+cx", &r, false);
    Ok(())
}

/// The refinement checks for one representation, as their own section.
pub fn refine_representation(name: &str, cfg: &SuiteConfig) -> Result<Section> {
    let mut s = Section::new("refinement");
    match name {
        "dag" => dag(cfg, &mut s)?,
        "bloch" => bloch(cfg, &mut s)?,
        "quaternion" => quaternion(cfg, &mut s)?,
        "bloch-multiqubit" => bloch_multiqubit(cfg, &mut s)?,
        other => {
            return Err(Error::Precondition(format!(
                "unknown representation {other}, expected one of {}",
                REPRESENTATIONS.join(", ")
            )))
        }
    }
    Ok(s)
}

pub(super) fn refinement(ctx: &mut Context) -> Result<Section> {
    let mut s = Section::new("refinement");
    dag(&ctx.cfg, &mut s)?;
    bloch(&ctx.cfg, &mut s)?;
    quaternion(&ctx.cfg, &mut s)?;
    bloch_multiqubit(&ctx.cfg, &mut s)?;
    Ok(s)
}
