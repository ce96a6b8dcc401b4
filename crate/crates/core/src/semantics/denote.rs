use serde::{Deserialize, Serialize};

use super::gates::gate_matrix;
use super::matrix::{StateVector, Unitary};
use crate::error::{Error, Result};
use crate::ir::{Gate, QuantumCircuit};

/// Largest register the dense oracle accepts.
pub const ORACLE_CAP: usize = 10;

/// How sequential composition maps to matrix products.
///
/// `Diagram`: `[[C1; C2]] = [[C1]] * [[C2]]` (states read as row vectors).
/// `TimeOrdered`: `[[C1; C2]] = [[C2]] * [[C1]]` (column-vector convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Convention {
    #[default]
    Diagram,
    TimeOrdered,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Diagram => "diagram",
            Convention::TimeOrdered => "time-ordered",
        }
    }
}

pub fn denote(c: &QuantumCircuit) -> Result<Unitary> {
    denote_with(c, Convention::default())
}

pub fn denote_with(c: &QuantumCircuit, conv: Convention) -> Result<Unitary> {
    denote_gates(c.qreg(), c.gates(), conv)
}

/// Unitary of an unconditioned gate sequence on `n` qubits.
pub fn denote_gates(n: usize, gates: &[Gate], conv: Convention) -> Result<Unitary> {
    check_cap(n)?;
    let mut u = Unitary::identity(n);
    for g in gates {
        if g.is_conditioned() {
            return Err(Error::NonUnitary(format!("conditioned {}", g.name())));
        }
        let m = gate_matrix(&g.kind)?;
        apply(&mut u, &m, g.operands(), conv, |_| true);
    }
    Ok(u)
}

/// Unitary of a circuit whose guards are lowered to controls.
///
/// Classical bit `i` becomes qubit `qreg + i`; `if(c==V)` fires on the basis
/// states whose classical bits spell `V`, `qif(q)` on those with bit `q` set.
pub fn denote_lowered(c: &QuantumCircuit, conv: Convention) -> Result<Unitary> {
    let n = c.qreg() + c.cbits();
    check_cap(n)?;
    let (qreg, cbits) = (c.qreg(), c.cbits());
    let mut u = Unitary::identity(n);
    for g in c.gates() {
        let m = gate_matrix(&g.kind)?;
        let c_if = g.c_if.map(|x| x.value);
        let q_if = g.q_if;
        let fires = move |b: usize| {
            let classical_ok = c_if.is_none_or(|v| ((b >> qreg) & ((1 << cbits) - 1)) as u64 == v);
            let quantum_ok = q_if.is_none_or(|q| (b >> q) & 1 == 1);
            classical_ok && quantum_ok
        };
        apply(&mut u, &m, g.operands(), conv, fires);
    }
    Ok(u)
}

/// The image of basis state `index`: row `index` under `Diagram`, column under `TimeOrdered`.
pub fn apply_to_basis(c: &QuantumCircuit, index: usize, conv: Convention) -> Result<StateVector> {
    let n = c.qreg();
    if index >> n != 0 {
        return Err(Error::QubitOutOfRange { qubit: index, size: 1 << n });
    }
    let mut s = StateVector::basis(n, index);
    for g in c.gates() {
        if g.is_conditioned() {
            return Err(Error::NonUnitary(format!("conditioned {}", g.name())));
        }
        let m = gate_matrix(&g.kind)?;
        match conv {
            Convention::Diagram => s.apply_row(&m, g.operands(), |_| true),
            Convention::TimeOrdered => s.apply(&m, g.operands(), |_| true),
        }
    }
    Ok(s)
}

fn apply(u: &mut Unitary, m: &[num_complex::Complex64], ops: &[usize], conv: Convention, fires: impl Fn(usize) -> bool) {
    match conv {
        Convention::Diagram => u.mul_gate_right(m, ops, fires),
        Convention::TimeOrdered => u.mul_gate_left(m, ops, fires),
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_CAP {
        Err(Error::RegisterTooLarge {
            nqreg: n,
            cap: ORACLE_CAP,
        })
    } else {
        Ok(())
    }
}
