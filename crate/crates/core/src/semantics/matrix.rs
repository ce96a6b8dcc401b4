use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense square matrix on `n` qubits, row-major, little-endian basis
/// (qubit 0 is the least significant bit of the index).
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    n: usize,
    data: Vec<C64>,
}

impl Unitary {
    pub fn identity(n: usize) -> Unitary {
        let dim = 1usize << n;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Unitary { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<C64>) -> Result<Unitary> {
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        Ok(Unitary { n, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim() + c]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> Vec<C64> {
        let d = self.dim();
        self.data[r * d..(r + 1) * d].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim()).map(|r| self.get(r, c)).collect()
    }

    pub fn mul(&self, other: &Unitary) -> Result<Unitary> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        Ok(Unitary { n: self.n, data: out })
    }

    pub fn adjoint(&self) -> Unitary {
        let d = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        Unitary { n: self.n, data }
    }

    pub fn scale(&self, c: C64) -> Unitary {
        Unitary {
            n: self.n,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    /// `self * G` where `G` is `local` embedded on `operands`, acting only on
    /// basis states for which `fires` holds (identity elsewhere).
    pub fn mul_gate_right(&mut self, local: &[C64], operands: &[usize], fires: impl Fn(usize) -> bool) {
        let d = self.dim();
        right_apply(&mut self.data, d, d, local, operands, fires);
    }

    /// `G * self`, same embedding as [`Unitary::mul_gate_right`].
    pub fn mul_gate_left(&mut self, local: &[C64], operands: &[usize], fires: impl Fn(usize) -> bool) {
        let d = self.dim();
        left_apply(&mut self.data, d, d, local, operands, fires);
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        match self.mul(&self.adjoint()) {
            Ok(p) => p.data.iter().enumerate().all(|(i, x)| {
                let d = self.dim();
                let want = if i / d == i % d { 1.0 } else { 0.0 };
                (x - C64::new(want, 0.0)).norm() <= tol
            }),
            Err(_) => false,
        }
    }
}

/// Amplitude vector over `n` qubits, little-endian.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<StateVector> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::DimensionMismatch(amps.len(), amps.len().next_power_of_two()));
        }
        let n = amps.len().trailing_zeros() as usize;
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `other` becomes the most significant qubit(s).
    pub fn tensor_high(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for &hi in &other.amps {
            for &lo in &self.amps {
                amps.push(hi * lo);
            }
        }
        StateVector {
            n: self.n + other.n,
            amps,
        }
    }

    pub fn scale(&self, c: C64) -> StateVector {
        StateVector {
            n: self.n,
            amps: self.amps.iter().map(|&a| a * c).collect(),
        }
    }

    /// Column action `|psi> -> G|psi>`.
    pub fn apply(&mut self, local: &[C64], operands: &[usize], fires: impl Fn(usize) -> bool) {
        let d = self.amps.len();
        left_apply(&mut self.amps, d, 1, local, operands, fires);
    }

    /// Row action `<psi| -> <psi| G`.
    pub fn apply_row(&mut self, local: &[C64], operands: &[usize], fires: impl Fn(usize) -> bool) {
        let d = self.amps.len();
        right_apply(&mut self.amps, 1, d, local, operands, fires);
    }
}

fn offsets(operands: &[usize]) -> Vec<usize> {
    let a = operands.len();
    (0..1usize << a)
        .map(|j| {
            (0..a)
                .filter(|&t| (j >> t) & 1 == 1)
                .map(|t| 1usize << operands[t])
                .sum()
        })
        .collect()
}

fn bases(dim: usize, operands: &[usize]) -> impl Iterator<Item = usize> + '_ {
    let mask: usize = operands.iter().map(|&q| 1usize << q).sum();
    (0..dim).filter(move |b| b & mask == 0)
}

/// Row-major `rows x dim` data times the embedded gate.
fn right_apply(
    data: &mut [C64],
    rows: usize,
    dim: usize,
    local: &[C64],
    operands: &[usize],
    fires: impl Fn(usize) -> bool,
) {
    let off = offsets(operands);
    let k = off.len();
    let mut buf = vec![C64::new(0.0, 0.0); k];
    for b in bases(dim, operands) {
        if !fires(b) {
            continue;
        }
        for r in 0..rows {
            let row = &mut data[r * dim..(r + 1) * dim];
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = (0..k).map(|j| row[b + off[j]] * local[j * k + i]).sum();
            }
            for i in 0..k {
                row[b + off[i]] = buf[i];
            }
        }
    }
}

/// Embedded gate times row-major `dim x cols` data.
fn left_apply(
    data: &mut [C64],
    dim: usize,
    cols: usize,
    local: &[C64],
    operands: &[usize],
    fires: impl Fn(usize) -> bool,
) {
    let off = offsets(operands);
    let k = off.len();
    let mut buf = vec![C64::new(0.0, 0.0); k];
    for b in bases(dim, operands) {
        if !fires(b) {
            continue;
        }
        for c in 0..cols {
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = (0..k).map(|j| local[i * k + j] * data[(b + off[j]) * cols + c]).sum();
            }
            for i in 0..k {
                data[(b + off[i]) * cols + c] = buf[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn left_and_right_embedding_agree_with_full_products() {
        let x = [c(0.0), c(1.0), c(1.0), c(0.0)];
        let mut u = Unitary::identity(2);
        u.mul_gate_right(&x, &[1], |_| true);
        // X on qubit 1 swaps index bit 1.
        assert_eq!(u.get(0, 2), c(1.0));
        assert_eq!(u.get(1, 3), c(1.0));
        let mut v = Unitary::identity(2);
        v.mul_gate_left(&x, &[1], |_| true);
        assert_eq!(u, v);
    }

    #[test]
    fn tensor_order_is_little_endian() {
        let lo = StateVector::basis(1, 1);
        let hi = StateVector::basis(1, 0);
        let s = lo.tensor_high(&hi);
        assert_eq!(s.amplitudes()[1], c(1.0));
    }

    #[test]
    fn state_rejects_bad_length() {
        assert!(StateVector::from_amplitudes(vec![c(1.0); 3]).is_err());
    }
}
