//! Unit quaternions as a phase-free encoding of single-qubit gates.
//!
//! The encoding is `psi(w, x, y, z) = w*I + i*(x*X + y*Y + z*Z)`. It reverses
//! products: `psi(a) * psi(b) = psi(b * a)` for the Hamilton product.

use num_complex::Complex64 as C64;

use super::gates::gate_matrix;
use crate::error::{Error, Result};
use crate::ir::GateKind;

pub const QUAT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<UnitQuaternion> {
        let q = UnitQuaternion { w, x, y, z };
        let n = q.norm();
        if (n - 1.0).abs() > QUAT_TOL {
            return Err(Error::NonUnitQuaternion(n));
        }
        Ok(q)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn renormalized(self) -> UnitQuaternion {
        let n = self.norm();
        UnitQuaternion {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn conj(&self) -> UnitQuaternion {
        UnitQuaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// `psi(q)` as a row-major 2x2 matrix.
    pub fn to_su2(&self) -> [C64; 4] {
        [
            C64::new(self.w, self.z),
            C64::new(self.y, self.x),
            C64::new(-self.y, self.x),
            C64::new(self.w, -self.z),
        ]
    }

    /// The quaternion of `U / sqrt(det U)`; the sign is arbitrary.
    pub fn from_unitary(m: &[C64]) -> Result<UnitQuaternion> {
        if m.len() != 4 {
            return Err(Error::DimensionMismatch(m.len(), 4));
        }
        let det = m[0] * m[3] - m[1] * m[2];
        let root = det.sqrt();
        if root.norm() < 1e-12 {
            return Err(Error::NonUnitary("singular matrix".into()));
        }
        let a = m[0] / root;
        let b = m[1] / root;
        UnitQuaternion::new(a.re, b.im, b.re, a.im).map(UnitQuaternion::renormalized)
    }

    pub fn from_gate(kind: &GateKind) -> Result<UnitQuaternion> {
        match *kind {
            GateKind::U1(l) => Ok(quat_from_u3(0.0, 0.0, l)),
            GateKind::U2(p, l) => Ok(quat_from_u3(std::f64::consts::FRAC_PI_2, p, l)),
            GateKind::U3(t, p, l) => Ok(quat_from_u3(t, p, l)),
            k if k.arity() == 1 => UnitQuaternion::from_unitary(&gate_matrix(&k)?),
            k => Err(Error::Precondition(format!("{} is not a single-qubit gate", k.name()))),
        }
    }

    /// Rotation of Bloch vectors induced by `|s> -> psi(q)|s>`.
    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        // psi(q) = cos(a/2) - i sin(a/2) n.sigma with n = -(x, y, z)/|(x, y, z)|
        let s = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        if s < 1e-15 {
            return v;
        }
        let n = [-self.x / s, -self.y / s, -self.z / s];
        let a = 2.0 * s.atan2(self.w);
        let (sa, ca) = a.sin_cos();
        let dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
        let cross = [
            n[1] * v[2] - n[2] * v[1],
            n[2] * v[0] - n[0] * v[2],
            n[0] * v[1] - n[1] * v[0],
        ];
        [0, 1, 2].map(|i| v[i] * ca + cross[i] * sa + n[i] * dot * (1.0 - ca))
    }

    /// Same rotation (`q` and `-q` coincide).
    pub fn same_rotation(&self, other: &UnitQuaternion, tol: f64) -> bool {
        let d = self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z;
        (d.abs() - 1.0).abs() <= tol
    }
}

/// Hamilton product `a * b`.
pub fn quat_mul(a: &UnitQuaternion, b: &UnitQuaternion) -> UnitQuaternion {
    UnitQuaternion {
        w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    }
    .renormalized()
}

pub fn quat_from_u3(theta: f64, phi: f64, lambda: f64) -> UnitQuaternion {
    let (s, c) = (theta / 2.0).sin_cos();
    let sum = (phi + lambda) / 2.0;
    let diff = (lambda - phi) / 2.0;
    UnitQuaternion {
        w: c * sum.cos(),
        x: -s * diff.sin(),
        y: -s * diff.cos(),
        z: -c * sum.sin(),
    }
}

/// Angles `(theta, phi, lambda)` with `u3(theta, phi, lambda) ~ psi(q)` and `theta` in `[0, pi]`.
pub fn u3_from_quat(q: &UnitQuaternion) -> Result<(f64, f64, f64)> {
    if (q.norm() - 1.0).abs() > QUAT_TOL {
        return Err(Error::NonUnitQuaternion(q.norm()));
    }
    let c = (q.w * q.w + q.z * q.z).sqrt();
    let s = (q.x * q.x + q.y * q.y).sqrt();
    let theta = 2.0 * s.atan2(c);
    const EPS: f64 = 1e-12;
    if s < EPS {
        let sum = -2.0 * q.z.atan2(q.w);
        return Ok((theta, sum, 0.0));
    }
    let diff = 2.0 * (-q.x).atan2(-q.y);
    if c < EPS {
        return Ok((theta, -diff, 0.0));
    }
    let sum = -2.0 * q.z.atan2(q.w);
    Ok((theta, (sum - diff) / 2.0, (sum + diff) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::gates::u3_matrix;
    use crate::semantics::slices_phase_equal;
    use std::f64::consts::PI;

    fn mat_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
        vec![
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ]
    }

    #[test]
    fn u1_quaternion() {
        let l = 0.9;
        let q = quat_from_u3(0.0, 0.0, l);
        assert!((q.w - (l / 2.0).cos()).abs() < 1e-15);
        assert!((q.z + (l / 2.0).sin()).abs() < 1e-15);
        assert_eq!((q.x, q.y), (0.0, 0.0));
    }

    #[test]
    fn encoding_matches_u3_up_to_phase() {
        for &(t, p, l) in &[(0.3, 1.1, -0.4), (PI, 0.0, PI), (2.0, -2.5, 0.7), (0.0, 0.2, 0.3)] {
            let q = quat_from_u3(t, p, l);
            assert!(slices_phase_equal(&q.to_su2(), &u3_matrix(t, p, l), 1e-12));
        }
    }

    #[test]
    fn product_is_reversed() {
        let a = quat_from_u3(0.3, 1.1, -0.4);
        let b = quat_from_u3(1.7, -0.2, 2.2);
        let lhs = mat_mul(&a.to_su2(), &b.to_su2());
        let rhs = quat_mul(&b, &a).to_su2();
        assert!(lhs.iter().zip(&rhs).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn angles_round_trip() {
        for &(t, p, l) in &[(0.3, 1.1, -0.4), (PI, 0.2, 0.9), (0.0, 0.2, 0.3), (PI / 2.0, 0.0, PI)] {
            let q = quat_from_u3(t, p, l);
            let (t2, p2, l2) = u3_from_quat(&q).unwrap();
            assert!(slices_phase_equal(&u3_matrix(t2, p2, l2), &u3_matrix(t, p, l), 1e-9));
        }
    }

    #[test]
    fn rejects_non_unit() {
        assert!(UnitQuaternion::new(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn named_gate_quaternions() {
        let x = UnitQuaternion::from_gate(&GateKind::X).unwrap();
        assert!(x.same_rotation(&quat_from_u3(PI, 0.0, PI), 1e-12));
    }
}
