use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use super::quaternion::UnitQuaternion;

/// Point on the Bloch sphere; the canonical vector is
/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub theta: f64,
    pub phi: f64,
}

fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if (TAU - r).abs() < 1e-15 {
        0.0
    } else {
        r
    }
}

/// Drop the global phase of `e^{i gamma}(cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>)`.
pub fn bloch_rep(_gamma: f64, theta: f64, phi: f64) -> BlochState {
    BlochState::new(theta, phi)
}

impl BlochState {
    pub fn new(theta: f64, phi: f64) -> BlochState {
        BlochState {
            theta,
            phi: wrap_tau(phi),
        }
    }

    /// Decompose amplitudes into `(gamma, state)`.
    pub fn from_amplitudes(a: C64, b: C64) -> (f64, BlochState) {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        let theta = 2.0 * b.norm().atan2(a.norm());
        if a.norm() < 1e-12 {
            return (b.arg(), BlochState::new(std::f64::consts::PI, 0.0));
        }
        let gamma = a.arg();
        let phi = if b.norm() < 1e-12 { 0.0 } else { b.arg() - gamma };
        (gamma, BlochState::new(theta, phi))
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }

    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn from_vector(v: [f64; 3]) -> BlochState {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let z = (v[2] / n).clamp(-1.0, 1.0);
        let theta = z.acos();
        let phi = if (v[0].abs() + v[1].abs()) / n < 1e-12 {
            0.0
        } else {
            v[1].atan2(v[0])
        };
        BlochState::new(theta, phi)
    }

    pub fn rotated(&self, q: &UnitQuaternion) -> BlochState {
        BlochState::from_vector(q.rotate(self.vector()))
    }

    /// Same point on the sphere.
    pub fn approx_eq(&self, other: &BlochState, tol: f64) -> bool {
        let (a, b) = (self.vector(), other.vector());
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }
}
