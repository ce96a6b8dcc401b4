use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ir::GateKind;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

const O: C64 = C64::new(0.0, 0.0);
const I1: C64 = C64::new(1.0, 0.0);
const IM: C64 = C64::new(0.0, 1.0);

/// `u3(theta, phi, lambda)` as a row-major 2x2 matrix.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> [C64; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        r(c),
        -C64::from_polar(s, lambda),
        C64::from_polar(s, phi),
        C64::from_polar(c, lambda + phi),
    ]
}

/// Row-major local matrix of a unitary gate. Operand 0 is the least
/// significant local bit, so for `cx` the control is bit 0.
pub fn gate_matrix(kind: &GateKind) -> Result<Vec<C64>> {
    Ok(match *kind {
        GateKind::U1(l) => vec![I1, O, O, C64::from_polar(1.0, l)],
        GateKind::U2(p, l) => u3_matrix(std::f64::consts::FRAC_PI_2, p, l).to_vec(),
        GateKind::U3(t, p, l) => u3_matrix(t, p, l).to_vec(),
        GateKind::X => vec![O, I1, I1, O],
        GateKind::Y => vec![O, -IM, IM, O],
        GateKind::Z => vec![I1, O, O, -I1],
        GateKind::H => {
            let h = r(FRAC_1_SQRT_2);
            vec![h, h, h, -h]
        }
        GateKind::T => vec![I1, O, O, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        GateKind::CX => permutation(&[0, 3, 2, 1]),
        GateKind::CY => {
            let mut m = vec![O; 16];
            m[0] = I1;
            m[2 * 4 + 2] = I1;
            // |b0=1,b1=0> (index 1) -> i|3>, |3> -> -i|1>
            m[3 * 4 + 1] = IM;
            m[4 + 3] = -IM;
            m
        }
        GateKind::CZ => {
            let mut m = permutation(&[0, 1, 2, 3]);
            m[15] = -I1;
            m
        }
        GateKind::Swap => permutation(&[0, 2, 1, 3]),
        GateKind::MeasX | GateKind::MeasZ => {
            return Err(Error::NonUnitary(kind.name().as_str().to_string()))
        }
    })
}

/// Matrix with `m[f(j)][j] = 1`.
fn permutation(f: &[usize]) -> Vec<C64> {
    let k = f.len();
    let mut m = vec![O; k * k];
    for (j, &i) in f.iter().enumerate() {
        m[i * k + j] = I1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &[C64], b: &[C64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn named_gates_match_u3_forms() {
        let x = gate_matrix(&GateKind::X).unwrap();
        assert!(close(&x, &u3_matrix(PI, 0.0, PI)));
        let y = gate_matrix(&GateKind::Y).unwrap();
        assert!(close(&y, &u3_matrix(PI, PI / 2.0, PI / 2.0)));
        let h = gate_matrix(&GateKind::H).unwrap();
        assert!(close(&h, &gate_matrix(&GateKind::U2(0.0, PI)).unwrap()));
    }

    #[test]
    fn cx_flips_target_when_control_bit_set() {
        let m = gate_matrix(&GateKind::CX).unwrap();
        // column 1 (control=1, target=0) lands on row 3
        assert_eq!(m[3 * 4 + 1], I1);
        assert_eq!(m[4 + 3], I1);
        assert_eq!(m[2 * 4 + 2], I1);
    }

    #[test]
    fn measurement_has_no_matrix() {
        assert!(gate_matrix(&GateKind::MeasZ).is_err());
    }
}
