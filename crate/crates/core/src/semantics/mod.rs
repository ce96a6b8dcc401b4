//! Matrix semantics: the dense unitary oracle, equality checks, the
//! quaternion and Bloch encodings, and refinement checking.

mod bloch;
mod denote;
mod equality;
mod gates;
mod matrix;
mod quaternion;
pub mod refinement;

pub use bloch::{bloch_rep, BlochState};
pub use denote::{apply_to_basis, denote, denote_gates, denote_lowered, denote_with, Convention, ORACLE_CAP};
pub use equality::{
    equal_in_mode, phase_equal, phase_factor, residual, slices_phase_equal, unitary_equal, EqualityMode, TOL,
};
pub use gates::{gate_matrix, u3_matrix};
pub use matrix::{StateVector, Unitary};
pub use quaternion::{quat_from_u3, quat_mul, u3_from_quat, UnitQuaternion, QUAT_TOL};
