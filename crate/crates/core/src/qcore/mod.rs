//! Dense complex linear algebra for small multi-qubit registers.
//!
//! Qubit 0 is the most significant bit of a computational-basis index, so
//! `|q0 q1 ... q(n-1)⟩` maps to the index `q0·2^(n-1) + ... + q(n-1)`.
//! Every other module inherits this ordering.

mod density;
mod gate;
pub mod linalg;
mod state;

pub use density::{matrix_fidelity, DensityMatrix};
pub use gate::{Gate, GateKind};
pub use linalg::CMatrix;
pub use state::StateVector;

pub use num_complex::Complex64 as C64;

/// Largest register handled by the dense representations.
pub const MAX_QUBITS: usize = 14;

/// Tolerance for identities that hold in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance for quantities obtained through an eigendecomposition.
pub const EIGEN_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit mask of `qubit` inside an `n_qubits` register.
#[inline]
pub fn bit_of(qubit: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

pub(crate) fn check_qubits(n_qubits: usize, what: &'static str) -> crate::Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(crate::Error::TooManyQubits {
            what,
            max: MAX_QUBITS,
            got: n_qubits,
        });
    }
    Ok(())
}

/// Single-qubit Pauli matrices, row-major.
pub mod pauli {
    use super::{c, C64, ONE, ZERO};

    pub const I: [[C64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];
    pub const X: [[C64; 2]; 2] = [[ZERO, ONE], [ONE, ZERO]];
    pub const Z: [[C64; 2]; 2] = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

    pub fn y() -> [[C64; 2]; 2] {
        [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]
    }
}
