use std::f64::consts::FRAC_1_SQRT_2;

use super::linalg::{from_2x2, unitary_deviation};
use super::{c, pauli, C64, EXACT_TOL, ONE, ZERO};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    CZ,
    /// Arbitrary single-qubit matrix; checked for unitarity on application.
    Custom([[C64; 2]; 2]),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "S†",
            GateKind::CZ => "CZ",
            GateKind::Custom(_) => "custom",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::CZ => 2,
            _ => 1,
        }
    }

    /// Matrix of a single-qubit gate; `None` for CZ.
    pub fn matrix(&self) -> Option<[[C64; 2]; 2]> {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Some(match self {
            GateKind::I => pauli::I,
            GateKind::X => pauli::X,
            GateKind::Y => pauli::y(),
            GateKind::Z => pauli::Z,
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [[ONE, ZERO], [ZERO, c(0.0, 1.0)]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, c(0.0, -1.0)]],
            GateKind::Custom(m) => *m,
            GateKind::CZ => return None,
        })
    }
}

/// A gate together with the qubits it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Self { kind, targets }
    }

    pub fn i(q: usize) -> Self {
        Self::new(GateKind::I, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::new(GateKind::Sdg, vec![q])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, vec![a, b])
    }
    pub fn custom(q: usize, m: [[C64; 2]; 2]) -> Self {
        Self::new(GateKind::Custom(m), vec![q])
    }

    /// Checks arity, distinctness, range and unitarity.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let expected = self.kind.arity();
        if self.targets.len() != expected {
            return Err(Error::GateArity {
                gate: self.kind.name(),
                expected,
                got: self.targets.len(),
            });
        }
        for &t in &self.targets {
            if t >= n_qubits {
                return Err(Error::QubitOutOfRange { index: t, n_qubits });
            }
        }
        if expected == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::DuplicateTargets);
        }
        if let GateKind::Custom(m) = &self.kind {
            let deviation = unitary_deviation(&from_2x2(m));
            if deviation > EXACT_TOL {
                return Err(Error::NonUnitary { deviation });
            }
        }
        Ok(())
    }
}
