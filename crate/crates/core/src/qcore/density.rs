use super::linalg::{
    hermitian_deviation, hermitian_eigen, outer, psd_sqrt, reconstruct, trace, CMatrix,
};
use super::state::{dim_to_qubits, StateVector};
use super::{check_qubits, C64, EXACT_TOL, ZERO};
use crate::{Error, Result};

/// Eigenvalues in `[-CLIP_TOL, 0)` are treated as roundoff and clipped.
const CLIP_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix.
///
/// The dimension need not be a power of two; Fock-space states use this type
/// as well. [`DensityMatrix::n_qubits`] reports `None` in that case.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `m`.
    ///
    /// Hermiticity and trace must hold to `1e-12`. Eigenvalues in
    /// `[-1e-10, 0)` are clipped to zero and the result renormalized;
    /// anything more negative is rejected.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "shape {}x{} is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        if dev > EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = trace(&m);
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        let (values, vectors) = hermitian_eigen(&m);
        let min = values.first().copied().unwrap_or(0.0);
        if min < -CLIP_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        if min < 0.0 {
            let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let rescaled: Vec<f64> = clipped.iter().map(|v| v / total).collect();
            return Ok(Self {
                m: reconstruct(&vectors, &rescaled),
            });
        }
        Ok(Self { m })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            m: outer(state.amplitudes()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = CMatrix::from_element(dim, dim, ZERO);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { m }
    }

    /// Builds `Σ p_k |ψ_k⟩⟨ψ_k|`.
    pub fn mixture(weights: &[f64], states: &[StateVector]) -> Result<Self> {
        let dim = states
            .first()
            .ok_or_else(|| Error::InvalidDensityMatrix("empty mixture".into()))?
            .dim();
        let mut m = CMatrix::from_element(dim, dim, ZERO);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
            m += s.outer().scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn n_qubits(&self) -> Option<usize> {
        dim_to_qubits(self.dim()).ok()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        trace(&self.m).re
    }

    /// Eigenvalues (ascending) and eigenvectors as pure states.
    ///
    /// Only meaningful for qubit registers; used to unravel a mixed state
    /// into an ensemble of pure states.
    pub fn ensemble(&self) -> Result<Vec<(f64, StateVector)>> {
        let (values, vectors) = hermitian_eigen(&self.m);
        let mut out = Vec::new();
        for (k, &p) in values.iter().enumerate() {
            if p <= 1e-14 {
                continue;
            }
            let col: Vec<C64> = vectors.column(k).iter().copied().collect();
            out.push((p, StateVector::normalized(col)?));
        }
        Ok(out)
    }

    pub fn expectation(&self, observable: &CMatrix) -> Result<f64> {
        if observable.nrows() != self.dim() || observable.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: observable.nrows(),
            });
        }
        let deviation = hermitian_deviation(observable);
        if deviation > 1e-10 {
            return Err(Error::NonHermitian { deviation });
        }
        let value = trace(&(&self.m * observable));
        if value.im.abs() > 1e-10 {
            return Err(Error::NonHermitian {
                deviation: value.im.abs(),
            });
        }
        Ok(value.re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if let (Some(a), Some(b)) = (self.n_qubits(), other.n_qubits()) {
            check_qubits(a + b, "tensor product")?;
        }
        Ok(Self {
            m: self.m.kronecker(&other.m),
        })
    }

    /// Traces out every qubit not listed in `keep`. Kept qubits retain their
    /// relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self
            .n_qubits()
            .ok_or_else(|| Error::InvalidDensityMatrix("partial trace needs qubits".into()))?;
        check_qubits(n, "partial trace")?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::DuplicateTargets);
        }
        if let Some(&q) = keep_sorted.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep_sorted.contains(q)).collect();
        let k = keep_sorted.len();
        let embed = |bits: usize, qubits: &[usize]| -> usize {
            let len = qubits.len();
            qubits.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                if bits & (1 << (len - 1 - pos)) != 0 {
                    acc | (1 << (n - 1 - q))
                } else {
                    acc
                }
            })
        };
        let dk = 1usize << k;
        let mut out = CMatrix::from_element(dk, dk, ZERO);
        for r in 0..dk {
            let r_full = embed(r, &keep_sorted);
            for col in 0..dk {
                let c_full = embed(col, &keep_sorted);
                let mut acc = ZERO;
                for t in 0..(1usize << traced.len()) {
                    let t_full = embed(t, &traced);
                    acc += self.m[(r_full | t_full, c_full | t_full)];
                }
                out[(r, col)] = acc;
            }
        }
        Ok(Self { m: out })
    }
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn matrix_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let root = psd_sqrt(&rho.m);
    let inner = &root * &sigma.m * &root;
    let (values, _) = hermitian_eigen(&inner);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -1e-8 {
        return Err(Error::InvalidDensityMatrix(format!(
            "fidelity kernel has negative eigenvalue {min:.3e}"
        )));
    }
    let root_trace: f64 = values.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}
