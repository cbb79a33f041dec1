//! Matrix helpers over `nalgebra::DMatrix<Complex64>`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{C64, ZERO};

pub type CMatrix = DMatrix<C64>;

/// Largest entrywise deviation `|m - m†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    if n != m.ncols() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise deviation `|u†u - I|`.
pub fn unitary_deviation(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Column `k` of the returned matrix is the eigenvector of value `k`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
        eig.eigenvectors[(r, order[col])]
    });
    (values, vectors)
}

/// Principal square root of a positive semidefinite matrix; small negative
/// eigenvalues from roundoff are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let roots: Vec<f64> = values.iter().map(|v| v.max(0.0).sqrt()).collect();
    reconstruct(&vectors, &roots)
}

/// `V diag(values) V†`.
pub fn reconstruct(vectors: &CMatrix, values: &[f64]) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (col, &v) in values.iter().enumerate() {
        for r in 0..n {
            scaled[(r, col)] *= v;
        }
    }
    scaled * vectors.adjoint()
}

/// `(m + m†) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Dense matrix of a single-qubit operator.
pub fn from_2x2(op: &[[C64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| op[r][c])
}

/// Tensor product of single-qubit operators, qubit 0 first.
pub fn tensor_all(ops: &[[[C64; 2]; 2]]) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for op in ops {
        out = kron(&out, &from_2x2(op));
    }
    out
}

/// `|v⟩⟨v|` for a column given as a slice.
pub fn outer(v: &[C64]) -> CMatrix {
    let n = v.len();
    CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj())
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::from_element(n, n, ZERO)
}

/// Largest entrywise absolute difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
