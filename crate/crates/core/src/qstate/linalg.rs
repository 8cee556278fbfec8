//! Small dense helpers shared by the state types.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for the Hermiticity, trace and positivity checks on states.
pub const STATE_TOL: f64 = 1e-9;

/// Eigenvalues below this are treated as exact zeros when taking square
/// roots. Eigensolver noise on unit-trace matrices is ~1e-16, whose square
/// root would otherwise leak ~1e-8 into fidelities.
pub(crate) const SQRT_FLOOR: f64 = 1e-14;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Spectral decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order; the columns of `vectors` match `values`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Raw Hermitian eigendecomposition, no clamping.
pub fn hermitian_eig(m: &CMatrix) -> Spectrum {
    let n = m.nrows();
    if n == 1 {
        return Spectrum {
            values: vec![m[(0, 0)].re],
            vectors: CMatrix::identity(1, 1),
        };
    }
    // symmetrize first so the solver only ever sees an exactly Hermitian input
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Spectrum { values, vectors }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `V diag(f(λ)) V†`.
pub(crate) fn spectral_map(s: &Spectrum, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = s.values.len();
    let mut scaled = s.vectors.clone();
    for (j, &lam) in s.values.iter().enumerate() {
        let fl = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fl;
        }
    }
    &scaled * s.vectors.adjoint()
}

/// `-Σ λ log₂ λ` with `0 log 0 = 0`. Callers clamp first.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let h: f64 = values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    entropy_of_spectrum(probs)
}

/// Binary entropy `h₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Orthonormalizes the columns of `m` (thin QR, phases fixed so that the
/// diagonal of R is real positive).
pub fn orthonormalize_columns(m: &CMatrix) -> CMatrix {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}
