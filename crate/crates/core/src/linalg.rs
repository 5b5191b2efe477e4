//! Dense complex linear-algebra helpers shared by the physics modules.

use crate::{CMatrix, C64};

/// Eigenvalues below this magnitude are treated as exact zeros in entropies.
pub const EIGEN_ZERO: f64 = 1e-12;

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Largest entrywise modulus of `m m† - I`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m * m.adjoint()), &CMatrix::identity(n, n))
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized first so
/// that round-off asymmetry never leaks into the eigensolver.
///
/// nalgebra's solver occasionally returns NaN on sparse, highly degenerate
/// inputs (protocol outputs are mostly zeros). When that happens the matrix is
/// conjugated by a dense unitary, decomposed, and the eigenvectors rotated back.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let eig = h.clone().symmetric_eigen();
    if is_finite(&eig.eigenvalues, &eig.eigenvectors) {
        return (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors);
    }
    let n = h.nrows();
    for twist in 1..=4 {
        let q = mixing_unitary(n, twist);
        let eig = hermitian_part(&(q.adjoint() * &h * &q)).symmetric_eigen();
        if is_finite(&eig.eigenvalues, &eig.eigenvectors) {
            return (eig.eigenvalues.iter().copied().collect(), q * eig.eigenvectors);
        }
    }
    panic!("Hermitian eigensolver failed on a {n}x{n} matrix");
}

fn is_finite(values: &nalgebra::DVector<f64>, vectors: &CMatrix) -> bool {
    values.iter().all(|x| x.is_finite()) && vectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Discrete Fourier matrix with a quadratic phase chirp; dense for every `twist`.
fn mixing_unitary(n: usize, twist: usize) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let tau = 2.0 * std::f64::consts::PI / n as f64;
    CMatrix::from_fn(n, n, |i, j| {
        let chirp = 0.5 * ((twist - 1) * j * j) as f64 / n as f64;
        C64::from_polar(scale, tau * (i * j) as f64 + tau * chirp)
    })
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (j, &lambda) in vals.iter().enumerate() {
        let fj = f(lambda);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vecs.adjoint()
}

/// `-Σ λ ln λ` over the given spectrum, dropping values below [`EIGEN_ZERO`].
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > EIGEN_ZERO)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
        + 0.0
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Trace of `a b` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
