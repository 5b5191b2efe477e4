//! Single-particle unitaries and observables and their lifts to the n-particle
//! (anti)symmetric subspace.
//!
//! The lift `Γ(V)` of a single-particle unitary acts on basis states as
//! `⟨l|Γ(V)|k⟩ = det V[l,k]` for fermions and
//! `per V[l,k] / √(∏ m(l)! ∏ m(k)!)` for bosons, where `V[l,k]` is the n×n
//! submatrix of rows `l` and columns `k` (repeated by multiplicity).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::fock::{apply_annihilation, apply_creation, FockBasis, OccupationVector, Statistics};
use crate::linalg::{hermitian_function, hermiticity_defect, unitarity_defect};
use crate::{CMatrix, C64};

/// Tolerance on `V V† = I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `M = M†` for observables.
pub const OBSERVABLE_TOL: f64 = 1e-12;

/// A d×d unitary acting on one particle.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleUnitary {
    matrix: CMatrix,
}

impl SingleParticleUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDimension(format!(
                "unitary must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(SingleParticleUnitary { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        SingleParticleUnitary { matrix }
    }

    pub fn identity(d: usize) -> Self {
        SingleParticleUnitary {
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn d(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        SingleParticleUnitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &SingleParticleUnitary) -> Self {
        SingleParticleUnitary {
            matrix: &self.matrix * &other.matrix,
        }
    }
}

/// Real coordinates of a d×d Hermitian matrix: `d` diagonal entries followed by
/// the real and imaginary parts of each upper off-diagonal entry, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianGenerator {
    d: usize,
    params: Vec<f64>,
}

impl HermitianGenerator {
    pub fn new(d: usize, params: Vec<f64>) -> Result<Self> {
        check_dim(d * d, params.len())?;
        Ok(HermitianGenerator { d, params })
    }

    pub fn zeros(d: usize) -> Self {
        HermitianGenerator {
            d,
            params: vec![0.0; d * d],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn matrix(&self) -> CMatrix {
        hermitian_from_params(self.d, &self.params)
    }

    /// Inverse of [`HermitianGenerator::matrix`]; the anti-Hermitian part is discarded.
    pub fn from_matrix(h: &CMatrix) -> Self {
        let d = h.nrows();
        let mut params = Vec::with_capacity(d * d);
        for i in 0..d {
            params.push(h[(i, i)].re);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
                params.push(z.re);
                params.push(z.im);
            }
        }
        HermitianGenerator { d, params }
    }
}

pub(crate) fn hermitian_from_params(d: usize, params: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut p = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(params[p], params[p + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            p += 2;
        }
    }
    h
}

/// `exp(iH)` for the generator's Hermitian matrix `H`.
pub fn unitary_from_parameters(g: &HermitianGenerator) -> SingleParticleUnitary {
    SingleParticleUnitary {
        matrix: exp_i_hermitian(&g.matrix()),
    }
}

pub(crate) fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    hermitian_function(h, |lambda| C64::new(0.0, lambda).exp())
}

/// A Hermitian d×d matrix `M`, lifted as `Σ_ij M_ij a†_i a_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleObservable {
    matrix: CMatrix,
}

impl SingleParticleObservable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDimension("observable must be square".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > OBSERVABLE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(SingleParticleObservable { matrix })
    }

    pub fn d(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Determinant by Gaussian elimination with partial pivoting. `a` is an n×n
/// row-major buffer and is overwritten.
pub fn determinant(a: &mut [C64], n: usize) -> C64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
            .unwrap();
        let p = a[pivot * n + col];
        if p.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        det *= p;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[col * n + j];
                a[r * n + j] -= factor * v;
            }
        }
    }
    det
}

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order so each step updates the row sums by a single column.
/// `a` is an n×n row-major buffer.
pub fn permanent(a: &[C64], n: usize) -> C64 {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut in_subset = vec![false; n];
    let mut total = C64::new(0.0, 0.0);
    let mut subset_size = 0usize;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        let sign = if in_subset[j] { -1.0 } else { 1.0 };
        in_subset[j] = !in_subset[j];
        if in_subset[j] {
            subset_size += 1;
        } else {
            subset_size -= 1;
        }
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s += a[i * n + j] * sign;
        }
        let prod = row_sums.iter().fold(C64::new(1.0, 0.0), |acc, &s| acc * s);
        if subset_size % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Lifted unitary `Γ(V)` on the basis (D×D, column `k` is the image of `|k⟩`).
pub fn lift_unitary(v: &SingleParticleUnitary, basis: &FockBasis) -> Result<CMatrix> {
    check_dim(basis.d(), v.d())?;
    Ok(lift_matrix(v.matrix(), basis))
}

/// Lift of an arbitrary d×d matrix through the n-th (anti)symmetric power.
pub(crate) fn lift_matrix(m: &CMatrix, basis: &FockBasis) -> CMatrix {
    let dim = basis.dim();
    let n = basis.n();
    let stats = basis.statistics();
    let norms: Vec<f64> = match stats {
        Statistics::Fermionic => vec![1.0; dim],
        Statistics::Bosonic => basis
            .states()
            .iter()
            .map(|s| s.multiplicity_factorial().sqrt())
            .collect(),
    };
    let mut out = CMatrix::zeros(dim, dim);
    let mut sub = vec![C64::new(0.0, 0.0); n * n];
    for (c, k) in basis.states().iter().enumerate() {
        for (r, l) in basis.states().iter().enumerate() {
            fill_submatrix(m, l, k, &mut sub, n);
            out[(r, c)] = match stats {
                Statistics::Fermionic => determinant(&mut sub, n),
                Statistics::Bosonic => permanent(&sub, n) / (norms[r] * norms[c]),
            };
        }
    }
    out
}

fn fill_submatrix(
    m: &CMatrix,
    rows: &OccupationVector,
    cols: &OccupationVector,
    buf: &mut [C64],
    n: usize,
) {
    for (i, &r) in rows.modes().iter().enumerate() {
        for (j, &c) in cols.modes().iter().enumerate() {
            buf[i * n + j] = m[(r, c)];
        }
    }
}

/// Matrix of `Σ_ij M_ij a†_i a_j` on the basis.
pub fn lift_observable(m: &SingleParticleObservable, basis: &FockBasis) -> Result<CMatrix> {
    check_dim(basis.d(), m.d())?;
    Ok(lift_quadratic(m.matrix(), basis))
}

pub(crate) fn lift_quadratic(m: &CMatrix, basis: &FockBasis) -> CMatrix {
    let dim = basis.dim();
    let d = basis.d();
    let stats = basis.statistics();
    let mut out = CMatrix::zeros(dim, dim);
    for (c, k) in basis.states().iter().enumerate() {
        let mut seen = Vec::with_capacity(k.len());
        for &j in k.modes() {
            if seen.contains(&j) {
                continue;
            }
            seen.push(j);
            let (amp_a, removed) = apply_annihilation(stats, k.modes(), j).unwrap();
            for i in 0..d {
                let mij = m[(i, j)];
                if mij.norm() == 0.0 {
                    continue;
                }
                if let Some((amp_c, target)) = apply_creation(stats, &removed, i) {
                    let r = basis
                        .index_of(&OccupationVector::new(target))
                        .expect("creation stays inside the sector");
                    out[(r, c)] += mij * (amp_a * amp_c);
                }
            }
        }
    }
    out
}

/// Haar-distributed d×d unitary, reproducible for a given seed.
pub fn haar_random_unitary(d: usize, seed: u64) -> SingleParticleUnitary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_unitary_with(d, &mut rng)
}

/// Haar-distributed unitary drawn from the given generator: QR factorization of
/// a complex Ginibre matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SingleParticleUnitary {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    SingleParticleUnitary { matrix: q }
}
