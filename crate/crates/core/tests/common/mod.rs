#![allow(dead_code)]

use std::sync::Arc;

use fockcorr::{CMatrix, CVector, DensityMatrix, FockBasis, Statistics, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Induced-measure random state: `G G† / Tr`, with `G` of shape dim × rank.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let t = m.trace();
    DensityMatrix::new(m.map(|z| z / t)).unwrap()
}

pub fn random_pure<R: Rng>(basis: &Arc<FockBasis>, rng: &mut R) -> StateVector {
    let a = CVector::from_fn(basis.dim(), |_, _| gaussian(rng));
    StateVector::normalized(Arc::clone(basis), a).unwrap().0
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    (&g + g.adjoint()).map(|z| z * 0.5)
}

pub fn bosons(d: usize, n: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(d, n, Statistics::Bosonic).unwrap())
}

pub fn fermions(d: usize, n: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(d, n, Statistics::Fermionic).unwrap())
}

/// `(|2,0⟩ + |0,2⟩)/√2`, i.e. `(b₀†² + b₁†²)|vac⟩/2`.
pub fn psi_b() -> (Arc<FockBasis>, StateVector) {
    let b = bosons(2, 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = CVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]);
    let psi = StateVector::new(Arc::clone(&b), a).unwrap();
    (b, psi)
}

/// Single-particle unitary sending `(e₀ ± i e₁)/√2` to `e₀`, `e₁`.
pub fn plus_minus_rotation() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(s, 0.0), C64::new(0.0, -s), C64::new(s, 0.0), C64::new(0.0, s)],
    )
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scaled = a.map(|z| z / 2f64.powi(s));
    let n = a.nrows();
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Von Neumann entropy through nalgebra's eigen-decomposition of the real
/// 2D × 2D embedding, independent of the crate's entropy routine. The
/// embedding is first rotated by a random orthogonal matrix, since the real
/// solver can break down on very sparse degenerate inputs.
pub fn entropy_oracle(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut r = rng(0x5eed);
    let g = nalgebra::DMatrix::<f64>::from_fn(2 * n, 2 * n, |_, _| r.sample(StandardNormal));
    let q = g.qr().q();
    let embedded = nalgebra::DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let real = q.transpose() * embedded * &q;
    let eig = ((&real + real.transpose()) * 0.5).symmetric_eigen();
    // Each eigenvalue of m appears twice in the embedding.
    eig.eigenvalues
        .iter()
        .filter(|&&p| p > 1e-12)
        .map(|&p| -p * p.ln() / 2.0)
        .sum()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, sign) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let moved = (p.len() - pos) as i32;
            out.push((q, sign * (-1f64).powi(moved)));
        }
    }
    out
}

/// Columns are the Fock basis vectors embedded in the d^n tensor space.
pub fn embedding(basis: &FockBasis) -> CMatrix {
    let (d, n) = (basis.d(), basis.n());
    let fermionic = basis.statistics() == Statistics::Fermionic;
    let perms = permutations(n);
    let mut e = CMatrix::zeros(d.pow(n as u32), basis.dim());
    for (col, k) in basis.states().iter().enumerate() {
        let modes = k.modes();
        let norm = (factorial(n) * k.multiplicity_factorial()).sqrt();
        for (p, sign) in &perms {
            let idx = p.iter().fold(0, |acc, &i| acc * d + modes[i]);
            let s = if fermionic { *sign } else { 1.0 };
            e[(idx, col)] += C64::new(s / norm, 0.0);
        }
    }
    e
}

/// `E† V^{⊗n} E` with `E` the embedding above.
pub fn tensor_power_lift(v: &CMatrix, basis: &FockBasis) -> CMatrix {
    let mut power = CMatrix::identity(1, 1);
    for _ in 0..basis.n() {
        power = power.kronecker(v);
    }
    let e = embedding(basis);
    e.adjoint() * power * e
}
