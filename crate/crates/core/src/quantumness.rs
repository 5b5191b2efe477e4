//! Quantumness of correlations: the minimal entropy increase caused by a
//! single-particle von Neumann measurement, its relative-entropy counterpart,
//! the zero-quantumness states, and a structural classification of states.
//!
//! Throughout, `V` is the rotation applied to the system before the apparatus
//! reads out the Fock basis, so the outcome distribution for `V` is the diagonal
//! of `Γ(V) ρ Γ(V)†`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::fock::{DensityMatrix, FockBasis, OccupationVector, StateVector, Statistics};
use crate::lift::{
    haar_random_unitary, hermitian_from_params, lift_matrix, lift_quadratic, lift_unitary,
    SingleParticleUnitary,
};
use crate::linalg::{entropy_of_spectrum, hermitian_eigen, EIGEN_ZERO};
use crate::measurement::{build_family, dephase, probabilities_in_columns};
use crate::optimize::{derive_seed, minimize_over_unitaries, MultistartResult};
use crate::{CMatrix, C64};

pub use crate::optimize::OptimizerConfig;

/// Values in `(-CLAMP_TOL, 0)` are reported as exactly zero.
pub const CLAMP_TOL: f64 = 1e-9;
/// Restarts whose values lie within this distance of the best one confirm it.
pub const AGREEMENT_TOL: f64 = 1e-4;
/// Quantumness at or below this value counts as zero when classifying.
pub const ZERO_TOL: f64 = 1e-6;
/// Weight of `ρ` on the kernel of `σ` above which `S(ρ‖σ)` is infinite.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Threshold used for spectral degeneracy, rank and structural tests.
pub const STRUCTURE_TOL: f64 = 1e-8;

/// `-Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&hermitian_eigen(rho.matrix()).0)
}

/// Shannon entropy in nats; `0 ln 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    entropy_of_spectrum(probabilities)
}

/// `Tr ρ ln ρ - Tr ρ ln σ` in nats; `+∞` when the support of `ρ` is not
/// contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let (q, w) = hermitian_eigen(sigma.matrix());
    let weights = probabilities_in_columns(rho.matrix(), &w);
    let mut cross = 0.0;
    for (&qj, &wj) in q.iter().zip(weights.iter()) {
        if qj > EIGEN_ZERO {
            cross += wj * qj.ln();
        } else if wj > SUPPORT_TOL {
            return Ok(f64::INFINITY);
        }
    }
    let value = -von_neumann_entropy(rho) - cross;
    Ok(value.max(0.0))
}

/// Entropy of the Fock-basis outcome distribution after rotating by `V`,
/// i.e. of the diagonal of `Γ(V) ρ Γ(V)†`.
pub fn projected_entropy(
    rho: &DensityMatrix,
    v: &SingleParticleUnitary,
    basis: &FockBasis,
) -> Result<f64> {
    check_dim(basis.dim(), rho.dim())?;
    let gamma = lift_unitary(v, basis)?;
    Ok(projected_entropy_with_lift(rho.matrix(), &gamma))
}

fn projected_entropy_with_lift(rho: &CMatrix, gamma: &CMatrix) -> f64 {
    shannon_entropy(&probabilities_in_columns(rho, &gamma.adjoint()))
}

fn clamp_zero(q: f64) -> f64 {
    if q < 0.0 && q > -CLAMP_TOL {
        0.0
    } else {
        q
    }
}

#[derive(Debug, Clone)]
pub struct QuantumnessReport {
    /// Minimum over restarts, in nats.
    pub q_value: f64,
    pub argmin_v: SingleParticleUnitary,
    pub restart_values: Vec<f64>,
    pub restart_iterations: Vec<usize>,
    pub oracle_value: Option<f64>,
    /// The best value was reached by the local search and reproduced by at
    /// least one other restart within [`AGREEMENT_TOL`].
    pub converged: bool,
    pub evaluations: usize,
}

impl QuantumnessReport {
    fn from_multistart(result: MultistartResult) -> Self {
        let best = result.best();
        let values: Vec<f64> = result.values().into_iter().map(clamp_zero).collect();
        let q_value = values[result.best];
        let confirmed = values.len() == 1
            || values
                .iter()
                .enumerate()
                .any(|(i, &v)| i != result.best && (v - q_value).abs() <= AGREEMENT_TOL);
        QuantumnessReport {
            q_value,
            argmin_v: best.unitary.clone(),
            restart_iterations: result.restarts.iter().map(|r| r.iterations).collect(),
            restart_values: values,
            oracle_value: None,
            converged: best.converged && confirmed,
            evaluations: result.restarts.iter().map(|r| r.evaluations).sum(),
        }
    }
}

/// `min_V [S(diag Γ(V) ρ Γ(V)†) - S(ρ)]` by multistart local search.
pub fn quantumness(
    rho: &DensityMatrix,
    basis: &FockBasis,
    cfg: &OptimizerConfig,
) -> Result<QuantumnessReport> {
    check_dim(basis.dim(), rho.dim())?;
    let s_rho = von_neumann_entropy(rho);
    let m = rho.matrix();
    let result = minimize_over_unitaries(
        |v| projected_entropy_with_lift(m, &lift_matrix(v.matrix(), basis)) - s_rho,
        basis.d(),
        cfg,
    );
    Ok(QuantumnessReport::from_multistart(result))
}

/// Minimum of the disturbance objective over `samples` Haar-random unitaries.
/// An upper bound on the true quantumness, independent of the local search.
pub fn quantumness_oracle(
    rho: &DensityMatrix,
    basis: &FockBasis,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_dim(basis.dim(), rho.dim())?;
    let s_rho = von_neumann_entropy(rho);
    let m = rho.matrix();
    let d = basis.d();
    let best = (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let v = haar_random_unitary(d, derive_seed(seed, i));
            projected_entropy_with_lift(m, &lift_matrix(v.matrix(), basis)) - s_rho
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(clamp_zero(best))
}

/// `min_V S(ρ ‖ Δ_V(ρ))`, where `Δ_V` dephases in the basis `Γ(V)†|k⟩`. The
/// closest zero-quantumness state to `ρ` for a given measurement is its
/// dephased version, so this is the relative-entropy distance to the
/// zero-quantumness set. Computed through measurement families and a generic
/// relative entropy, independently of [`quantumness`].
pub fn geometric_quantumness(
    rho: &DensityMatrix,
    basis: &FockBasis,
    cfg: &OptimizerConfig,
) -> Result<QuantumnessReport> {
    check_dim(basis.dim(), rho.dim())?;
    let result = minimize_over_unitaries(
        |v| {
            let fam = build_family(&v.adjoint(), basis).expect("dimensions checked");
            let dephased = dephase(rho, &fam).expect("dimensions checked");
            relative_entropy(rho, &dephased).expect("dimensions checked")
        },
        basis.d(),
        cfg,
    );
    Ok(QuantumnessReport::from_multistart(result))
}

/// Parameters of a zero-quantumness state `Σ p_k Γ(V)|k⟩⟨k|Γ(V)†`.
#[derive(Debug, Clone)]
pub struct ClassicalStateSpec {
    pub probabilities: Vec<f64>,
    pub unitary: SingleParticleUnitary,
    pub support: Vec<OccupationVector>,
}

pub fn make_classical_state(spec: &ClassicalStateSpec, basis: &FockBasis) -> Result<DensityMatrix> {
    if spec.probabilities.len() != spec.support.len() {
        return Err(Error::InvalidSpec(format!(
            "{} probabilities for {} support states",
            spec.probabilities.len(),
            spec.support.len()
        )));
    }
    if spec.probabilities.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidSpec("probabilities must be nonnegative".into()));
    }
    let total: f64 = spec.probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidSpec(format!("probabilities sum to {total}")));
    }
    if spec.unitary.d() != basis.d() {
        return Err(Error::InvalidSpec(format!(
            "unitary is {}x{}, basis has d = {}",
            spec.unitary.d(),
            spec.unitary.d(),
            basis.d()
        )));
    }
    let mut diag = vec![0.0; basis.dim()];
    for (k, &p) in spec.support.iter().zip(spec.probabilities.iter()) {
        let idx = basis
            .index_of(k)
            .ok_or_else(|| Error::InvalidSpec(format!("{k} is not a basis state")))?;
        if diag[idx] != 0.0 || spec.support.iter().filter(|s| *s == k).count() > 1 {
            return Err(Error::InvalidSpec(format!("{k} appears twice in the support")));
        }
        diag[idx] = p;
    }
    let gamma = lift_unitary(&spec.unitary, basis)?;
    Ok(DensityMatrix::diagonal(&diag)?.conjugate_by(&gamma))
}

/// Slater rank of a two-particle pure state.
///
/// Fermions: half the rank of the antisymmetric coefficient matrix, i.e. the
/// number of pairs in its canonical block form. Bosons: the symmetric
/// coefficient matrix `A` (with `ψ = Σ A_ij b†_i b†_j|vac⟩`) has singular
/// values `s`; a cluster of `m` equal nonzero values contributes `⌈m/2⌉`,
/// since `s(b'₁² + b'₂²) = 2s b'₊b'₋` is a single permanent of orthonormal
/// modes. Rank 1 holds exactly for states `Γ(V)|k⟩`.
pub fn slater_rank_two_particle(psi: &StateVector) -> Result<usize> {
    let basis = psi.basis();
    if basis.n() != 2 {
        return Err(Error::UnsupportedParticleNumber(basis.n()));
    }
    let coeffs = pair_coefficient_matrix(psi);
    let mut s: Vec<f64> = coeffs.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let nonzero: Vec<f64> = s.into_iter().filter(|&x| x > STRUCTURE_TOL).collect();
    Ok(match basis.statistics() {
        Statistics::Fermionic => nonzero.len().div_ceil(2),
        Statistics::Bosonic => {
            let mut rank = 0;
            let mut i = 0;
            while i < nonzero.len() {
                let mut j = i + 1;
                while j < nonzero.len() && (nonzero[i] - nonzero[j]).abs() <= STRUCTURE_TOL {
                    j += 1;
                }
                rank += (j - i).div_ceil(2);
                i = j;
            }
            rank
        }
    })
}

/// `A` with `ψ = Σ_ij A_ij a†_i a†_j |vac⟩`: antisymmetric for fermions,
/// symmetric for bosons.
fn pair_coefficient_matrix(psi: &StateVector) -> CMatrix {
    let basis = psi.basis();
    let d = basis.d();
    let mut a = CMatrix::zeros(d, d);
    for (k, &amp) in basis.states().iter().zip(psi.amplitudes().iter()) {
        let (i, j) = (k.modes()[0], k.modes()[1]);
        match basis.statistics() {
            Statistics::Fermionic => {
                a[(i, j)] = amp * 0.5;
                a[(j, i)] = -amp * 0.5;
            }
            Statistics::Bosonic if i == j => {
                a[(i, i)] = amp * std::f64::consts::FRAC_1_SQRT_2;
            }
            Statistics::Bosonic => {
                a[(i, j)] = amp * 0.5;
                a[(j, i)] = amp * 0.5;
            }
        }
    }
    a
}

/// Looks for a unitary `V` with `ρ = Γ(V) (Σ p_i |n·e_i⟩⟨n·e_i|) Γ(V)†`, every
/// particle of each eigenvector sitting in one mode. Such a `V` diagonalizes a
/// single-particle observable `M` with `[Γ(M), ρ] = 0`; the candidate is the
/// eigenbasis of a random element of that commutant. Always `None` for
/// fermions when `n ≥ 2`.
pub fn classical_witness(
    rho: &DensityMatrix,
    basis: &FockBasis,
    seed: u64,
) -> Result<Option<SingleParticleUnitary>> {
    check_dim(basis.dim(), rho.dim())?;
    if basis.statistics() == Statistics::Fermionic && basis.n() >= 2 {
        return Ok(None);
    }
    let d = basis.d();
    let dim = basis.dim();
    let m = rho.matrix();

    // Real linear map from generator coordinates to the commutator [Γ(E_p), ρ].
    let params = d * d;
    let mut map = nalgebra::DMatrix::<f64>::zeros(2 * dim * dim, params);
    let mut unit = vec![0.0; params];
    for p in 0..params {
        unit.iter_mut().for_each(|x| *x = 0.0);
        unit[p] = 1.0;
        let lifted = lift_quadratic(&hermitian_from_params(d, &unit), basis);
        let comm = &lifted * m - m * &lifted;
        for (idx, z) in comm.iter().enumerate() {
            map[(2 * idx, p)] = z.re;
            map[(2 * idx + 1, p)] = z.im;
        }
    }
    let svd = map.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let scale = svd.singular_values.max().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generator = vec![0.0; params];
    for (row, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= STRUCTURE_TOL * scale {
            let c: f64 = StandardNormal.sample(&mut rng);
            for (g, x) in generator.iter_mut().zip(v_t.row(row).iter()) {
                *g += c * x;
            }
        }
    }
    if params > svd.singular_values.len() {
        // Rows beyond the thin SVD are in the kernel as well.
        return Ok(None);
    }

    let (_, modes) = hermitian_eigen(&hermitian_from_params(d, &generator));
    let v = SingleParticleUnitary::from_matrix_unchecked(modes);
    let gamma = lift_unitary(&v, basis)?;
    let tau = gamma.adjoint() * m * &gamma;
    for c in 0..dim {
        for r in 0..dim {
            let entry: C64 = tau[(r, c)];
            let condensate = {
                let k = basis.state(r);
                k.modes().iter().all(|&x| x == k.modes()[0])
            };
            let off_diagonal = r != c;
            if (off_diagonal || !condensate) && entry.norm() > STRUCTURE_TOL {
                return Ok(None);
            }
        }
    }
    Ok(Some(v))
}

/// Position of a state in the hierarchy classical-only ⊂ no-quantumness ⊂
/// unentangled ⊂ all states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Only classical correlations: every eigenvector has all particles in one
    /// mode of a common orthonormal mode basis. Bosons only.
    ClassicalOnly,
    /// Zero quantumness of correlations.
    NoQuantumness,
    /// Mixed state with nonzero quantumness; whether it is entangled is not
    /// decided.
    Undecided,
    /// Pure state with nonzero quantumness, hence entangled.
    Correlated,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::ClassicalOnly => "C",
            Classification::NoQuantumness => "P",
            Classification::Undecided => "U-undecided",
            Classification::Correlated => "Q",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub class: Classification,
    pub quantumness: QuantumnessReport,
    pub slater_rank: Option<usize>,
    pub is_pure: bool,
    pub classical_witness: Option<SingleParticleUnitary>,
}

const PURITY_TOL: f64 = 1e-10;

pub fn classify(
    rho: &DensityMatrix,
    basis: &FockBasis,
    cfg: &OptimizerConfig,
) -> Result<ClassificationReport> {
    let report = quantumness(rho, basis, cfg)?;
    let witness = classical_witness(rho, basis, cfg.seed)?;
    let shared = Arc::new(basis.clone());
    let pure = rho.as_pure(&shared, PURITY_TOL);
    let slater_rank = match &pure {
        Some(psi) if basis.n() == 2 => Some(slater_rank_two_particle(psi)?),
        _ => None,
    };
    let zero_q = match slater_rank {
        Some(rank) => rank == 1,
        None => report.q_value <= ZERO_TOL,
    };
    let class = if witness.is_some() {
        Classification::ClassicalOnly
    } else if zero_q {
        Classification::NoQuantumness
    } else if pure.is_some() {
        Classification::Correlated
    } else {
        Classification::Undecided
    };
    Ok(ClassificationReport {
        class,
        quantumness: report,
        slater_rank,
        is_pure: pure.is_some(),
        classical_witness: witness,
    })
}
