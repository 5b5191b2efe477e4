//! The activation protocol: rotate the system by `Γ(V)`, then couple it to an
//! apparatus of equal dimension prepared in `|0⟩` with
//! `U|s⟩|j⟩ = |s⟩|j + s mod D⟩`. The apparatus records the Fock-basis outcome,
//! and any entanglement created in the process measures the quantumness of the
//! system's correlations for that choice of `V`.
//!
//! Joint indices are `system_index * D_M + apparatus_index`.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::fock::{DensityMatrix, FockBasis};
use crate::lift::{lift_unitary, SingleParticleUnitary};
use crate::linalg::kron;
use crate::quantumness::von_neumann_entropy;
use crate::{CMatrix, C64};

/// Off-pattern entries above this magnitude break the maximally correlated form.
pub const MAX_CORR_TOL: f64 = 1e-10;

/// Density matrix of system ⊗ apparatus.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    system_dim: usize,
    apparatus_dim: usize,
    state: DensityMatrix,
}

impl JointState {
    pub fn new(system_dim: usize, apparatus_dim: usize, matrix: CMatrix) -> Result<Self> {
        check_dim(system_dim * apparatus_dim, matrix.nrows())?;
        Ok(JointState {
            system_dim,
            apparatus_dim,
            state: DensityMatrix::new(matrix)?,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_dim
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Apparatus,
}

/// The coupling as a permutation of joint indices: `perm[in] = out`.
pub fn coupling_permutation(dim: usize) -> Vec<usize> {
    (0..dim * dim)
        .map(|idx| {
            let (s, j) = (idx / dim, idx % dim);
            s * dim + (j + s) % dim
        })
        .collect()
}

/// Permutation matrix of the system-apparatus coupling (D²×D²).
pub fn coupling_unitary(dim: usize) -> CMatrix {
    let perm = coupling_permutation(dim);
    let mut u = CMatrix::zeros(dim * dim, dim * dim);
    for (col, &row) in perm.iter().enumerate() {
        u[(row, col)] = C64::new(1.0, 0.0);
    }
    u
}

/// `U[(Γ(V) ρ Γ(V)†) ⊗ |0⟩⟨0|]U†` with `D_M = D`.
pub fn run_protocol(
    rho: &DensityMatrix,
    v: &SingleParticleUnitary,
    basis: &FockBasis,
) -> Result<JointState> {
    let dim = basis.dim();
    check_dim(dim, rho.dim())?;
    let gamma = lift_unitary(v, basis)?;
    let rotated = rho.conjugate_by(&gamma);
    let mut apparatus = CMatrix::zeros(dim, dim);
    apparatus[(0, 0)] = C64::new(1.0, 0.0);
    let u = coupling_unitary(dim);
    let joint = &u * kron(rotated.matrix(), &apparatus) * u.adjoint();
    Ok(JointState {
        system_dim: dim,
        apparatus_dim: dim,
        state: DensityMatrix::from_matrix_unchecked(joint),
    })
}

/// Coefficients `χ_{l,l'}` of the maximally correlated output
/// `Σ χ_{l,l'} |l⟩⟨l'| ⊗ |l⟩⟨l'|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxCorrCoefficients {
    chi: CMatrix,
}

impl MaxCorrCoefficients {
    pub fn chi(&self) -> &CMatrix {
        &self.chi
    }

    /// Builds `Σ χ_{l,l'} |l⟩⟨l'| ⊗ |l⟩⟨l'|`.
    pub fn to_joint_state(&self) -> JointState {
        let dim = self.chi.nrows();
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for l in 0..dim {
            for lp in 0..dim {
                m[(l * dim + l, lp * dim + lp)] = self.chi[(l, lp)];
            }
        }
        JointState {
            system_dim: dim,
            apparatus_dim: dim,
            state: DensityMatrix::from_matrix_unchecked(m),
        }
    }
}

/// `χ = Γ(V) ρ Γ(V)†` in the Fock basis.
pub fn max_corr_coefficients(
    rho: &DensityMatrix,
    v: &SingleParticleUnitary,
    basis: &FockBasis,
) -> Result<MaxCorrCoefficients> {
    check_dim(basis.dim(), rho.dim())?;
    let gamma = lift_unitary(v, basis)?;
    Ok(MaxCorrCoefficients {
        chi: rho.conjugate_by(&gamma).into_matrix(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxCorrCheck {
    pub holds: bool,
    /// Largest modulus among entries outside `(l,l) -> (l',l')`.
    pub max_off_pattern: f64,
}

pub fn verify_maximally_correlated(js: &JointState) -> MaxCorrCheck {
    if js.system_dim != js.apparatus_dim {
        return MaxCorrCheck {
            holds: false,
            max_off_pattern: f64::INFINITY,
        };
    }
    let dim = js.system_dim;
    let m = js.matrix();
    let on_pattern = |idx: usize| idx / dim == idx % dim;
    let mut worst = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if on_pattern(r) && on_pattern(c) {
                continue;
            }
            worst = worst.max(m[(r, c)].norm());
        }
    }
    MaxCorrCheck {
        holds: worst <= MAX_CORR_TOL,
        max_off_pattern: worst,
    }
}

pub fn partial_trace(js: &JointState, keep: Subsystem) -> DensityMatrix {
    let (ds, dm) = (js.system_dim, js.apparatus_dim);
    let m = js.matrix();
    let out = match keep {
        Subsystem::System => CMatrix::from_fn(ds, ds, |i, j| {
            (0..dm).map(|a| m[(i * dm + a, j * dm + a)]).sum()
        }),
        Subsystem::Apparatus => CMatrix::from_fn(dm, dm, |a, b| {
            (0..ds).map(|s| m[(s * dm + a, s * dm + b)]).sum()
        }),
    };
    DensityMatrix::from_matrix_unchecked(out)
}

/// `S(Tr_M ρ) - S(ρ)` in nats, the distillable entanglement and relative
/// entropy of entanglement of a maximally correlated state.
pub fn entanglement_maxcorr(js: &JointState) -> Result<f64> {
    let check = verify_maximally_correlated(js);
    if !check.holds {
        return Err(Error::NotMaxCorrelated(check.max_off_pattern));
    }
    let reduced = partial_trace(js, Subsystem::System);
    Ok(von_neumann_entropy(&reduced) - von_neumann_entropy(js.state()))
}
