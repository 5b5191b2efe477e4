//! Single-particle von Neumann measurements: the rank-one projectors onto the
//! rotated Fock basis `Γ(V)|k⟩` and the dephasing channel they induce.

use crate::error::{check_dim, Result};
use crate::fock::{DensityMatrix, FockBasis};
use crate::lift::{lift_unitary, SingleParticleUnitary};
use crate::{CMatrix, C64};

/// Projectors `Π_k = Γ(V)|k⟩⟨k|Γ(V)†`, one per basis state. Immutable once
/// built, so one family can serve many entropy evaluations.
#[derive(Debug, Clone)]
pub struct MeasurementFamily {
    unitary: SingleParticleUnitary,
    basis: FockBasis,
    lifted: CMatrix,
    projectors: Vec<CMatrix>,
}

impl MeasurementFamily {
    pub fn unitary(&self) -> &SingleParticleUnitary {
        &self.unitary
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    /// `Γ(V)`; column `k` is the measured vector for outcome `k`.
    pub fn lifted(&self) -> &CMatrix {
        &self.lifted
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

pub fn build_family(v: &SingleParticleUnitary, basis: &FockBasis) -> Result<MeasurementFamily> {
    let lifted = lift_unitary(v, basis)?;
    let projectors = (0..basis.dim())
        .map(|k| {
            let w = lifted.column(k);
            &w * w.adjoint()
        })
        .collect();
    Ok(MeasurementFamily {
        unitary: v.clone(),
        basis: basis.clone(),
        lifted,
        projectors,
    })
}

/// Born-rule probabilities `Tr(Π_k ρ)`.
pub fn outcome_probabilities(rho: &DensityMatrix, fam: &MeasurementFamily) -> Result<Vec<f64>> {
    check_dim(fam.basis.dim(), rho.dim())?;
    Ok(probabilities_in_columns(rho.matrix(), &fam.lifted))
}

/// `⟨w_k|ρ|w_k⟩` for every column `w_k` of `w`.
pub(crate) fn probabilities_in_columns(rho: &CMatrix, w: &CMatrix) -> Vec<f64> {
    let rw = rho * w;
    (0..w.ncols())
        .map(|k| {
            let p: C64 = w.column(k).dotc(&rw.column(k));
            p.re.max(0.0)
        })
        .collect()
}

/// `Σ_k Π_k ρ Π_k`.
pub fn dephase(rho: &DensityMatrix, fam: &MeasurementFamily) -> Result<DensityMatrix> {
    let probs = outcome_probabilities(rho, fam)?;
    let w = &fam.lifted;
    let mut scaled = w.clone();
    for (k, &p) in probs.iter().enumerate() {
        scaled.column_mut(k).scale_mut(p);
    }
    Ok(DensityMatrix::from_matrix_unchecked(scaled * w.adjoint()))
}
