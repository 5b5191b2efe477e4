//! Fock bases for n indistinguishable particles over d single-particle modes,
//! second-quantized operator matrices, and validated state containers.
//!
//! Basis states are labelled by sorted mode lists: strictly increasing for
//! fermions, non-decreasing for bosons. The basis is ordered lexicographically
//! on those lists and every basis vector has unit norm, so a bosonic doubly
//! occupied mode `(0,0)` stands for `(b†₀)²|vac⟩ / √2`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_defect};
use crate::{CMatrix, CVector, C64};

/// Tolerance on the norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on Hermiticity and trace of a [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted in a [`DensityMatrix`].
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermionic,
    Bosonic,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Fermionic => f.write_str("fermionic"),
            Statistics::Bosonic => f.write_str("bosonic"),
        }
    }
}

/// Mode-occupation label of a Slater determinant or permanent: the sorted list
/// of occupied modes, with repeats for bosons.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(modes: Vec<usize>) -> Self {
        OccupationVector(modes)
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    /// Particle number.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of particles in `mode`.
    pub fn multiplicity(&self, mode: usize) -> usize {
        self.0.iter().filter(|&&m| m == mode).count()
    }

    /// `∏ m_i!` over all modes.
    pub fn multiplicity_factorial(&self) -> f64 {
        let mut prod = 1.0;
        let mut run = 0usize;
        for (i, &m) in self.0.iter().enumerate() {
            run = if i > 0 && self.0[i - 1] == m { run + 1 } else { 1 };
            prod *= run as f64;
        }
        prod
    }

    /// Whether the ordering rule of `stats` holds.
    pub fn is_canonical(&self, stats: Statistics) -> bool {
        self.0.windows(2).all(|w| match stats {
            Statistics::Fermionic => w[0] < w[1],
            Statistics::Bosonic => w[0] <= w[1],
        })
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<usize>> for OccupationVector {
    fn from(v: Vec<usize>) -> Self {
        OccupationVector(v)
    }
}

/// Ordered enumeration of the n-particle basis together with its inverse map.
#[derive(Debug, Clone)]
pub struct FockBasis {
    d: usize,
    n: usize,
    statistics: Statistics,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n && self.statistics == other.statistics
    }
}

impl FockBasis {
    pub fn new(d: usize, n: usize, statistics: Statistics) -> Result<Self> {
        enumerate_basis(d, n, statistics)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Dimension of the (anti)symmetric subspace.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &OccupationVector {
        &self.states[index]
    }

    pub fn index_of(&self, k: &OccupationVector) -> Option<usize> {
        self.index.get(k).copied()
    }

    fn same_sector_family(&self, other: &FockBasis) -> bool {
        self.d == other.d && self.statistics == other.statistics
    }
}

/// Lists every n-particle occupation vector over `d` modes in lexicographic order.
pub fn enumerate_basis(d: usize, n: usize, statistics: Statistics) -> Result<FockBasis> {
    if d < 1 || n < 1 {
        return Err(Error::InvalidDimension(format!(
            "need d >= 1 and n >= 1, got d = {d}, n = {n}"
        )));
    }
    if statistics == Statistics::Fermionic && n > d {
        return Err(Error::InvalidDimension(format!(
            "{n} fermions do not fit into {d} modes"
        )));
    }

    let mut states = Vec::new();
    let mut current = Vec::with_capacity(n);
    fill(d, n, statistics, 0, &mut current, &mut states);

    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBasis {
        d,
        n,
        statistics,
        states,
        index,
    })
}

fn fill(
    d: usize,
    n: usize,
    stats: Statistics,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<OccupationVector>,
) {
    if current.len() == n {
        out.push(OccupationVector(current.clone()));
        return;
    }
    for mode in start..d {
        current.push(mode);
        let next = match stats {
            Statistics::Fermionic => mode + 1,
            Statistics::Bosonic => mode,
        };
        fill(d, n, stats, next, current, out);
        current.pop();
    }
}

/// Applies `a†_mode` to a sorted occupation list. Returns the amplitude and the
/// resulting list, or `None` when the result vanishes (Pauli exclusion).
///
/// Fermionic sign: `(-1)^(number of occupied modes below mode)`.
/// Bosonic factor: `√(m_mode + 1)`.
pub fn apply_creation(stats: Statistics, modes: &[usize], mode: usize) -> Option<(f64, Vec<usize>)> {
    let below = modes.iter().filter(|&&m| m < mode).count();
    let same = modes.iter().filter(|&&m| m == mode).count();
    let amp = match stats {
        Statistics::Fermionic => {
            if same > 0 {
                return None;
            }
            if below % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        Statistics::Bosonic => ((same + 1) as f64).sqrt(),
    };
    let mut out = Vec::with_capacity(modes.len() + 1);
    out.extend_from_slice(&modes[..below + same]);
    out.push(mode);
    out.extend_from_slice(&modes[below + same..]);
    Some((amp, out))
}

/// Applies `a_mode` to a sorted occupation list; adjoint of [`apply_creation`].
pub fn apply_annihilation(
    stats: Statistics,
    modes: &[usize],
    mode: usize,
) -> Option<(f64, Vec<usize>)> {
    let pos = modes.iter().position(|&m| m == mode)?;
    let same = modes.iter().filter(|&&m| m == mode).count();
    let amp = match stats {
        // `pos` counts the occupied modes below `mode`.
        Statistics::Fermionic => {
            if pos % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        Statistics::Bosonic => (same as f64).sqrt(),
    };
    let mut out = modes.to_vec();
    out.remove(pos);
    Some((amp, out))
}

/// Matrix of `a†_mode` from the n-particle sector into the (n+1)-particle sector.
pub fn creation_matrix(mode: usize, from: &FockBasis, to: &FockBasis) -> Result<CMatrix> {
    if !from.same_sector_family(to) || to.n != from.n + 1 {
        return Err(Error::BasisMismatch(format!(
            "creation needs sectors (d, n) -> (d, n+1) of one statistics; got ({}, {}, {}) -> ({}, {}, {})",
            from.d, from.n, from.statistics, to.d, to.n, to.statistics
        )));
    }
    if mode >= from.d {
        return Err(Error::InvalidDimension(format!(
            "mode {mode} out of range for d = {}",
            from.d
        )));
    }
    let mut m = CMatrix::zeros(to.dim(), from.dim());
    for (col, k) in from.states.iter().enumerate() {
        if let Some((amp, target)) = apply_creation(from.statistics, k.modes(), mode) {
            let row = to.index[&OccupationVector(target)];
            m[(row, col)] = C64::new(amp, 0.0);
        }
    }
    Ok(m)
}

/// Matrix of `a_mode` from the (n+1)-particle sector `from` into `to`.
pub fn annihilation_matrix(mode: usize, from: &FockBasis, to: &FockBasis) -> Result<CMatrix> {
    Ok(creation_matrix(mode, to, from)?.adjoint())
}

/// Unit-norm complex amplitude vector over a Fock basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: CVector) -> Result<Self> {
        check_dim(basis.dim(), amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm is {norm}, expected 1")));
        }
        Ok(StateVector { basis, amplitudes })
    }

    /// Rescales to unit norm; returns the state and the original norm.
    pub fn normalized(basis: Arc<FockBasis>, amplitudes: CVector) -> Result<(Self, f64)> {
        check_dim(basis.dim(), amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        Ok((
            StateVector {
                basis,
                amplitudes: amplitudes.unscale(norm),
            },
            norm,
        ))
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: &OccupationVector) -> Option<C64> {
        self.basis.index_of(k).map(|i| self.amplitudes[i])
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Canonical basis vector for occupation `k`.
pub fn slater_state(k: &OccupationVector, basis: &Arc<FockBasis>) -> Result<StateVector> {
    let idx = basis
        .index_of(k)
        .ok_or_else(|| Error::UnknownOccupation(k.modes().to_vec()))?;
    let mut amps = CVector::zeros(basis.dim());
    amps[idx] = C64::new(1.0, 0.0);
    Ok(StateVector {
        basis: Arc::clone(basis),
        amplitudes: amps,
    })
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > DENSITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |ρ - ρ†| = {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let (vals, _) = hermitian_eigen(&matrix);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (smallest eigenvalue {min:e})"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Wraps a matrix produced by a trace-preserving positive map of a valid state.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = &psi.amplitudes;
        DensityMatrix {
            matrix: a * a.adjoint(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| C64::new(p, 0.0)),
        ));
        DensityMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        crate::linalg::trace_of_product(&self.matrix, &self.matrix).re
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut vals = hermitian_eigen(&self.matrix).0;
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    /// Returns the pure state vector if the rank is one (within `tol` on purity).
    pub fn as_pure(&self, basis: &Arc<FockBasis>, tol: f64) -> Option<StateVector> {
        if (self.purity() - 1.0).abs() > tol || basis.dim() != self.dim() {
            return None;
        }
        let (vals, vecs) = hermitian_eigen(&self.matrix);
        let (top, _) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        let v = vecs.column(top).into_owned();
        StateVector::normalized(Arc::clone(basis), v).ok().map(|(s, _)| s)
    }

    /// `U ρ U†` for a unitary `u`.
    pub(crate) fn conjugate_by(&self, u: &CMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: u * &self.matrix * u.adjoint(),
        }
    }
}
