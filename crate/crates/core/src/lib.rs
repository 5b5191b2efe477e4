//! Quantumness of correlations for systems of indistinguishable particles.
//!
//! The crate enumerates fermionic and bosonic Fock bases, lifts single-particle
//! unitaries and observables to the n-particle (anti)symmetric subspace, and
//! quantifies how much a state is disturbed by the least invasive
//! single-particle von Neumann measurement. The same number is obtained three
//! ways: as the minimal entanglement an apparatus picks up during the
//! measurement ([`activation`]), as the minimal entropy increase under
//! dephasing, and as a minimal relative entropy to the set of zero-quantumness
//! states ([`quantumness`]).

pub mod activation;
pub mod cli;
pub mod error;
pub mod fock;
pub mod lift;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod quantumness;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockBasis, OccupationVector, StateVector, Statistics};
pub use lift::{HermitianGenerator, SingleParticleObservable, SingleParticleUnitary};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
