//! Two interacting two-level atoms coupled to one cavity mode.
//!
//! The Hamiltonian conserves the number of excitations, so it splits into
//! blocks of at most 4×4 that are diagonalized in closed form
//! ([`spectrum`]). On top of that the crate evolves sector states
//! ([`dynamics`]), computes purity and concurrence of the two-atom reduced
//! state ([`entanglement`]) and provides the explicit time-domain and
//! concurrence–purity solutions of the equal-coupling resonant case
//! ([`symmetric`]).
//!
//! Every closed form has an independent numerical counterpart in
//! [`oracle`] or alongside it (Jacobi eigensolver, Dormand–Prince integrator,
//! general Wootters concurrence); [`validation`] measures their agreement.

// Small fixed-size matrices read most clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod oracle;
pub mod spectrum;
pub mod symmetric;
pub mod validation;

pub use dynamics::{
    evolve, evolve_oracle, reduced_density, AmplitudeState, InitialState, Propagator, ReducedDensity,
};
pub use entanglement::{
    concurrence_from_amplitudes, concurrence_wootters, purity, CPPoint, DensityMatrix,
};
pub use error::{Error, Result};
pub use model::{build_block, ModelParams, Sector, SectorBlock};
pub use spectrum::{spectral_decompose, Method, SpectralDecomposition};
pub use symmetric::{SymmetricConstants, SymmetricParams};
