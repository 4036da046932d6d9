//! Coherence created by cascades of lossless beam splitters.
//!
//! The l1-norm of coherence in the photon-number basis grows without bound
//! as a single populated input mode is split over more and more outputs.
//! This crate computes that growth along every closed-form route — coherent
//! inputs and their Gaussian approximation, number inputs via multinomial
//! sums, photon-number-diagonal mixtures, and the thermal asymptotic — and
//! arbitrates each one against a brute-force Fock-space propagation oracle.
//!
//! Module map:
//! - [`fock_basis`]: compositions of n photons over N+1 modes and sector
//!   dimensions.
//! - [`coherence`]: l1 coherence of pure states, density matrices, and
//!   sector-diagonal mixtures.
//! - [`analytic`]: the closed-form output coherences and approximations.
//! - [`network`]: beam-splitter cascades, their split vectors, and the two
//!   canonical equal-split layouts.
//! - [`oracle`]: exact two-mode Fock-space propagation, independent of the
//!   closed forms it checks.
//! - [`optimize`]: grid and perturbation confirmation of equal-split
//!   optimality.

pub mod analytic;
pub mod coherence;
mod error;
pub mod fock_basis;
pub mod network;
pub mod oracle;
pub mod optimize;
pub mod quadrature;
pub mod special;
pub mod tol;

pub use analytic::{
    coherent_coherence_single, gaussian_approx_single, max_coherent_approx,
    max_coherent_coherence, max_number_coherence, mixed_coherence, number_coherence,
    number_output_amplitudes, phase_averaged_comparison, product_coherence,
    supremum_coherence, thermal_coherence_approx, thermal_coherence_approx_check, Certified,
    DistributionKind, PhaseAveragedComparison, PhotonDistribution, QuadratureCheck,
};
pub use coherence::{
    l1_density, l1_pure, l1_pure_bound, l1_sector_mixture, DensityMatrix, PureFockState,
    SectorMixture,
};
pub use error::{Error, Result};
pub use fock_basis::{compositions, dimension, enumerate_compositions, Composition, SectorBasis};
pub use network::{config1, config2, optimal_split, tau_vector, BeamSplitter, Cascade, SplitVector};
pub use oracle::{apply_beamsplitter, coherent_input_state, propagate, TruncatedState};
pub use optimize::{
    grid_search_single_splitter, perturbation_test, InputKind, PerturbationReport, SweepResult,
};
pub use quadrature::GaussLaguerre;
