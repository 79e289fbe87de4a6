//! Wigner functions of bosonic states from a discretized coherent-state path
//! integral.
//!
//! The crate evaluates the Wigner function of the family ρ_L(N) ∝ (ρ₁(N))^L
//! three ways and cross-checks them:
//!
//! * closed forms and the number-basis spectral sum ([`family`]),
//! * the angle integral over circle-supported paths, by tensor-product
//!   trapezoid quadrature or Monte Carlo ([`integrator`]),
//! * the stationary-phase approximation about the arc-shaped saddle path
//!   ([`saddle`]).
//!
//! The geometric action, whose real part measures link lengths and whose
//! imaginary part measures enclosed area, lives in [`action`].

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod action;
pub mod error;
pub mod exec;
pub mod family;
pub mod integrator;
pub mod phase;
pub mod quad;
pub mod saddle;
pub mod special;
pub mod validate;

pub use action::{
    chord_midpoint, circle_action, end_action, path_action, total_action, ActionValue, CirclePath, GenericPath,
};
pub use error::{Result, WignerError};
pub use exec::Execution;
pub use family::{
    gaussian_convolve_p1, hamiltonian_eigenvalue, log_partition, quadratic_approx, weights, wigner_number,
    wigner_poisson, wigner_spectral, FamilyParams, Method, WignerSample,
};
pub use integrator::{
    midpoint_histogram, wigner_montecarlo, wigner_quadrature, HistogramGrid, McResult, MidpointHistogram,
    MonteCarloSpec, PartitionRoute, QuadratureSpec,
};
pub use phase::{
    alpha_from_qp, coherent_overlap, displaced_parity_element, ComplexPoint, PhaseSpaceScale,
};
pub use saddle::{
    hessian_log_det, solve_saddle, stationary_action, stirling_log_partition, wigner_saddle, wigner_wkb, Branch,
    Normalization, SaddleSolution, Slices,
};
