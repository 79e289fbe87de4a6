//! Direct evaluation of the circle-path integral for W_L.
//!
//! With every vertex on the circle |γ| = √N, the Wigner function of ρ_L(N) is
//!
//! `W_L(α) = (2/π) Z_L⁻¹ ∫ Π dθ_l/2π exp(−S_L[θ, α])`,
//!
//! where the leading 2/π is the normalization of the displaced parity operator.
//! At L = 1 this reduces exactly to the Poisson closed form.

mod histogram;
mod montecarlo;
mod quadrature;

pub use histogram::{midpoint_histogram, HistogramGrid, MidpointHistogram};
pub use montecarlo::{wigner_montecarlo, McResult, MonteCarloSpec, PartitionRoute};
pub use quadrature::{wigner_quadrature, QuadratureSpec, DEFAULT_BUDGET};

use num_complex::Complex64;

/// Split action of one circle path, angles measured relative to arg α.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CircleActionParts {
    pub path: Complex64,
    pub end: Complex64,
}

/// Evaluate `S_path` and `S_end` for unit phases `u_l = e^{iψ_l}` on a circle of radius r,
/// with α = s on the positive real axis.
pub(crate) fn circle_action_parts(r: f64, s: f64, phases: &[Complex64]) -> CircleActionParts {
    let r2 = r * r;
    let l = phases.len();
    let first = phases[0];
    let last = phases[l - 1];
    let mut prev = last;
    let mut links = Complex64::new(0.0, 0.0);
    for &u in phases {
        links += prev * u.conj();
        prev = u;
    }
    let path = Complex64::new(l as f64 * r2, 0.0) - r2 * links;
    let end = Complex64::new(2.0 * s * s, 0.0) - 2.0 * r * s * (first.conj() + last) + 2.0 * r2 * last * first.conj();
    CircleActionParts { path, end }
}
