//! The number-diagonal family ρ_L(N) ∝ (ρ₁(N))^L interpolating between the
//! Poisson state (L = 1) and the number state |⌊N⌋⟩ (L → ∞), together with
//! the closed-form Wigner functions used as references.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WignerError};
use crate::phase::{alpha_from_qp, ComplexPoint, PhaseSpaceScale};
use crate::quad::{self, Integral};
use crate::special::{laguerre, log_bessel_i0, log_factorial};

/// Log-weight drop that defines the truncation point (tail factor < 1e-20).
pub const TAIL_LOG_DROP: f64 = 46.0;

/// Parameters of ρ_L(N) with the number-basis weights cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams {
    slices: usize,
    occupation: f64,
    n_max: usize,
    weights: Vec<f64>,
    log_partition: f64,
}

fn unnormalized_log_weight(slices: usize, occupation: f64, n: usize) -> f64 {
    slices as f64 * (n as f64 * occupation.ln() - log_factorial(n))
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

impl FamilyParams {
    /// Build with the automatic truncation rule.
    pub fn new(slices: usize, occupation: f64) -> Result<Self> {
        Self::validate(slices, occupation)?;
        let peak = occupation.floor() as usize;
        let peak_log = unnormalized_log_weight(slices, occupation, peak);
        let mut n = peak;
        while unnormalized_log_weight(slices, occupation, n) >= peak_log - TAIL_LOG_DROP {
            n += 1;
        }
        let floor = (4.0 * occupation + 20.0).ceil() as usize;
        Self::build(slices, occupation, n.max(floor))
    }

    /// Build with an explicit truncation; fails if the tail bound is not met.
    pub fn with_n_max(slices: usize, occupation: f64, n_max: usize) -> Result<Self> {
        Self::validate(slices, occupation)?;
        let peak = occupation.floor() as usize;
        let peak_log = unnormalized_log_weight(slices, occupation, peak);
        let tail = unnormalized_log_weight(slices, occupation, n_max);
        if n_max < peak || tail >= peak_log - TAIL_LOG_DROP {
            return Err(WignerError::Truncation {
                n_max,
                tail_log_weight: tail - peak_log,
                bound: -TAIL_LOG_DROP,
            });
        }
        Self::build(slices, occupation, n_max)
    }

    fn validate(slices: usize, occupation: f64) -> Result<()> {
        if slices == 0 {
            return Err(WignerError::Domain("number of slices L must be >= 1".into()));
        }
        if !(occupation > 0.0 && occupation.is_finite()) {
            return Err(WignerError::Domain(format!("occupation N must be positive, got {occupation}")));
        }
        Ok(())
    }

    fn build(slices: usize, occupation: f64, n_max: usize) -> Result<Self> {
        let logs: Vec<f64> = (0..=n_max)
            .map(|n| unnormalized_log_weight(slices, occupation, n))
            .collect();
        let lse = log_sum_exp(&logs);
        let mut weights: Vec<f64> = logs.iter().map(|l| (l - lse).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(FamilyParams {
            slices,
            occupation,
            n_max,
            weights,
            log_partition: lse - slices as f64 * occupation,
        })
    }

    /// Number of slices L (the inverse temperature).
    pub fn slices(&self) -> usize {
        self.slices
    }

    /// Mean occupation N of the underlying Poisson state; the circle radius is √N.
    pub fn occupation(&self) -> f64 {
        self.occupation
    }

    pub fn radius(&self) -> f64 {
        self.occupation.sqrt()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Normalized weights w_n, n = 0..=n_max.
    pub fn weight_slice(&self) -> &[f64] {
        &self.weights
    }

    /// ln Z_L(N).
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    /// Integer N sits on a discontinuity of the L → ∞ limit.
    pub fn is_integer_occupation(&self) -> bool {
        self.occupation.fract() == 0.0
    }
}

/// Number-basis weights `(n, w_n)` of ρ_L(N).
pub fn weights(params: &FamilyParams) -> Vec<(usize, f64)> {
    params.weights.iter().copied().enumerate().collect()
}

/// `ln Z_L(N) = ln[e^{−LN} Σ (Nⁿ/n!)^L]`.
pub fn log_partition(params: &FamilyParams) -> f64 {
    params.log_partition
}

/// Eigenvalue `N + ln n! − n ln N` of the Hamiltonian whose thermal states are ρ_L(N) at kT = 1/L.
pub fn hamiltonian_eigenvalue(n: usize, occupation: f64) -> f64 {
    occupation + log_factorial(n) - n as f64 * occupation.ln()
}

/// Quadratic (Stirling) approximation `½ ln 2πN + (n + ½ − N)² / 2N`.
pub fn quadratic_approx(n: usize, occupation: f64) -> f64 {
    let d = n as f64 + 0.5 - occupation;
    0.5 * (TAU * occupation).ln() + d * d / (2.0 * occupation)
}

/// Which evaluation route produced a Wigner value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactPoisson,
    ExactNumber,
    Spectral,
    Quadrature,
    MonteCarlo,
    Saddle,
    Wkb,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::ExactPoisson => "exact-poisson",
            Method::ExactNumber => "exact-number",
            Method::Spectral => "spectral",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
            Method::Saddle => "saddle",
            Method::Wkb => "wkb",
        }
    }
}

/// Monte Carlo error bars attached to a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McDiagnostics {
    pub standard_error: f64,
    pub mean_phase_magnitude: f64,
}

/// A Wigner function value at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerSample {
    pub alpha: ComplexPoint,
    pub value: f64,
    pub method: Method,
    pub mc: Option<McDiagnostics>,
}

/// Bound `|W| ≤ 2/π` obeyed by the Wigner function of every state.
pub const WIGNER_BOUND: f64 = 2.0 / PI;

impl WignerSample {
    pub fn new(alpha: ComplexPoint, value: f64, method: Method) -> Result<Self> {
        if !value.is_finite() {
            return Err(WignerError::Domain(format!("non-finite Wigner value at {alpha:?}")));
        }
        Ok(WignerSample { alpha, value, method, mc: None })
    }

    /// True if the value respects the physical bound. Asymptotic methods may violate it
    /// near their singular points.
    pub fn within_bound(&self) -> bool {
        self.value.abs() <= WIGNER_BOUND + 1e-9
    }
}

/// Poisson-state Wigner function `(2/π) e^{−2|α|²−2N} I₀(4√N|α|)`.
pub fn wigner_poisson(alpha: ComplexPoint, occupation: f64) -> f64 {
    let s = alpha.modulus();
    let x = 4.0 * occupation.sqrt() * s;
    let log_i0 = log_bessel_i0(x).expect("argument is non-negative");
    2.0 / PI * (-2.0 * s * s - 2.0 * occupation + log_i0).exp()
}

/// Number-state Wigner function `(2/π)(−1)ⁿ e^{−2|α|²} Lₙ(4|α|²)`.
pub fn wigner_number(alpha: ComplexPoint, n: usize) -> f64 {
    let s2 = alpha.norm_sqr();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    2.0 / PI * sign * (-2.0 * s2).exp() * laguerre(n, 4.0 * s2)
}

/// Exact W_L from the number-basis decomposition `Σ w_n W_{|n⟩}`.
pub fn wigner_spectral(alpha: ComplexPoint, params: &FamilyParams) -> f64 {
    let s2 = alpha.norm_sqr();
    let x = 4.0 * s2;
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    let w = params.weight_slice();
    let mut acc = w[0] * prev;
    if w.len() > 1 {
        acc -= w[1] * cur;
    }
    for n in 1..w.len().saturating_sub(1) {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - x) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        let sign = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * w[n + 1] * cur;
    }
    2.0 / PI * (-2.0 * s2).exp() * acc
}

/// W of the Poisson state as the Gaussian smoothing of its P function, evaluated
/// as an adaptive angular integral over the circle `|β| = √N`:
/// `(2/π) (1/2π) ∫ dθ exp(−2|α − √N e^{iθ}|²)`.
pub fn gaussian_convolve_p1(alpha: ComplexPoint, occupation: f64) -> Result<f64> {
    if occupation.is_nan() || occupation <= 0.0 {
        return Err(WignerError::Domain(format!("occupation N must be positive, got {occupation}")));
    }
    let r = occupation.sqrt();
    let s = alpha.modulus();
    // Reflection symmetry about the direction of α: integrate θ − φ over [0, π] and double.
    let integrand = |t: f64| {
        let d2 = s * s + r * r - 2.0 * r * s * t.cos();
        (-2.0 * d2).exp()
    };
    let scale = (-2.0 * (s - r) * (s - r)).exp();
    let res = quad::integrate(integrand, 0.0, PI, 1e-13 * scale, 1e-12)?;
    Ok(2.0 / PI * res.value / PI)
}

/// `2π ∫₀^R W(s) s ds` for a phase-rotation invariant Wigner function.
pub fn radial_integral<F>(w: F, r_max: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let integral = quad::integrate(|s| w(s) * s, 0.0, r_max, 1e-11, 1e-10)?;
    Ok(Integral {
        value: TAU * integral.value,
        error_estimate: TAU * integral.error_estimate,
        evaluations: integral.evaluations,
    })
}

/// Upper radius used for normalization integrals of ρ_L(N).
pub fn radial_cutoff(params: &FamilyParams) -> f64 {
    (params.n_max() as f64).sqrt() + 6.0
}

/// Position marginal `∫ W(q, p) dp` by the trapezoid rule on `[−p_max, p_max]`,
/// with `W(q, p)` the (q, p)-density of the α-plane function `w`.
pub fn position_marginal<F>(w: F, q: f64, scale: &PhaseSpaceScale, p_max: f64, points: usize) -> f64
where
    F: Fn(ComplexPoint) -> f64,
{
    let h = 2.0 * p_max / (points - 1) as f64;
    let jac = scale.area_jacobian();
    let mut sum = 0.0;
    for k in 0..points {
        let p = -p_max + k as f64 * h;
        let weight = if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
        sum += weight * w(alpha_from_qp(q, p, scale));
    }
    sum * h * jac
}
