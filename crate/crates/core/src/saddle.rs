//! Stationary-phase evaluation of the circle-path integral.
//!
//! The action is analytic in the angles θ_l. Its stationary points are arcs of
//! equally spaced angles `θ_l = (2l − L − 1)/(L − 1) · θ` whose half-angle θ solves
//!
//! `s = (r/2) (e^{iθ} + e^{−iθ(L+1)/(L−1)})`,
//!
//! which tends to `s = r cos θ` as L → ∞ (the chord of the arc passes through α).
//! Inside the circle there is a pair of saddles ±θ related by time reversal; outside
//! there is a single purely imaginary saddle on the decaying branch.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WignerError};
use crate::family::{FamilyParams, Method, WignerSample};
use crate::phase::ComplexPoint;

/// `|s/r − 1|` below which both asymptotic forms are singular.
pub const TURNING_TOLERANCE: f64 = 1e-3;
/// `|α| / r` below which the ¼-power prefactor is singular.
pub const ORIGIN_TOLERANCE: f64 = 1e-3;
/// Default number of slices for the finite-L prefactor.
pub const DEFAULT_SLICES: usize = 512;

const MAX_NEWTON: usize = 100;

/// Number of time slices, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slices {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// s < r: oscillatory, pair of saddles.
    Interior,
    /// s > r: decaying, one imaginary saddle.
    Exterior,
    /// |s/r − 1| inside the turning tolerance.
    Turning,
}

impl Branch {
    pub fn classify(s: f64, r: f64) -> Branch {
        if (s / r - 1.0).abs() < TURNING_TOLERANCE {
            Branch::Turning
        } else if s < r {
            Branch::Interior
        } else {
            Branch::Exterior
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Branch::Interior => "interior",
            Branch::Exterior => "exterior",
            Branch::Turning => "turning",
        }
    }
}

/// A solved saddle of the circle-path action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleSolution {
    /// Arc half-angle θ.
    pub theta: Complex64,
    pub slices: Slices,
    pub s: f64,
    pub r: f64,
    pub branch: Branch,
    /// `S_L⁽⁰⁾`
    pub stationary_action: Complex64,
    /// `ln det S_L⁽²⁾`, available for finite L ≥ 3.
    pub log_det_hessian: Option<Complex64>,
    /// `t = e^{2iLθ/(L−1)}`, finite L only.
    pub t: Option<Complex64>,
    /// `|s − (r/2)(e^{iθ} + e^{−iθ(L+1)/(L−1)})|`, or `|s − r cos θ|` for L = ∞.
    pub residual: f64,
    pub iterations: usize,
}

fn exponent_ratio(l: usize) -> f64 {
    (l as f64 + 1.0) / (l as f64 - 1.0)
}

fn saddle_equation(theta: Complex64, s: f64, r: f64, l: usize) -> (Complex64, Complex64) {
    let k = exponent_ratio(l);
    let i = Complex64::i();
    let a = (i * theta).exp();
    let b = (-i * k * theta).exp();
    let f = 0.5 * r * (a + b) - s;
    let df = 0.5 * r * i * (a - k * b);
    (f, df)
}

/// Solve the saddle equation by complex Newton iteration from the L = ∞ seed.
pub fn solve_saddle(s: f64, r: f64, slices: Slices) -> Result<SaddleSolution> {
    if !(s >= 0.0 && s.is_finite()) || !(r > 0.0 && r.is_finite()) {
        return Err(WignerError::Domain(format!("saddle needs s >= 0 and r > 0, got s={s}, r={r}")));
    }
    let branch = Branch::classify(s, r);
    if branch == Branch::Turning {
        return Err(WignerError::TurningRegion { distance: (s / r - 1.0).abs(), tolerance: TURNING_TOLERANCE });
    }
    let u = s / r;
    let seed = match branch {
        Branch::Interior => Complex64::new(u.acos(), 0.0),
        _ => Complex64::new(0.0, u.acosh()),
    };
    let (theta, residual, iterations) = match slices {
        Slices::Infinite => (seed, (s - r * seed.cos().re).abs().max((r * seed.cos().im).abs()), 0),
        Slices::Finite(l) => {
            if l < 2 {
                return Err(WignerError::Domain(format!("saddle needs L >= 2, got {l}")));
            }
            let mut theta = seed;
            let mut trace = Vec::new();
            let scale = s.max(r);
            let mut converged = None;
            for it in 1..=MAX_NEWTON {
                let (f, df) = saddle_equation(theta, s, r, l);
                trace.push(f.norm());
                let step = f / df;
                theta -= step;
                if !theta.re.is_finite() || !theta.im.is_finite() {
                    break;
                }
                let res = saddle_equation(theta, s, r, l).0.norm();
                let settled = res <= 1e-14 * scale || step.norm() <= 1e-14 * theta.norm().max(1.0);
                if settled && res <= 1e-12 * scale {
                    converged = Some((theta, res, it));
                    break;
                }
            }
            match converged {
                Some(c) => c,
                None => return Err(WignerError::NewtonNonConvergence { iterations: MAX_NEWTON, trace }),
            }
        }
    };
    let mut sol = SaddleSolution {
        theta,
        slices,
        s,
        r,
        branch,
        stationary_action: Complex64::new(0.0, 0.0),
        log_det_hessian: None,
        t: None,
        residual,
        iterations,
    };
    sol.stationary_action = stationary_action(&sol);
    if let Slices::Finite(l) = slices {
        sol.t = Some(hessian_t(theta, l));
        if l >= 3 {
            sol.log_det_hessian = Some(hessian_log_det_at(theta, r, l)?);
        }
    }
    if branch == Branch::Exterior && sol.stationary_action.re <= 0.0 {
        return Err(WignerError::Domain(format!(
            "exterior saddle converged to the growing branch at s={s}, r={r}"
        )));
    }
    Ok(sol)
}

/// Saddle angles `θ_l = (2l − L − 1)/(L − 1) · θ`, l = 1..L.
pub fn saddle_angles(theta: Complex64, l: usize) -> Vec<Complex64> {
    (1..=l)
        .map(|k| theta * ((2 * k) as f64 - l as f64 - 1.0) / (l as f64 - 1.0))
        .collect()
}

/// Time-reversed partner saddle θ → −θ*.
pub fn time_reversed(sol: &SaddleSolution) -> SaddleSolution {
    let theta = -sol.theta.conj();
    let mut out = *sol;
    out.theta = theta;
    out.stationary_action = stationary_action(&out);
    if let Slices::Finite(l) = sol.slices {
        out.t = Some(hessian_t(theta, l));
        out.log_det_hessian = if l >= 3 { hessian_log_det_at(theta, sol.r, l).ok() } else { None };
    }
    out
}

/// Action at the saddle for the given half-angle.
pub fn stationary_action_at(theta: Complex64, r: f64, slices: Slices) -> Complex64 {
    let i = Complex64::i();
    let r2 = r * r;
    match slices {
        Slices::Finite(l) => {
            let lf = l as f64;
            let k = exponent_ratio(l);
            lf * r2 * (1.0 - (-2.0 * i * theta / (lf - 1.0)).exp())
                + 0.5 * r2 * ((-2.0 * i * theta * k).exp() - (2.0 * i * theta).exp())
        }
        Slices::Infinite => i * r2 * (2.0 * theta - (2.0 * theta).sin()),
    }
}

/// `S_L⁽⁰⁾` of a solved saddle.
pub fn stationary_action(sol: &SaddleSolution) -> Complex64 {
    stationary_action_at(sol.theta, sol.r, sol.slices)
}

fn hessian_t(theta: Complex64, l: usize) -> Complex64 {
    (Complex64::i() * theta * (2.0 * l as f64 / (l as f64 - 1.0))).exp()
}

/// `ln det S_L⁽²⁾ = ln[r^{2L} t⁻¹ ((1+L) + 2t + (1−L)t²)]`, with `ln t = 2iLθ/(L−1)` taken
/// analytically so that the square root follows the L → ∞ branch.
pub fn hessian_log_det_at(theta: Complex64, r: f64, l: usize) -> Result<Complex64> {
    if l < 3 {
        return Err(WignerError::Domain(format!("Hessian closed form needs L >= 3, got {l}")));
    }
    let lf = l as f64;
    let log_t = Complex64::i() * theta * (2.0 * lf / (lf - 1.0));
    let t = log_t.exp();
    let bracket = (1.0 + lf) + 2.0 * t + (1.0 - lf) * t * t;
    Ok(2.0 * lf * r.ln() - log_t + bracket.ln())
}

pub fn hessian_log_det(sol: &SaddleSolution) -> Result<Complex64> {
    match sol.slices {
        Slices::Finite(l) => hessian_log_det_at(sol.theta, sol.r, l),
        Slices::Infinite => Err(WignerError::Domain("Hessian determinant needs finite L".into())),
    }
}

/// The L×L second-derivative matrix at the saddle (dense, row-major).
pub fn hessian_matrix(theta: Complex64, r: f64, l: usize) -> Result<Vec<Vec<Complex64>>> {
    if l < 3 {
        return Err(WignerError::Domain(format!("Hessian matrix needs L >= 3, got {l}")));
    }
    let lf = l as f64;
    let pre = r * r * (-2.0 * Complex64::i() * theta / (lf - 1.0)).exp();
    let t = hessian_t(theta, l);
    let mut m = vec![vec![Complex64::new(0.0, 0.0); l]; l];
    for k in 0..l {
        m[k][k] = 2.0 * pre;
        if k + 1 < l {
            m[k][k + 1] = -pre;
            m[k + 1][k] = -pre;
        }
    }
    m[0][l - 1] = t * pre;
    m[l - 1][0] = t * pre;
    Ok(m)
}

/// Gaussian contribution `(2/π) e^{−S⁰} / ((2π)^{L/2} Z_L √det S⁽²⁾)` of one saddle.
pub fn saddle_contribution(sol: &SaddleSolution, log_partition: f64) -> Result<Complex64> {
    let l = match sol.slices {
        Slices::Finite(l) => l,
        Slices::Infinite => return Err(WignerError::Domain("saddle contribution needs finite L".into())),
    };
    let log_det = hessian_log_det(sol)?;
    let log_value = (2.0 / PI).ln() - sol.stationary_action - 0.5 * log_det
        - 0.5 * l as f64 * TAU.ln()
        - log_partition;
    Ok(log_value.exp())
}

/// Stationary-phase W_L at finite L from the solved saddles themselves
/// (both time-reversed partners inside the circle).
pub fn wigner_saddle_finite(alpha: ComplexPoint, params: &FamilyParams) -> Result<f64> {
    let l = params.slices();
    let r = params.radius();
    let s = alpha.modulus();
    check_regions(s, r)?;
    let sol = solve_saddle(s, r, Slices::Finite(l))?;
    let lz = params.log_partition();
    let c = saddle_contribution(&sol, lz)?;
    let total = match sol.branch {
        Branch::Interior => c + saddle_contribution(&time_reversed(&sol), lz)?,
        _ => c,
    };
    Ok(total.re)
}

fn check_regions(s: f64, r: f64) -> Result<()> {
    if s < ORIGIN_TOLERANCE * r {
        return Err(WignerError::OriginRegion { modulus: s, limit: ORIGIN_TOLERANCE * r });
    }
    if Branch::classify(s, r) == Branch::Turning {
        return Err(WignerError::TurningRegion { distance: (s / r - 1.0).abs(), tolerance: TURNING_TOLERANCE });
    }
    Ok(())
}

/// Phase `(2n+1) arccos(u) − 2s√(r² − s²) − π/4` of the interior cosine.
fn interior_phase(s: f64, r: f64) -> f64 {
    let r2 = r * r;
    2.0 * r2 * (s / r).acos() - 2.0 * s * (r2 - s * s).sqrt() - FRAC_PI_4
}

/// L → ∞ shape of the saddle-point Wigner function of |n⟩ with r² = n + ½, up to
/// normalization: `cos(phase) / [u²(1−u²)]^{1/4}` inside and
/// `exp((2n+1) arccosh u − 2s√(s²−r²)) / (2[u²(u²−1)]^{1/4})` outside, u = s/r.
pub fn number_state_shape(s: f64, n: usize) -> Result<f64> {
    let r2 = n as f64 + 0.5;
    let r = r2.sqrt();
    check_regions(s, r)?;
    let u = s / r;
    if u < 1.0 {
        Ok(interior_phase(s, r).cos() / (u * u * (1.0 - u * u)).powf(0.25))
    } else {
        let exponent = 2.0 * r2 * u.acosh() - 2.0 * s * (s * s - r2).sqrt();
        Ok(exponent.exp() / (2.0 * (u * u * (u * u - 1.0)).powf(0.25)))
    }
}

/// Normalization applied to the saddle-point shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `(2/π) / ((2π)^{L/2} L^{1/2} Z_L r^L)` with exact Z_L.
    Raw,
    /// Raw rescaled by one constant so the envelope equals the WKB envelope at
    /// `|α| = √((n+½)/2)`.
    WkbMatched,
}

fn log_raw_prefactor(n: usize, l: usize) -> Result<f64> {
    let r2 = n as f64 + 0.5;
    let params = FamilyParams::new(l, r2)?;
    let lf = l as f64;
    Ok((2.0 / PI).ln() - 0.5 * lf * TAU.ln() - 0.5 * lf.ln() - params.log_partition() - 0.5 * lf * r2.ln())
}

fn log_wkb_envelope(s: f64, r2: f64) -> f64 {
    -0.5 * (PI.powi(3) / 2.0).ln() - 0.25 * (s * s * (r2 - s * s)).ln()
}

/// Saddle-point Wigner function of the number state |n⟩ (N = n + ½).
pub fn wigner_saddle(alpha: ComplexPoint, n: usize, slices: usize, normalization: Normalization) -> Result<WignerSample> {
    if slices < 3 {
        return Err(WignerError::Domain(format!("saddle prefactor needs L >= 3, got {slices}")));
    }
    let s = alpha.modulus();
    let shape = number_state_shape(s, n)?;
    let log_raw = log_raw_prefactor(n, slices)?;
    let log_pref = match normalization {
        Normalization::Raw => log_raw,
        Normalization::WkbMatched => {
            let r2 = n as f64 + 0.5;
            let s_ref = (r2 / 2.0).sqrt();
            let u = s_ref / r2.sqrt();
            let log_shape_env = -0.25 * (u * u * (1.0 - u * u)).ln();
            let scale = log_wkb_envelope(s_ref, r2) - (log_raw + log_shape_env);
            log_raw + scale
        }
    };
    WignerSample::new(alpha, shape * log_pref.exp(), Method::Saddle)
}

/// The same shape with the Stirling form of Z_L substituted:
/// inside `cos(phase) / (L^{1/2} (1 + 1/24n)^L [u²(1−u²)]^{1/4})`, outside the decaying analogue.
pub fn wigner_saddle_stirling(alpha: ComplexPoint, n: usize, slices: usize) -> Result<f64> {
    if n == 0 {
        return Err(WignerError::Domain("Stirling prefactor needs n >= 1".into()));
    }
    let shape = number_state_shape(alpha.modulus(), n)?;
    let lf = slices as f64;
    Ok(shape / (lf.sqrt() * (1.0 + 1.0 / (24.0 * n as f64)).powf(lf)))
}

/// Semiclassical (WKB) Wigner function of |n⟩ inside the energy surface.
pub fn wigner_wkb(alpha: ComplexPoint, n: usize) -> Result<WignerSample> {
    let r2 = n as f64 + 0.5;
    let r = r2.sqrt();
    let s = alpha.modulus();
    check_regions(s, r)?;
    if s > r {
        return Err(WignerError::Domain(format!("WKB form is the interior branch only, |alpha| = {s} > {r}")));
    }
    let value = interior_phase(s, r).cos() * log_wkb_envelope(s, r2).exp();
    WignerSample::new(alpha, value, Method::Wkb)
}

/// Stirling estimate `ln Z_L(n + ½) ≈ −(L/2) ln[2π(n + 5/12)]`; keeps only the
/// dominant number state, so it needs L large compared with n.
pub fn stirling_log_partition(n: usize, slices: usize) -> Result<f64> {
    if n < 2 {
        return Err(WignerError::Domain(format!("Stirling partition needs n >= 2, got {n}")));
    }
    Ok(-0.5 * slices as f64 * (TAU * (n as f64 + 5.0 / 12.0)).ln())
}
