//! Self-check suites reporting pass/fail items in a serialisable form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::family::{self, gaussian_convolve_p1, wigner_number, wigner_poisson, wigner_spectral, FamilyParams};
use crate::integrator::{wigner_montecarlo, wigner_quadrature, MonteCarloSpec, QuadratureSpec};
use crate::phase::ComplexPoint;
use crate::saddle::{hessian_log_det_at, hessian_matrix};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Oracle,
    Normalization,
    Determinant,
    Sign,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Oracle, Suite::Normalization, Suite::Determinant, Suite::Sign];

    pub fn tag(&self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Normalization => "normalization",
            Suite::Determinant => "determinant",
            Suite::Sign => "sign",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// The measured quantity (an error, an integral or a phase).
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub passed: bool,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    fn from_items(suite: Suite, items: Vec<CheckItem>) -> Self {
        let passed = items.iter().all(|i| i.passed);
        CheckReport { suite, passed, items }
    }
}

/// Knobs for the suites that involve sampling or heavy quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub points_per_dim: usize,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub sign_slices: Vec<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { points_per_dim: 128, samples: 1_000_000, seed: 42, workers: 0, sign_slices: (1..=5).collect() }
    }
}

pub fn run_suite(suite: Suite, opts: &CheckOptions) -> Result<CheckReport> {
    match suite {
        Suite::Oracle => oracle_suite(opts),
        Suite::Normalization => normalization_suite(opts),
        Suite::Determinant => Ok(determinant_suite(50, 7)),
        Suite::Sign => sign_suite(opts),
    }
}

fn quad_spec(opts: &CheckOptions) -> QuadratureSpec {
    QuadratureSpec { execution: Execution::from_workers(opts.workers), ..QuadratureSpec::with_points(opts.points_per_dim) }
}

/// Quadrature against the spectral sum, and the Poisson closed form against
/// the Gaussian smoothing of its P function.
pub fn oracle_suite(opts: &CheckOptions) -> Result<CheckReport> {
    let spec = quad_spec(opts);
    let mut items = Vec::new();
    for &(l, n) in &[(1usize, 1.5), (2, 1.5), (3, 1.5), (2, 10.5)] {
        let params = FamilyParams::new(l, n)?;
        let r_max = n.sqrt() + 2.0;
        let mut worst = 0.0f64;
        for k in 0..20 {
            let alpha = ComplexPoint::from_polar(r_max * k as f64 / 19.0, 0.3 * k as f64);
            let q = wigner_quadrature(alpha, &params, &spec)?.value;
            let e = wigner_spectral(alpha, &params);
            worst = worst.max((q - e).abs() / e.abs().max(0.01));
        }
        items.push(CheckItem {
            name: format!("quadrature-vs-spectral L={l} N={n}"),
            passed: worst <= 1e-6,
            value: worst,
            tolerance: 1e-6,
            detail: format!("M={}, 20 radial points", spec.points_per_dim),
        });
    }
    for &n in &[1.0f64, 10.5] {
        let mut worst = 0.0f64;
        for k in 0..30 {
            let alpha = ComplexPoint::from_polar((n.sqrt() + 2.0) * k as f64 / 29.0, 0.1 * k as f64);
            worst = worst.max((wigner_poisson(alpha, n) - gaussian_convolve_p1(alpha, n)?).abs());
        }
        items.push(CheckItem {
            name: format!("poisson-vs-p-convolution N={n}"),
            passed: worst <= 1e-8,
            value: worst,
            tolerance: 1e-8,
            detail: "absolute, 30 points".into(),
        });
    }
    Ok(CheckReport::from_items(Suite::Oracle, items))
}

/// `∫ W d²α` for six states.
pub fn normalization_suite(opts: &CheckOptions) -> Result<CheckReport> {
    let spec = quad_spec(opts);
    let mut items = Vec::new();
    let mut push = |name: String, value: f64| {
        items.push(CheckItem {
            name,
            passed: (value - 1.0).abs() <= 1e-6,
            value,
            tolerance: 1e-6,
            detail: "2π ∫ W s ds".into(),
        })
    };
    for &n in &[1.0f64, 10.5] {
        let r_max = n.sqrt() + 8.0;
        push(format!("poisson N={n}"), family::radial_integral(|s| wigner_poisson(ComplexPoint::real(s), n), r_max)?.value);
    }
    for &n in &[1usize, 10] {
        let r_max = (n as f64 + 0.5).sqrt() + 8.0;
        push(format!("number n={n}"), family::radial_integral(|s| wigner_number(ComplexPoint::real(s), n), r_max)?.value);
    }
    let p3 = FamilyParams::new(3, 1.5)?;
    let r3 = p3.occupation().sqrt() + 6.0;
    let failure = std::cell::RefCell::new(None);
    let v = family::radial_integral(
        |s| match wigner_quadrature(ComplexPoint::real(s), &p3, &spec) {
            Ok(w) => w.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        r3,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    push("family L=3 N=1.5 (quadrature)".into(), v?.value);
    let p2 = FamilyParams::new(2, 10.5)?;
    let r2 = family::radial_cutoff(&p2);
    push(
        "family L=2 N=10.5 (spectral)".into(),
        family::radial_integral(|s| wigner_spectral(ComplexPoint::real(s), &p2), r2)?.value,
    );
    Ok(CheckReport::from_items(Suite::Normalization, items))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn dense_determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].norm().total_cmp(&m[b][k].norm())).unwrap_or(k);
        if m[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pivot_row = m[k].clone();
        det *= pivot_row[k];
        for row in m.iter_mut().skip(k + 1) {
            let f = row[k] / pivot_row[k];
            for (x, p) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// Closed-form Hessian determinant against elimination on the assembled
/// matrix, for L = 3…10 and `trials` random complex half-angles each.
pub fn determinant_suite(trials: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::new();
    for l in 3..=10 {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let theta = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-0.5..0.5));
            let r = rng.random_range(0.5..3.5);
            let dense = dense_determinant(hessian_matrix(theta, r, l).expect("L >= 3"));
            let closed = hessian_log_det_at(theta, r, l).expect("L >= 3").exp();
            worst = worst.max((closed - dense).norm() / dense.norm());
        }
        items.push(CheckItem {
            name: format!("determinant L={l}"),
            passed: worst <= 1e-10,
            value: worst,
            tolerance: 1e-10,
            detail: format!("{trials} random complex θ"),
        });
    }
    CheckReport::from_items(Suite::Determinant, items)
}

/// Mean phase magnitude at α = 0.8, N = 1.5 across the requested L; the trend item
/// asserts it never rises by more than two combined standard errors per step.
pub fn sign_suite(opts: &CheckOptions) -> Result<CheckReport> {
    let mut items = Vec::new();
    let mut table = Vec::new();
    for &l in &opts.sign_slices {
        let params = FamilyParams::new(l, 1.5)?;
        let spec = MonteCarloSpec { workers: opts.workers, ..MonteCarloSpec::new(opts.samples, opts.seed) };
        let mc = wigner_montecarlo(ComplexPoint::real(0.8), &params, &spec)?;
        items.push(CheckItem {
            name: format!("mean-phase L={l}"),
            passed: mc.mean_phase_magnitude > 0.0,
            value: mc.mean_phase_magnitude,
            tolerance: 0.0,
            detail: format!("stderr {:.3e}, estimate {:.6e} ± {:.2e}", mc.mean_phase_stderr, mc.estimate, mc.standard_error),
        });
        table.push((l, mc.mean_phase_magnitude, mc.mean_phase_stderr));
    }
    let mut worst_rise = f64::NEG_INFINITY;
    let monotone = table.windows(2).all(|w| {
        let rise = w[1].1 - w[0].1;
        let allowed = 2.0 * (w[0].2.powi(2) + w[1].2.powi(2)).sqrt();
        worst_rise = worst_rise.max(rise - allowed);
        rise <= allowed
    });
    items.push(CheckItem {
        name: "mean-phase non-increasing".into(),
        passed: monotone,
        value: if table.len() < 2 { 0.0 } else { worst_rise },
        tolerance: 0.0,
        detail: "largest rise minus two combined standard errors".into(),
    });
    Ok(CheckReport::from_items(Suite::Sign, items))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_determinant_small_cases() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let m = vec![vec![c(0.0), c(2.0)], vec![c(3.0), c(1.0)]];
        assert!((dense_determinant(m) - c(-6.0)).norm() < 1e-15);
        let singular = vec![vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0)]];
        assert_eq!(dense_determinant(singular), c(0.0));
    }

    #[test]
    fn determinant_suite_passes() {
        let report = determinant_suite(10, 1);
        assert!(report.passed);
        assert_eq!(report.items.len(), 8);
    }
}
