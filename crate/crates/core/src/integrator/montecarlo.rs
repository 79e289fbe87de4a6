use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::circle_action_parts;
use crate::error::{Result, WignerError};
use crate::exec::Execution;
use crate::family::FamilyParams;
use crate::phase::ComplexPoint;

/// Source of Z_L in the Monte Carlo ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PartitionRoute {
    /// Exact number-basis sum.
    #[default]
    Exact,
    /// Same-sample estimate `⟨e^{−S_path}⟩` of the angular representation.
    Angular,
}

/// Uniform sampling of the angle torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSpec {
    pub samples: u64,
    pub seed: u64,
    /// 0 = rayon global pool, 1 = sequential.
    pub workers: usize,
    pub batch_size: u64,
    pub partition: PartitionRoute,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        MonteCarloSpec { samples: 1_000_000, seed: 42, workers: 0, batch_size: 10_000, partition: PartitionRoute::Exact }
    }
}

impl MonteCarloSpec {
    pub fn new(samples: u64, seed: u64) -> Self {
        MonteCarloSpec { samples, seed, ..Default::default() }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(WignerError::InvalidSpec(format!("need at least 1000 samples, got {}", self.samples)));
        }
        if self.batch_size == 0 || self.batch_size > self.samples / 2 {
            return Err(WignerError::InvalidSpec(format!(
                "batch size {} must be positive and allow at least two batches",
                self.batch_size
            )));
        }
        Ok(())
    }

    pub(crate) fn batches(&self) -> u64 {
        self.samples.div_ceil(self.batch_size)
    }

    pub(crate) fn batch_len(&self, batch: u64) -> u64 {
        self.batch_size.min(self.samples - batch * self.batch_size)
    }

    /// Independent stream for one batch; the assignment depends only on (seed, batch).
    pub(crate) fn batch_rng(&self, batch: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(batch);
        rng
    }
}

/// Monte Carlo estimate of W_L with sign-problem diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McResult {
    pub estimate: f64,
    pub standard_error: f64,
    /// `|Σ e^{−S}| / Σ e^{−Re S}`: the reweighted average phase.
    pub mean_phase_magnitude: f64,
    pub mean_phase_stderr: f64,
    /// Kish effective sample size of the weights `e^{−Re S}`.
    pub effective_sample_size: f64,
    pub samples: u64,
    /// Estimate with Z_L from the same samples, and its error bar.
    pub angular_estimate: f64,
    pub angular_standard_error: f64,
    /// Same-sample estimate of the angular Z_L.
    pub angular_partition: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct BatchStats {
    n: u64,
    weight_re: f64,
    weight: Complex64,
    magnitude: f64,
    magnitude_sq: f64,
    path_re: f64,
}

fn run_batch(spec: &MonteCarloSpec, batch: u64, slices: usize, r: f64, s: f64) -> BatchStats {
    let mut rng = spec.batch_rng(batch);
    let n = spec.batch_len(batch);
    let mut phases = vec![Complex64::new(1.0, 0.0); slices];
    let mut stats = BatchStats { n, ..Default::default() };
    for _ in 0..n {
        for u in phases.iter_mut() {
            *u = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
        }
        let parts = circle_action_parts(r, s, &phases);
        let w = (-(parts.path + parts.end)).exp();
        let mag = (-(parts.path.re + parts.end.re)).exp();
        stats.weight_re += w.re;
        stats.weight += w;
        stats.magnitude += mag;
        stats.magnitude_sq += mag * mag;
        stats.path_re += (-parts.path).exp().re;
    }
    stats
}

/// Weighted mean and its standard error from per-batch means.
fn batch_mean_error(values: &[(f64, f64)]) -> (f64, f64) {
    let total: f64 = values.iter().map(|v| v.1).sum();
    let mean = values.iter().map(|v| v.0 * v.1).sum::<f64>() / total;
    let b = values.len() as f64;
    let var = values.iter().map(|v| v.1 * (v.0 - mean).powi(2)).sum::<f64>() / total * b / (b - 1.0);
    (mean, (var / b).sqrt())
}

/// W_L(α) from uniform samples of the angle torus, with batch-means error bars.
///
/// Identical (seed, batch size, sample count) give bit-identical results for any
/// worker count: each batch owns a ChaCha stream and batches are reduced in order.
pub fn wigner_montecarlo(alpha: ComplexPoint, params: &FamilyParams, spec: &MonteCarloSpec) -> Result<McResult> {
    spec.check()?;
    let slices = params.slices();
    let r = params.radius();
    let s = alpha.modulus();
    let exec = Execution::from_workers(spec.workers);
    let stats = exec.map_collect(spec.batches() as usize, |b| run_batch(spec, b as u64, slices, r, s));

    let prefactor = 2.0 / PI * (-params.log_partition()).exp();
    let mut total = BatchStats::default();
    for b in &stats {
        total.n += b.n;
        total.weight_re += b.weight_re;
        total.weight += b.weight;
        total.magnitude += b.magnitude;
        total.magnitude_sq += b.magnitude_sq;
        total.path_re += b.path_re;
    }
    let per_batch = |f: &dyn Fn(&BatchStats) -> f64| -> Vec<(f64, f64)> {
        stats.iter().map(|b| (f(b), b.n as f64)).collect()
    };

    let (mean_w, err_w) = batch_mean_error(&per_batch(&|b| b.weight_re / b.n as f64));
    let (_, phase_err) = batch_mean_error(&per_batch(&|b| b.weight.norm() / b.magnitude));
    let (_, ratio_err) = batch_mean_error(&per_batch(&|b| b.weight_re / b.path_re));

    let mean_phase = (total.weight.norm() / total.magnitude).clamp(0.0, 1.0);
    let angular_ratio = total.weight_re / total.path_re;
    let exact = prefactor * mean_w;
    let angular = 2.0 / PI * angular_ratio;
    let (estimate, standard_error) = match spec.partition {
        PartitionRoute::Exact => (exact, prefactor * err_w),
        PartitionRoute::Angular => (angular, 2.0 / PI * ratio_err),
    };
    Ok(McResult {
        estimate,
        standard_error,
        mean_phase_magnitude: mean_phase,
        mean_phase_stderr: phase_err,
        effective_sample_size: total.magnitude * total.magnitude / total.magnitude_sq,
        samples: total.n,
        angular_estimate: angular,
        angular_standard_error: 2.0 / PI * ratio_err,
        angular_partition: total.path_re / total.n as f64,
    })
}
