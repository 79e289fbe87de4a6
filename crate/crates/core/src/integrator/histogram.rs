use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use super::circle_action_parts;
use super::montecarlo::MonteCarloSpec;
use crate::error::{Result, WignerError};
use crate::exec::Execution;
use crate::family::FamilyParams;
use crate::phase::ComplexPoint;

/// Square binning `[−h, h]²` of the α-plane with `bins × bins` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramGrid {
    pub bins: usize,
    pub half_width: f64,
}

impl HistogramGrid {
    /// Smallest grid covering `[−(√N + 3), √N + 3]²`.
    pub fn covering(params: &FamilyParams, bins: usize) -> Self {
        HistogramGrid { bins, half_width: params.radius() + 3.0 }
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.bins as f64
    }

    /// Center of cell (ix, iy); ix runs along Re α.
    pub fn center(&self, ix: usize, iy: usize) -> ComplexPoint {
        let w = self.cell_width();
        ComplexPoint::new(-self.half_width + (ix as f64 + 0.5) * w, -self.half_width + (iy as f64 + 0.5) * w)
    }

    fn locate(&self, z: Complex64) -> Option<usize> {
        let w = self.cell_width();
        let ix = ((z.re + self.half_width) / w).floor();
        let iy = ((z.im + self.half_width) / w).floor();
        let n = self.bins as f64;
        if ix < 0.0 || iy < 0.0 || ix >= n || iy >= n {
            return None;
        }
        Some(iy as usize * self.bins + ix as usize)
    }
}

/// Unnormalized functional histogram over chord midpoints: each sampled path adds
/// `e^{−S_path}` to the cell containing `(γ₁ + γ_L)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointHistogram {
    pub grid: HistogramGrid,
    /// Row-major (iy · bins + ix) complex sums.
    pub sums: Vec<Complex64>,
    pub counts: Vec<u64>,
    pub samples: u64,
    pub empty_bins: usize,
    log_partition: f64,
}

impl MidpointHistogram {
    pub fn sum_at(&self, ix: usize, iy: usize) -> Complex64 {
        self.sums[iy * self.grid.bins + ix]
    }

    pub fn count_at(&self, ix: usize, iy: usize) -> u64 {
        self.counts[iy * self.grid.bins + ix]
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.empty_bins == 0 {
            Vec::new()
        } else {
            vec![format!("{} of {} bins received no samples", self.empty_bins, self.sums.len())]
        }
    }

    /// Wigner estimate at α with the end-gap Gaussian `e^{−2|α − m|²}` applied
    /// analytically about each cell center m. The rectangle phase and the
    /// closing-link offset of the end term are not resolved by the histogram.
    pub fn smoothed_wigner(&self, alpha: ComplexPoint) -> f64 {
        let a = alpha.to_complex();
        let mut acc = 0.0;
        for iy in 0..self.grid.bins {
            for ix in 0..self.grid.bins {
                let v = self.sum_at(ix, iy);
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let m = self.grid.center(ix, iy).to_complex();
                acc += v.re * (-2.0 * (a - m).norm_sqr()).exp();
            }
        }
        2.0 / PI * acc / self.samples as f64 * (-self.log_partition).exp()
    }
}

/// Sample paths uniformly on the angle torus and histogram their chord midpoints.
pub fn midpoint_histogram(params: &FamilyParams, spec: &MonteCarloSpec, grid: HistogramGrid) -> Result<MidpointHistogram> {
    spec.check()?;
    if grid.bins == 0 {
        return Err(WignerError::InvalidSpec("histogram needs at least one bin".into()));
    }
    if grid.half_width < params.radius() + 3.0 {
        return Err(WignerError::InvalidSpec(format!(
            "grid half-width {} must cover sqrt(N) + 3 = {}",
            grid.half_width,
            params.radius() + 3.0
        )));
    }
    let slices = params.slices();
    let r = params.radius();
    let cells = grid.bins * grid.bins;
    // Batches are grouped into fixed blocks; each block fills one histogram.
    const BLOCK: u64 = 16;
    let n_batches = spec.batches();
    let n_blocks = n_batches.div_ceil(BLOCK) as usize;
    let exec = Execution::from_workers(spec.workers);
    let blocks = exec.map_collect(n_blocks, |blk| {
        let mut sums = vec![Complex64::new(0.0, 0.0); cells];
        let mut counts = vec![0u64; cells];
        let mut phases = vec![Complex64::new(1.0, 0.0); slices];
        let lo = blk as u64 * BLOCK;
        let hi = (lo + BLOCK).min(n_batches);
        for b in lo..hi {
            let mut rng = spec.batch_rng(b);
            for _ in 0..spec.batch_len(b) {
                for u in phases.iter_mut() {
                    *u = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
                }
                let parts = circle_action_parts(r, 0.0, &phases);
                let mid = 0.5 * r * (phases[0] + phases[slices - 1]);
                if let Some(cell) = grid.locate(mid) {
                    sums[cell] += (-parts.path).exp();
                    counts[cell] += 1;
                }
            }
        }
        (sums, counts)
    });
    let mut sums = vec![Complex64::new(0.0, 0.0); cells];
    let mut counts = vec![0u64; cells];
    for (bs, bc) in &blocks {
        for k in 0..cells {
            sums[k] += bs[k];
            counts[k] += bc[k];
        }
    }
    let empty_bins = counts.iter().filter(|&&c| c == 0).count();
    Ok(MidpointHistogram {
        grid,
        sums,
        counts,
        samples: spec.samples,
        empty_bins,
        log_partition: params.log_partition(),
    })
}
