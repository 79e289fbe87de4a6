use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::circle_action_parts;
use crate::error::{Result, WignerError};
use crate::exec::{pairwise_sum, Execution};
use crate::family::{FamilyParams, Method, WignerSample};
use crate::phase::ComplexPoint;

/// Default cap on the number of integrand evaluations (2³⁰).
pub const DEFAULT_BUDGET: u64 = 1 << 30;

/// Tolerance on `|Im Σ| / Σ |terms|` of the raw angle sum.
const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Uniform tensor-product grid over the L circle angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub points_per_dim: usize,
    pub budget: u64,
    pub execution: Execution,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { points_per_dim: 128, budget: DEFAULT_BUDGET, execution: Execution::default() }
    }
}

impl QuadratureSpec {
    pub fn with_points(points_per_dim: usize) -> Self {
        QuadratureSpec { points_per_dim, ..Default::default() }
    }

    fn check(&self, slices: usize) -> Result<()> {
        let m = self.points_per_dim;
        if m < 8 || !m.is_power_of_two() {
            return Err(WignerError::InvalidSpec(format!("points per dimension must be a power of two >= 8, got {m}")));
        }
        let mut total: u64 = 1;
        for _ in 0..slices {
            total = total.saturating_mul(m as u64);
        }
        if total > self.budget {
            return Err(WignerError::BudgetExceeded { points: m, dims: slices, budget: self.budget });
        }
        Ok(())
    }
}

/// Per-grid-point factor tables. The integrand at grid indices j_1..j_L is
///
/// `C · Π_{l≥2} link[j_l − j_{l−1}] · closing[j_1 − j_L] · first[j_1] · last[j_L]`
///
/// with every table entry of modulus ≤ 1 and the constant C carried as a logarithm.
struct FactorTables {
    m: usize,
    link: Vec<Complex64>,
    closing: Vec<Complex64>,
    first: Vec<Complex64>,
    last: Vec<Complex64>,
    log_scale: f64,
}

impl FactorTables {
    fn new(m: usize, slices: usize, r: f64, s: f64) -> Self {
        // Unit phases e^{-2πi d/M}, exactly conjugate-symmetric in d ↔ M − d.
        let mut unit = vec![Complex64::new(1.0, 0.0); m];
        for d in 1..=m / 2 {
            let z = Complex64::from_polar(1.0, -TAU * d as f64 / m as f64);
            unit[d] = z;
            unit[m - d] = z.conj();
        }
        let r2 = r * r;
        let rs2 = 2.0 * r * s;
        let link = unit.iter().map(|&u| (r2 * u - r2).exp()).collect();
        let closing = unit.iter().map(|&u| (-r2 * u - r2).exp()).collect();
        let first: Vec<Complex64> = unit.iter().map(|&u| (rs2 * u - rs2).exp()).collect();
        // e^{iψ_L} = unit[M − j_L]
        let last = (0..m).map(|j| first[(m - j) % m]).collect();
        let log_scale = if slices == 1 {
            // L = 1: the single vertex is both ends; the link tables are unused
            // and the closing factor must not enter.
            -2.0 * (r2 + s * s) + 2.0 * rs2
        } else {
            -(slices as f64 * r2 + 2.0 * s * s) + (slices as f64 - 1.0) * r2 + r2 + 2.0 * rs2
        };
        FactorTables { m, link, closing, first, last, log_scale }
    }

    /// Smallest log-modulus a product of table entries can reach.
    fn min_log_product(slices: usize, r: f64, s: f64) -> f64 {
        -2.0 * r * r * slices as f64 - 8.0 * r * s
    }
}

/// Sum of the integrand and of its modulus over one chunk of the grid.
fn chunk_sum(tables: &FactorTables, slices: usize, head: &[usize]) -> (Complex64, f64) {
    let m = tables.m;
    if slices == 1 {
        let j = head[0];
        let v = tables.first[j] * tables.last[j];
        return (v, v.norm());
    }
    // prefix product over the fixed leading indices
    let mut prefix = tables.first[head[0]];
    for w in head.windows(2) {
        prefix *= tables.link[(w[1] + m - w[0]) % m];
    }
    let free = slices - head.len();
    let j1 = head[0];
    if free == 0 {
        let jl = head[head.len() - 1];
        let v = prefix * tables.closing[(j1 + m - jl) % m] * tables.last[jl];
        return (v, v.norm());
    }
    let mut idx = vec![0usize; free];
    let mut partial = vec![Complex64::new(0.0, 0.0); free + 1];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let head_last = head[head.len() - 1];
    // partial[k] = prefix × links through free index k − 1
    partial[0] = prefix;
    let rebuild = |idx: &[usize], partial: &mut [Complex64], from: usize| {
        for k in from..idx.len() {
            let prev = if k == 0 { head_last } else { idx[k - 1] };
            partial[k + 1] = partial[k] * tables.link[(idx[k] + m - prev) % m];
        }
    };
    rebuild(&idx, &mut partial, 0);
    loop {
        let jl = idx[free - 1];
        let v = partial[free] * tables.closing[(j1 + m - jl) % m] * tables.last[jl];
        sum += v;
        abs_sum += v.norm();
        // odometer increment on the innermost index
        let mut k = free;
        loop {
            if k == 0 {
                return (sum, abs_sum);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
        }
        rebuild(&idx, &mut partial, k);
    }
}

/// Fallback with one exponential per grid point, used when the factor tables
/// could underflow.
fn chunk_sum_direct(m: usize, slices: usize, r: f64, s: f64, head: &[usize]) -> (Complex64, f64) {
    let free = slices - head.len();
    let total_inner = m.pow(free as u32);
    let mut phases = vec![Complex64::new(1.0, 0.0); slices];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (k, &j) in head.iter().enumerate() {
        phases[k] = Complex64::from_polar(1.0, TAU * j as f64 / m as f64);
    }
    for inner in 0..total_inner {
        let mut rest = inner;
        for k in (head.len()..slices).rev() {
            phases[k] = Complex64::from_polar(1.0, TAU * (rest % m) as f64 / m as f64);
            rest /= m;
        }
        let parts = circle_action_parts(r, s, &phases);
        let v = (-(parts.path + parts.end)).exp();
        sum += v;
        abs_sum += v.norm();
    }
    (sum, abs_sum)
}

/// W_L(α) by the periodic trapezoid rule on a uniform M^L angle grid offset to arg α.
///
/// The integrand is 2π-periodic and entire in each angle, so the rule converges
/// geometrically in M. Z_L is taken from the exact number-basis sum.
pub fn wigner_quadrature(alpha: ComplexPoint, params: &FamilyParams, spec: &QuadratureSpec) -> Result<WignerSample> {
    let slices = params.slices();
    spec.check(slices)?;
    let m = spec.points_per_dim;
    let r = params.radius();
    let s = alpha.modulus();

    let head_len = slices.min(2);
    let n_chunks = m.pow(head_len as u32);
    let head_of = |c: usize| -> Vec<usize> {
        if head_len == 1 {
            vec![c]
        } else {
            vec![c / m, c % m]
        }
    };

    let use_tables = FactorTables::min_log_product(slices, r, s) > -600.0;
    let (partials, log_scale): (Vec<(Complex64, f64)>, f64) = if use_tables {
        let tables = FactorTables::new(m, slices, r, s);
        let partials = spec.execution.map_collect(n_chunks, |c| chunk_sum(&tables, slices, &head_of(c)));
        (partials, tables.log_scale)
    } else {
        let partials = spec.execution.map_collect(n_chunks, |c| chunk_sum_direct(m, slices, r, s, &head_of(c)));
        (partials, 0.0)
    };
    let sums: Vec<Complex64> = partials.iter().map(|p| p.0).collect();
    let abs: Vec<f64> = partials.iter().map(|p| p.1).collect();
    let total = pairwise_sum(&sums);
    let abs_total = pairwise_sum(&abs);

    let residue = if abs_total > 0.0 { total.im.abs() / abs_total } else { 0.0 };
    if residue > IMAG_RESIDUE_TOL {
        return Err(WignerError::ImaginaryResidue { residue, tolerance: IMAG_RESIDUE_TOL });
    }
    let log_norm = log_scale - slices as f64 * (m as f64).ln() - params.log_partition();
    let value = 2.0 / PI * total.re * log_norm.exp();
    WignerSample::new(alpha, value, Method::Quadrature)
}
