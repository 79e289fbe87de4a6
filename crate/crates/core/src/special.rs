//! Special functions used by the closed-form Wigner functions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Result, WignerError};

/// Crossover between the power series and the asymptotic expansion of I₀.
const I0_SERIES_LIMIT: f64 = 20.0;

/// Largest argument of the exact log-factorial table.
pub const LOG_FACTORIAL_TABLE_MAX: usize = 1_000_000;

fn check_nonneg(x: f64) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(WignerError::Domain(format!("modified Bessel I0 needs x >= 0, got {x}")))
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// `e^{-x} √(2πx) I₀(x)` from the large-argument expansion, truncated at its smallest term.
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * x * k as f64);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function `I₀(x)` for `x ≥ 0`. Overflows to `inf` beyond `x ≈ 713`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_nonneg(x)?;
    if x < I0_SERIES_LIMIT {
        Ok(i0_series(x))
    } else {
        Ok(x.exp() / (2.0 * PI * x).sqrt() * i0_asymptotic_scaled(x))
    }
}

/// `ln I₀(x)`, finite for all finite `x ≥ 0`.
pub fn log_bessel_i0(x: f64) -> Result<f64> {
    check_nonneg(x)?;
    if x < I0_SERIES_LIMIT {
        Ok(i0_series(x).ln())
    } else {
        Ok(x - 0.5 * (2.0 * PI * x).ln() + i0_asymptotic_scaled(x).ln())
    }
}

/// Laguerre polynomial `Lₙ(x)` by forward recurrence
/// `(k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LOG_FACTORIAL_TABLE_MAX + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..=LOG_FACTORIAL_TABLE_MAX {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln n!` from a cumulative table (Stirling series beyond the table).
pub fn log_factorial(n: usize) -> f64 {
    if n <= LOG_FACTORIAL_TABLE_MAX {
        log_factorial_table()[n]
    } else {
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
    }
}
