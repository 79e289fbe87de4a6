//! Phase-space primitives in the complex α-plane.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WignerError};

/// Oscillator scale relating (q, p) to the dimensionless α-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceScale {
    mass: f64,
    frequency: f64,
    hbar: f64,
}

impl Default for PhaseSpaceScale {
    fn default() -> Self {
        PhaseSpaceScale { mass: 1.0, frequency: 1.0, hbar: 1.0 }
    }
}

impl PhaseSpaceScale {
    pub fn new(mass: f64, frequency: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("frequency", frequency), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(WignerError::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(PhaseSpaceScale { mass, frequency, hbar })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    fn q_factor(&self) -> f64 {
        (self.mass * self.frequency / (2.0 * self.hbar)).sqrt()
    }

    fn p_factor(&self) -> f64 {
        1.0 / (2.0 * self.mass * self.hbar * self.frequency).sqrt()
    }

    /// Inverse of [`alpha_from_qp`].
    pub fn qp_from_alpha(&self, alpha: ComplexPoint) -> (f64, f64) {
        (alpha.re / self.q_factor(), alpha.im / self.p_factor())
    }

    /// Jacobian `d²α / (dq dp)`; densities in (q, p) are α-plane densities times this.
    pub fn area_jacobian(&self) -> f64 {
        self.q_factor() * self.p_factor()
    }
}

/// A point of the α-plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub const ORIGIN: ComplexPoint = ComplexPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        ComplexPoint { re, im }
    }

    pub fn from_polar(modulus: f64, argument: f64) -> Self {
        let (sin, cos) = argument.sin_cos();
        ComplexPoint { re: modulus * cos, im: modulus * sin }
    }

    /// Point on the positive real axis, `|α| = s`, `φ = 0`.
    pub fn real(s: f64) -> Self {
        ComplexPoint { re: s, im: 0.0 }
    }

    /// Modulus `s`.
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument `φ ∈ [0, 2π)`.
    pub fn argument(&self) -> f64 {
        let a = self.im.atan2(self.re);
        if a < 0.0 {
            let shifted = a + TAU;
            if shifted >= TAU {
                0.0
            } else {
                shifted
            }
        } else {
            a
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint { re: z.re, im: z.im }
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

/// `α = √(mω/2ħ) q + i p / √(2mħω)`.
pub fn alpha_from_qp(q: f64, p: f64, scale: &PhaseSpaceScale) -> ComplexPoint {
    ComplexPoint { re: scale.q_factor() * q, im: scale.p_factor() * p }
}

/// Logarithm of the coherent-state overlap `⟨β|γ⟩`.
pub fn ln_coherent_overlap(beta: ComplexPoint, gamma: ComplexPoint) -> Complex64 {
    let b = beta.to_complex();
    let g = gamma.to_complex();
    Complex64::new(-0.5 * b.norm_sqr() - 0.5 * g.norm_sqr(), 0.0) + b.conj() * g
}

/// `⟨β|γ⟩ = exp(−|β|²/2 − |γ|²/2 + β*γ)`.
pub fn coherent_overlap(beta: ComplexPoint, gamma: ComplexPoint) -> Complex64 {
    ln_coherent_overlap(beta, gamma).exp()
}

/// Logarithm of `⟨β|(π/2)δ₂(α − â)|γ⟩`.
pub fn ln_displaced_parity_element(alpha: ComplexPoint, beta: ComplexPoint, gamma: ComplexPoint) -> Complex64 {
    let a = alpha.to_complex();
    let b = beta.to_complex();
    let g = gamma.to_complex();
    -2.0 * (a - g) * (a.conj() - b.conj()) + ln_coherent_overlap(beta, gamma)
}

/// Matrix element of the displaced parity operator,
/// `exp(−2(α−γ)(α*−β*)) ⟨β|γ⟩`.
pub fn displaced_parity_element(alpha: ComplexPoint, beta: ComplexPoint, gamma: ComplexPoint) -> Complex64 {
    ln_displaced_parity_element(alpha, beta, gamma).exp()
}

/// Same matrix element written as a phase times the overlap with the
/// reflected state: `exp(−αγ* + α*γ) ⟨β|2α−γ⟩`.
pub fn displaced_parity_element_reflected(alpha: ComplexPoint, beta: ComplexPoint, gamma: ComplexPoint) -> Complex64 {
    let a = alpha.to_complex();
    let g = gamma.to_complex();
    let reflected = ComplexPoint::from(2.0 * a - g);
    (-a * g.conj() + a.conj() * g + ln_coherent_overlap(beta, reflected)).exp()
}

/// Wigner function of the coherent state `|γ⟩`: `(2/π) exp(−2|α−γ|²)`.
pub fn wigner_coherent(alpha: ComplexPoint, gamma: ComplexPoint) -> f64 {
    let d = alpha.to_complex() - gamma.to_complex();
    2.0 / PI * (-2.0 * d.norm_sqr()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn alpha_mapping_examples() {
        let unit = PhaseSpaceScale::default();
        assert_eq!(alpha_from_qp(0.0, 0.0, &unit), ComplexPoint::ORIGIN);
        let a = alpha_from_qp(1.0, 0.0, &unit);
        assert!((a.re - 0.5f64.sqrt()).abs() < 1e-15 && a.im == 0.0);
        let scale = PhaseSpaceScale::new(2.0, 0.5, 1.0).unwrap();
        let a = alpha_from_qp(2.0, 3.0, &scale);
        assert!((a.re - 0.5f64.sqrt() * 2.0).abs() < 1e-15);
        assert!((a.im - 3.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scale_rejects_nonpositive() {
        assert!(PhaseSpaceScale::new(0.0, 1.0, 1.0).is_err());
        assert!(PhaseSpaceScale::new(1.0, -1.0, 1.0).is_err());
        assert!(PhaseSpaceScale::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn overlap_examples() {
        let g = ComplexPoint::new(0.3, -1.2);
        assert!(close(coherent_overlap(g, g), Complex64::new(1.0, 0.0), 1e-15));
        let v = coherent_overlap(ComplexPoint::ORIGIN, g);
        assert!(close(v, Complex64::new((-g.norm_sqr() / 2.0).exp(), 0.0), 1e-15));

        // Number-basis expansion ⟨β|γ⟩ = e^{-|β|²/2-|γ|²/2} Σ (β*γ)^n / n!, truncated at n = 60.
        let beta = Complex64::new(1.0, 0.0);
        let gamma = Complex64::new(0.0, 1.0);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..=60 {
            term *= beta.conj() * gamma / n as f64;
            sum += term;
        }
        let oracle = sum * (-0.5 * beta.norm_sqr() - 0.5 * gamma.norm_sqr()).exp();
        let v = coherent_overlap(ComplexPoint::real(1.0), ComplexPoint::new(0.0, 1.0));
        assert!(close(v, oracle, 1e-14));
        assert!(close(v, Complex64::new(-1.0, 1.0).exp(), 1e-15));
    }

    #[test]
    fn displaced_parity_examples() {
        let g = ComplexPoint::new(0.4, 0.9);
        assert!(close(displaced_parity_element(g, g, g), Complex64::new(1.0, 0.0), 1e-15));
        let v = displaced_parity_element(ComplexPoint::ORIGIN, g, g);
        assert!(close(v, Complex64::new((-2.0 * g.norm_sqr()).exp(), 0.0), 1e-14));

        let alpha = ComplexPoint::real(0.5);
        let beta = ComplexPoint::real(1.0);
        let gamma = ComplexPoint::new(0.0, 1.0);
        let expected = (-2.0 * Complex64::new(0.5, -1.0) * Complex64::new(-0.5, 0.0)).exp()
            * Complex64::new(-1.0, 1.0).exp();
        assert!(close(displaced_parity_element(alpha, beta, gamma), expected, 1e-14));
        assert!(close(displaced_parity_element_reflected(alpha, beta, gamma), expected, 1e-12));
    }

    fn point() -> impl Strategy<Value = ComplexPoint> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| ComplexPoint::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn parity_element_is_hermitian(a in point(), b in point(), g in point()) {
            let lhs = displaced_parity_element(a, b, g);
            let rhs = displaced_parity_element(a, g, b).conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1e-300));
        }

        #[test]
        fn two_parity_forms_agree(a in point(), b in point(), g in point()) {
            let lhs = displaced_parity_element(a, b, g);
            let rhs = displaced_parity_element_reflected(a, b, g);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1e-300));
        }

        #[test]
        fn coherent_wigner_from_parity(a in point(), g in point()) {
            let v = displaced_parity_element(a, g, g) * (2.0 / PI);
            let w = wigner_coherent(a, g);
            prop_assert!(v.im.abs() <= 1e-12 * w.max(1e-300));
            prop_assert!(v.re > 0.0);
            prop_assert!((v.re - w).abs() <= 1e-12 * w);
        }

        #[test]
        fn overlap_modulus(b in point(), g in point()) {
            let m = coherent_overlap(b, g).norm();
            let d = b.to_complex() - g.to_complex();
            let expected = (-0.5 * d.norm_sqr()).exp();
            prop_assert!((m - expected).abs() <= 1e-12 * expected);
            prop_assert!(m <= 1.0 + 1e-15);
        }

        #[test]
        fn qp_round_trip(q in -50.0f64..50.0, p in -50.0f64..50.0,
                         m in 0.1f64..10.0, w in 0.1f64..10.0, h in 0.1f64..10.0) {
            let scale = PhaseSpaceScale::new(m, w, h).unwrap();
            let (q2, p2) = scale.qp_from_alpha(alpha_from_qp(q, p, &scale));
            prop_assert!((q2 - q).abs() <= 1e-12 * q.abs().max(1.0));
            prop_assert!((p2 - p).abs() <= 1e-12 * p.abs().max(1.0));
        }

        #[test]
        fn polar_views_agree(s in 0.0f64..20.0, phi in 0.0f64..TAU) {
            let z = ComplexPoint::from_polar(s, phi);
            prop_assert!((z.modulus() - s).abs() <= 1e-14 * s.max(1.0));
            let back = ComplexPoint::from_polar(z.modulus(), z.argument());
            prop_assert!((back.re - z.re).abs() <= 1e-13 * s.max(1.0));
            prop_assert!((back.im - z.im).abs() <= 1e-13 * s.max(1.0));
            prop_assert!(z.argument() >= 0.0 && z.argument() < TAU);
        }
    }
}
