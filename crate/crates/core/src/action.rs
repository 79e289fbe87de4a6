//! Geometric action of discretized coherent-state paths.
//!
//! A path is a closed polygon γ₁…γ_L with the periodic convention γ₀ ≡ γ_L, so
//! the Bargmann term includes the closing link γ_L → γ₁. The end term connecting
//! the path to the evaluation point α cancels that closing link in the real part,
//! leaving L − 1 internal links plus the gap between α and the chord midpoint.
//!
//! The Hamiltonian enters the full path-integral weight only through
//! `exp(−β Σ P_H(γ_l)/L)`; for the circle-supported family handled here that
//! factor is constant and is absorbed into the partition function.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WignerError};
use crate::phase::ComplexPoint;

/// Vertices γ₁…γ_L of a discretized path.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericPath {
    vertices: Vec<Complex64>,
}

impl GenericPath {
    pub fn new(vertices: Vec<ComplexPoint>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(WignerError::Domain("a path needs at least one vertex".into()));
        }
        if !vertices.iter().all(ComplexPoint::is_finite) {
            return Err(WignerError::Domain("path vertices must be finite".into()));
        }
        Ok(GenericPath { vertices: vertices.into_iter().map(Complex64::from).collect() })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, l: usize) -> ComplexPoint {
        self.vertices[l].into()
    }

    pub fn vertices(&self) -> impl Iterator<Item = ComplexPoint> + '_ {
        self.vertices.iter().map(|&z| z.into())
    }

    /// Reverse the vertex order (time reversal).
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        GenericPath { vertices }
    }

    fn first(&self) -> Complex64 {
        self.vertices[0]
    }

    fn last(&self) -> Complex64 {
        self.vertices[self.vertices.len() - 1]
    }
}

/// Path with all vertices on the circle of radius r: γ_l = r e^{iθ_l}.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePath {
    radius: f64,
    angles: Vec<f64>,
}

impl CirclePath {
    pub fn new(radius: f64, angles: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(WignerError::Domain(format!("circle radius must be positive, got {radius}")));
        }
        if angles.is_empty() || !angles.iter().all(|a| a.is_finite()) {
            return Err(WignerError::Domain("a circle path needs at least one finite angle".into()));
        }
        Ok(CirclePath { radius, angles })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_generic(&self) -> GenericPath {
        GenericPath {
            vertices: self.angles.iter().map(|&t| Complex64::from_polar(self.radius, t)).collect(),
        }
    }
}

/// Complex action with its decomposition into link lengths and enclosed area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionValue {
    pub total: Complex64,
    /// ½ Σ_{l=2}^{L} |γ_l − γ_{l−1}|²
    pub re_internal_links: f64,
    /// 2 |α − (γ₁ + γ_L)/2|²
    pub re_end_gap: f64,
    /// Im Σ_l γ_l γ*_{l−1} + 2 Im (α − γ_L)(α* − γ₁*): twice the signed area
    /// of the polygon plus the end rectangle.
    pub im_area: f64,
}

/// Bargmann term `Σ_l (½|γ_l − γ_{l−1}|² + i Im γ_l γ*_{l−1})`, γ₀ ≡ γ_L.
pub fn path_action(path: &GenericPath) -> Complex64 {
    let v = &path.vertices;
    let mut prev = path.last();
    let mut total = Complex64::new(0.0, 0.0);
    for &g in v {
        total += Complex64::new(0.5 * (g - prev).norm_sqr(), (g * prev.conj()).im);
        prev = g;
    }
    total
}

/// End term `2(α − γ_L)(α* − γ₁*)`.
pub fn end_action(path: &GenericPath, alpha: ComplexPoint) -> Complex64 {
    let a = alpha.to_complex();
    2.0 * (a - path.last()) * (a.conj() - path.first().conj())
}

/// Midpoint `(γ₁ + γ_L)/2` of the chord joining the path ends.
pub fn chord_midpoint(path: &GenericPath) -> ComplexPoint {
    (0.5 * (path.first() + path.last())).into()
}

/// Full action `S_path + S_end` with its geometric decomposition.
pub fn total_action(path: &GenericPath, alpha: ComplexPoint) -> ActionValue {
    let total = path_action(path) + end_action(path, alpha);
    let v = &path.vertices;
    let re_internal_links = 0.5 * v.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum::<f64>();
    let mid = chord_midpoint(path).to_complex();
    let re_end_gap = 2.0 * (alpha.to_complex() - mid).norm_sqr();
    let mut area = 0.0;
    let mut prev = path.last();
    for &g in v {
        area += (g * prev.conj()).im;
        prev = g;
    }
    let a = alpha.to_complex();
    area += 2.0 * ((a - path.last()) * (a.conj() - path.first().conj())).im;
    ActionValue { total, re_internal_links, re_end_gap, im_area: area }
}

/// Action of a circle path at `α = s e^{iφ}`, with angles measured relative to φ:
///
/// `L r² + 2s² − r² Σ_l e^{i(θ_{l−1}−θ_l)} + 2r² e^{i(θ_L−θ_1)} − 2rs(e^{−i(θ₁−φ)} + e^{i(θ_L−φ)})`.
pub fn circle_action(path: &CirclePath, alpha: ComplexPoint) -> Complex64 {
    let r = path.radius;
    let r2 = r * r;
    let s = alpha.modulus();
    let phi = alpha.argument();
    let theta = &path.angles;
    let l = theta.len();
    let first = theta[0];
    let last = theta[l - 1];
    let mut prev = last;
    let mut links = Complex64::new(0.0, 0.0);
    for &t in theta {
        links += Complex64::from_polar(1.0, prev - t);
        prev = t;
    }
    Complex64::new(l as f64 * r2 + 2.0 * s * s, 0.0) - r2 * links
        + 2.0 * r2 * Complex64::from_polar(1.0, last - first)
        - 2.0 * r * s * (Complex64::from_polar(1.0, -(first - phi)) + Complex64::from_polar(1.0, last - phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::coherent_overlap;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn path(points: &[(f64, f64)]) -> GenericPath {
        GenericPath::new(points.iter().map(|&(a, b)| ComplexPoint::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn constant_path() {
        let p = path(&[(0.7, -0.2); 5]);
        assert!(path_action(&p).norm() < 1e-15);
        let av = total_action(&p, ComplexPoint::new(0.7, -0.2));
        assert!(av.total.norm() < 1e-15);
        assert!(av.re_internal_links == 0.0 && av.re_end_gap < 1e-30 && av.im_area.abs() < 1e-15);
    }

    #[test]
    fn two_vertex_example() {
        let p = path(&[(1.0, 0.0), (0.0, 1.0)]);
        let s = path_action(&p);
        assert!((s - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let g1 = p.vertex(0);
        let g2 = p.vertex(1);
        let product = coherent_overlap(g2, g1) * coherent_overlap(g1, g2);
        assert!(((-s).exp() - product).norm() < 1e-15);
    }

    #[test]
    fn end_action_examples() {
        let p = path(&[(0.0, 0.0), (0.5, 0.5), (0.0, 0.0)]);
        assert!((end_action(&p, ComplexPoint::real(1.0)) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let q = path(&[(0.3, 0.1), (2.0, 1.0), (0.3, 0.1)]);
        assert!(end_action(&q, ComplexPoint::new(0.3, 0.1)).norm() < 1e-15);
    }

    #[test]
    fn chord_midpoint_examples() {
        let p = path(&[(1.0, 0.0), (3.0, 3.0), (0.0, 1.0)]);
        assert_eq!(chord_midpoint(&p), ComplexPoint::new(0.5, 0.5));
        let q = path(&[(0.2, 0.9), (3.0, 3.0), (0.2, 0.9)]);
        assert_eq!(chord_midpoint(&q), ComplexPoint::new(0.2, 0.9));
    }

    /// Twice the signed (counter-clockwise positive) area of a polygon.
    fn shoelace2(points: &[Complex64]) -> f64 {
        let n = points.len();
        (0..n).map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            a.re * b.im - b.re * a.im
        }).sum()
    }

    #[test]
    fn square_path_area() {
        // Clockwise unit square, α at its center.
        let p = path(&[(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)]);
        let alpha = ComplexPoint::ORIGIN;
        let av = total_action(&p, alpha);
        let vertices: Vec<Complex64> = p.vertices().map(Complex64::from).collect();
        let polygon = 0.5 * shoelace2(&vertices);
        assert!((polygon + 4.0).abs() < 1e-14);
        // Rectangle on the chord γ₁γ_L reaching out to α: chord length times the
        // signed distance of α from the chord line.
        let chord = vertices[3] - vertices[0];
        let mid = 0.5 * (vertices[3] + vertices[0]);
        let to_alpha = alpha.to_complex() - mid;
        let rectangle = chord.re * to_alpha.im - chord.im * to_alpha.re;
        assert!((rectangle - 2.0).abs() < 1e-14);
        assert!((av.im_area - 2.0 * (polygon + rectangle)).abs() < 1e-14);
        assert!((av.im_area + 4.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn area_split_matches_shoelace(p in generic_path(9), a in point()) {
            let av = total_action(&p, a);
            let v: Vec<Complex64> = p.vertices().map(Complex64::from).collect();
            let chord = v[v.len() - 1] - v[0];
            let to_alpha = a.to_complex() - 0.5 * (v[0] + v[v.len() - 1]);
            let rectangle = chord.re * to_alpha.im - chord.im * to_alpha.re;
            let expected = shoelace2(&v) + 2.0 * rectangle;
            prop_assert!((av.im_area - expected).abs() <= 1e-11 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn circle_collapsed_under_alpha() {
        let r = 1.7;
        let alpha = ComplexPoint::from_polar(r, 0.9);
        let p = CirclePath::new(r, vec![0.9; 6]).unwrap();
        assert!(circle_action(&p, alpha).norm() < 1e-13);
    }

    #[test]
    fn l1_path_has_only_end_term() {
        let p = GenericPath::new(vec![ComplexPoint::new(1.0, 0.5)]).unwrap();
        assert!(path_action(&p).norm() == 0.0);
        let a = ComplexPoint::new(-0.2, 0.3);
        let av = total_action(&p, a);
        let d = a.to_complex() - Complex64::new(1.0, 0.5);
        assert!((av.total.re - 2.0 * d.norm_sqr()).abs() < 1e-14);
        assert!(av.total.im.abs() < 1e-15);
    }

    #[test]
    fn invalid_paths_rejected() {
        assert!(GenericPath::new(vec![]).is_err());
        assert!(GenericPath::new(vec![ComplexPoint::new(f64::INFINITY, 0.0)]).is_err());
        assert!(CirclePath::new(0.0, vec![0.0]).is_err());
        assert!(CirclePath::new(1.0, vec![]).is_err());
    }

    fn generic_path(max_len: usize) -> impl Strategy<Value = GenericPath> {
        prop::collection::vec((-2.5f64..2.5, -2.5f64..2.5), 1..=max_len)
            .prop_map(|v| path(&v))
    }

    fn point() -> impl Strategy<Value = ComplexPoint> {
        (-2.5f64..2.5, -2.5f64..2.5).prop_map(|(a, b)| ComplexPoint::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn bargmann_product(p in generic_path(12)) {
            let mut product = Complex64::new(1.0, 0.0);
            let n = p.len();
            for l in 0..n {
                let prev = p.vertex((l + n - 1) % n);
                product *= coherent_overlap(p.vertex(l), prev);
            }
            let v = (-path_action(&p)).exp();
            prop_assert!((v - product).norm() <= 1e-12 * product.norm().max(1e-300));
        }

        #[test]
        fn real_part_decomposition(p in generic_path(12), a in point()) {
            let av = total_action(&p, a);
            let sum = av.re_internal_links + av.re_end_gap;
            prop_assert!((av.total.re - sum).abs() <= 1e-12 * sum.max(1.0));
            prop_assert!(av.total.re >= -1e-12);
            prop_assert!((av.total.im - av.im_area).abs() <= 1e-12 * av.im_area.abs().max(1.0));
            let mid = chord_midpoint(&p).to_complex();
            prop_assert!((av.re_end_gap - 2.0 * (a.to_complex() - mid).norm_sqr()).abs() <= 1e-12 * av.re_end_gap.max(1.0));
        }

        #[test]
        fn time_reversal(p in generic_path(12), a in point()) {
            let fwd = total_action(&p, a);
            let bwd = total_action(&p.reversed(), a);
            prop_assert!((fwd.total.re - bwd.total.re).abs() <= 1e-12 * fwd.total.re.max(1.0));
            prop_assert!((fwd.im_area + bwd.im_area).abs() <= 1e-12 * fwd.im_area.abs().max(1.0));
            prop_assert!((fwd.re_internal_links - bwd.re_internal_links).abs() <= 1e-12 * fwd.re_internal_links.max(1.0));
        }

        #[test]
        fn end_swap_conjugates(g1 in point(), gl in point(), mid in point(), a in point()) {
            let p = GenericPath::new(vec![g1, mid, gl]).unwrap();
            let q = GenericPath::new(vec![gl, mid, g1]).unwrap();
            let x = end_action(&p, a);
            let y = end_action(&q, a).conj();
            prop_assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
        }

        #[test]
        fn rotation_covariance(p in generic_path(10), a in point(), chi in 0.0f64..TAU) {
            let rot = Complex64::from_polar(1.0, chi);
            let rotated = GenericPath::new(p.vertices().map(|v| ComplexPoint::from(v.to_complex() * rot)).collect()).unwrap();
            let ra = ComplexPoint::from(a.to_complex() * rot);
            let x = total_action(&p, a).total;
            let y = total_action(&rotated, ra).total;
            prop_assert!((x - y).norm() <= 1e-11 * x.norm().max(1.0));
        }

        #[test]
        fn circle_matches_generic(r in 0.2f64..3.5, angles in prop::collection::vec(0.0f64..TAU, 1..=10),
                                  s in 0.0f64..4.0, phi in 0.0f64..TAU) {
            let c = CirclePath::new(r, angles).unwrap();
            let a = ComplexPoint::from_polar(s, phi);
            let x = circle_action(&c, a);
            let y = total_action(&c.to_generic(), a).total;
            prop_assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0) * 10.0);
        }

        #[test]
        fn circle_small_arc_symmetry(r in 0.5f64..3.0, spread in 0.0f64..0.6, l in 2usize..8, s in 0.0f64..3.0) {
            let angles: Vec<f64> = (0..l).map(|k| spread * ((2 * k + 1) as f64 / l as f64 - 1.0) * (1.0 + 0.3 * (k as f64).sin())).collect();
            let neg: Vec<f64> = angles.iter().map(|t| -t).collect();
            let a = ComplexPoint::real(s);
            let x = circle_action(&CirclePath::new(r, angles).unwrap(), a);
            let y = circle_action(&CirclePath::new(r, neg).unwrap(), a);
            prop_assert!(x.re >= -1e-12);
            prop_assert!((x.re - y.re).abs() <= 1e-12 * x.re.abs().max(1.0));
            prop_assert!((x.im + y.im).abs() <= 1e-12 * x.im.abs().max(1.0));
        }
    }

    #[test]
    fn zero_real_part_characterization() {
        // Zero iff all internal links vanish and the midpoint is α.
        let a = ComplexPoint::new(0.4, -1.1);
        let p = path(&[(0.4, -1.1); 3]);
        assert!(total_action(&p, a).total.re.abs() < 1e-15);
        let q = path(&[(0.4, -1.1), (0.4, -1.0), (0.4, -1.1)]);
        assert!(total_action(&q, a).total.re > 0.0);
        let r = path(&[(0.5, -1.1); 3]);
        assert!(total_action(&r, a).total.re > 0.0);
    }
}
