//! Explicit curve families on the degree-d triangle, and the hexagon example.
//!
//! The edge polynomial q_d = ∏(z₁ + t_i z₂) has positive reciprocal-paired
//! roots; its palindromic coefficients are copied onto all three edges of
//! the triangle, interior coefficients zero. The full family
//! p_d = Σ c_k q_{d-3k}·z^{kE} stacks rescaled edge polynomials on the
//! nested hollow triangles; with fast-growing amplification constants its
//! amoeba shows the maximal (d-1)(d-2)/2 holes already under the plain
//! Fubini-Study moment map. The hexagon section is the 16-point blown-up
//! plane example with unit coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::{LatticePoint, LatticePolygon};
use crate::moment::{LaurentSection, MomentError, MomentParams};
use crate::sampler::{self, HoleReport, SamplerError};
use crate::subdivision::WeightFunction;

#[derive(Debug, Error, Clone)]
pub enum FamilyError {
    #[error("degree must be at least 1, got {0}")]
    BadDegree(i64),
    #[error("invalid roots: {0}")]
    BadRoots(&'static str),
    #[error("invalid amplification ladder: {0}")]
    BadAmplification(&'static str),
    #[error("amplification search exhausted at ratio {0}: {1} of {2} holes")]
    SearchExhausted(f64, usize, usize),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Roots and coefficients of one edge polynomial q_d = ∏(z₁ + t_i z₂).
///
/// Roots are ascending with t_i · t_{d-i+1} = 1 exactly: the upper half is
/// stored as reciprocals of the lower half. Coefficients are the elementary
/// symmetric values, palindromic with b₀ = b_d = 1 exactly: the upper half
/// mirrors the lower.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomialSpec {
    degree: usize,
    roots: Vec<f64>,
    coefficients: Vec<f64>,
}

impl EdgePolynomialSpec {
    /// Default placement: the i-th root projects to the moment coordinate
    /// F(t_i) = t_i²/(1+t_i²) = (2i-1)/(2d), so the d legs of the family hit
    /// each polygon edge at the odd-fraction parameters.
    pub fn new(d: usize) -> Result<Self, FamilyError> {
        if d == 0 {
            return Err(FamilyError::BadDegree(0));
        }
        let lower: Vec<f64> = (1..=d.div_ceil(2))
            .map(|i| (((2 * i - 1) as f64) / ((2 * (d - i) + 1) as f64)).sqrt())
            .collect();
        Ok(Self::from_lower_half(d, lower))
    }

    /// Explicit positive roots, which must already come in reciprocal pairs
    /// (checked to 1e-9, then snapped exact by rebuilding the upper half).
    pub fn with_roots(d: usize, roots: &[f64]) -> Result<Self, FamilyError> {
        if d == 0 {
            return Err(FamilyError::BadDegree(0));
        }
        if roots.len() != d {
            return Err(FamilyError::BadRoots("need exactly d roots"));
        }
        if roots.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(FamilyError::BadRoots("roots must be positive reals"));
        }
        let mut sorted = roots.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 0..d / 2 {
            let prod = sorted[i] * sorted[d - 1 - i];
            if (prod - 1.0).abs() > 1e-9 {
                return Err(FamilyError::BadRoots("roots must pair as t and 1/t"));
            }
        }
        if d % 2 == 1 && (sorted[d / 2] - 1.0).abs() > 1e-9 {
            return Err(FamilyError::BadRoots("odd degree needs the middle root 1"));
        }
        let lower = sorted[..d.div_ceil(2)].to_vec();
        Ok(Self::from_lower_half(d, lower))
    }

    fn from_lower_half(d: usize, mut lower: Vec<f64>) -> Self {
        if d % 2 == 1 {
            *lower.last_mut().expect("odd degree has a middle root") = 1.0;
        }
        let mut roots = lower.clone();
        for i in (0..d / 2).rev() {
            roots.push(1.0 / lower[i]);
        }
        // Product of the paired factors (z₁ + t z₂)(z₁ + z₂/t), each exactly
        // palindromic; the middle factor of odd degree is (z₁ + z₂).
        let mut coeffs = vec![1.0f64];
        for i in 0..d / 2 {
            let s = roots[i] + 1.0 / roots[i];
            coeffs = convolve(&coeffs, &[1.0, s, 1.0]);
        }
        if d % 2 == 1 {
            coeffs = convolve(&coeffs, &[1.0, 1.0]);
        }
        for i in 0..=d / 2 {
            coeffs[d - i] = coeffs[i];
        }
        EdgePolynomialSpec {
            degree: d,
            roots,
            coefficients: coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// b₀..b_d, the coefficients of ∏(z₁ + t_i z₂) in z₂-degree order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Moment coordinates F(t_i) = t_i²/(1+t_i²) of the roots; where the
    /// family's legs meet a polygon edge, as fractions of its length.
    pub fn moment_positions(&self) -> Vec<f64> {
        self.roots
            .iter()
            .map(|t| {
                let q = t * t;
                q / (1.0 + q)
            })
            .collect()
    }
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The amplification ladder of p_d = Σ c_k q_{d-3k}·z^{kE}: constants
/// c₀ = 1 < c₁ < … with consecutive ratios at least `min_ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    degree: usize,
    amplification: Vec<f64>,
}

impl FamilySpec {
    /// Default ladder c_k = 1000^k.
    pub fn new(d: usize) -> Result<Self, FamilyError> {
        Self::with_ratio(d, 1e3)
    }

    /// Geometric ladder c_k = ratio^k.
    pub fn with_ratio(d: usize, ratio: f64) -> Result<Self, FamilyError> {
        if !(ratio > 1.0) || !ratio.is_finite() {
            return Err(FamilyError::BadAmplification("ratio must exceed 1"));
        }
        let ladder = (1..=d / 3).map(|k| ratio.powi(k as i32)).collect();
        Self::with_constants(d, ladder)
    }

    /// Explicit constants c₁..c_{⌊d/3⌋}.
    pub fn with_constants(d: usize, c: Vec<f64>) -> Result<Self, FamilyError> {
        if d == 0 {
            return Err(FamilyError::BadDegree(0));
        }
        if c.len() != d / 3 {
            return Err(FamilyError::BadAmplification(
                "need exactly floor(d/3) constants",
            ));
        }
        let mut prev = 1.0f64;
        for &ck in &c {
            if !(ck > prev) || !ck.is_finite() {
                return Err(FamilyError::BadAmplification(
                    "constants must increase from c0 = 1",
                ));
            }
            prev = ck;
        }
        Ok(FamilySpec {
            degree: d,
            amplification: c,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// c₀..c_{⌊d/3⌋} including the leading 1.
    pub fn constants(&self) -> Vec<f64> {
        let mut all = vec![1.0];
        all.extend_from_slice(&self.amplification);
        all
    }
}

/// The edge-supported section of q_d on the degree-d triangle: every edge
/// carries the palindromic coefficient pattern, interior points vanish.
pub fn build_qd(d: usize) -> Result<LaurentSection, FamilyError> {
    build_qd_from(&EdgePolynomialSpec::new(d)?)
}

pub fn build_qd_from(spec: &EdgePolynomialSpec) -> Result<LaurentSection, FamilyError> {
    let terms = hollow_triangle_terms(spec, 0, 1.0);
    Ok(LaurentSection::new(terms.into_iter().collect())?)
}

/// Terms of c·q_d placed on the hollow triangle with corners (k,k), (d+k,k),
/// (k,d+k): the boundary of the degree-(d+2k... ) stratum N^{d+3k}_k shifted
/// by k·E. Corners land on two edges with the same value b₀ = b_d = 1.
fn hollow_triangle_terms(
    spec: &EdgePolynomialSpec,
    k: i64,
    scale: f64,
) -> BTreeMap<LatticePoint, Complex64> {
    let d = spec.degree as i64;
    let b = spec.coefficients();
    let mut terms = BTreeMap::new();
    for i in 0..=d {
        let c = Complex64::new(scale * b[i as usize], 0.0);
        // Edge z₁z₂: from (d,0) to (0,d); edge z₂z₃: from (0,d) to (0,0);
        // edge z₃z₁: from (0,0) to (d,0); all shifted by (k,k).
        terms.insert(LatticePoint::new(d - i + k, i + k), c);
        terms.insert(LatticePoint::new(k, d - i + k), c);
        terms.insert(LatticePoint::new(i + k, k), c);
    }
    terms
}

/// The full family p_d = Σ_k c_k q_{d-3k}·z^{kE} on the degree-d triangle.
/// Strata are disjoint, so each coefficient comes from exactly one summand;
/// when d ≡ 0 mod 3 the innermost stratum is the single center point.
pub fn build_pd(spec: &FamilySpec) -> Result<LaurentSection, FamilyError> {
    let d = spec.degree as i64;
    let mut terms: BTreeMap<LatticePoint, Complex64> = BTreeMap::new();
    for (k, ck) in spec.constants().into_iter().enumerate() {
        let k = k as i64;
        let inner = d - 3 * k;
        if inner == 0 {
            terms.insert(LatticePoint::new(k, k), Complex64::new(ck, 0.0));
        } else {
            let edge = EdgePolynomialSpec::new(inner as usize)?;
            terms.extend(hollow_triangle_terms(&edge, k, ck));
        }
    }
    Ok(LaurentSection::new(terms.into_iter().collect())?)
}

/// Moment parameters of the plain Fubini-Study map: zero weight and δ = 1,
/// so the δ-power scaling drops out entirely.
pub fn fubini_study_params(polygon: &LatticePolygon) -> Result<MomentParams, FamilyError> {
    Ok(MomentParams::new(
        1.0,
        WeightFunction::zero(polygon),
        0.5,
    )?)
}

/// Reference section whose density realizes the Fubini-Study moment map of
/// the degree-d plane: coefficient √(d! / (i! j! (d−i−j)!)) at (i, j), over
/// the full triangle. Squares of the coefficients sum the trinomial
/// expansion, so the map is exactly d·(r₁², r₂²)/(1 + r₁² + r₂²), and the
/// edge restriction places radius-t contact at d·t²/(1+t²).
pub fn fubini_study_section(degree: usize) -> Result<LaurentSection, FamilyError> {
    let d = degree as i64;
    if d < 1 {
        return Err(FamilyError::BadDegree(d));
    }
    let mut terms = Vec::new();
    for i in 0..=d {
        for j in 0..=(d - i) {
            let c = (ln_factorial(d) - ln_factorial(i) - ln_factorial(j) - ln_factorial(d - i - j))
                .exp()
                .sqrt();
            terms.push((LatticePoint::new(i, j), Complex64::new(c, 0.0)));
        }
    }
    Ok(LaurentSection::new(terms)?)
}

fn ln_factorial(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// The blown-up-plane example: the hexagon cut from the degree-5 triangle
/// by one size-2 and two size-1 corner chops, the standard quadratic
/// weight, and all-ones coefficients.
pub fn hexagon_section() -> (LatticePolygon, WeightFunction, LaurentSection) {
    let polygon = LatticePolygon::new(vec![
        LatticePoint::new(2, 0),
        LatticePoint::new(4, 0),
        LatticePoint::new(4, 1),
        LatticePoint::new(1, 4),
        LatticePoint::new(0, 4),
        LatticePoint::new(0, 2),
    ])
    .expect("hexagon vertices are in convex position");
    let w = WeightFunction::quadratic(&polygon);
    let s = LaurentSection::ones(&polygon);
    (polygon, w, s)
}

/// One amplification attempt: the ratio tried and the holes found.
#[derive(Debug, Clone)]
pub struct AmplificationSearch {
    pub ratio: f64,
    pub report: HoleReport,
    pub attempts: Vec<(f64, usize)>,
}

/// Doubles the amplification ratio from `start_ratio` until the
/// Fubini-Study amoeba of p_d shows the full (d-1)(d-2)/2 holes, capped at
/// 2^20 doublings worth of growth.
pub fn find_amplification_ratio(
    d: usize,
    start_ratio: f64,
    slices: usize,
    angles: usize,
    resolution: usize,
) -> Result<AmplificationSearch, FamilyError> {
    let polygon = LatticePolygon::standard_triangle(d as i64);
    let p = fubini_study_params(&polygon)?;
    let fs = fubini_study_section(d)?;
    let target = (d - 1) * (d - 2) / 2;
    let mut ratio = start_ratio.max(1.0 + 1e-9);
    let mut attempts = Vec::new();
    loop {
        let spec = FamilySpec::with_ratio(d, ratio)?;
        let s = build_pd(&spec)?;
        let (points, _) = sampler::sample_amoeba(&s, &p, slices, angles, 8.0)?;
        let mut raster = sampler::rasterize(&points, &fs, &p, &polygon, resolution, 1.5);
        // The reference density drives the moment image only; legs belong to
        // the curve's own edge restrictions.
        raster.meta.leg_clusters = sampler::edge_leg_clusters(&s, &p, &polygon);
        let report = sampler::count_holes(&raster, &polygon)?;
        attempts.push((ratio, report.holes));
        // Doubling continues through overcounts as well: below the working
        // amplification the thin channels between the edge tentacles and the
        // body alias into spurious raster pockets, and those disappear
        // together with the missing holes once the ladder is steep enough.
        if report.holes == target {
            return Ok(AmplificationSearch {
                ratio,
                report,
                attempts,
            });
        }
        ratio *= 2.0;
        if ratio > start_ratio * (1 << 20) as f64 {
            let last = attempts.last().map(|&(_, h)| h).unwrap_or(0);
            return Err(FamilyError::SearchExhausted(ratio, last, target));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::subdivide;

    fn lp(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    #[test]
    fn default_roots_hit_the_odd_fraction_positions() {
        for d in 1..=7usize {
            let spec = EdgePolynomialSpec::new(d).unwrap();
            let pos = spec.moment_positions();
            for (i, f) in pos.iter().enumerate() {
                let expected = (2 * i + 1) as f64 / (2 * d) as f64;
                assert!(
                    (f - expected).abs() < 1e-14,
                    "d={d} root {i}: {f} vs {expected}"
                );
            }
            for i in 0..d / 2 {
                assert_eq!(spec.roots()[i] * spec.roots()[d - 1 - i], 1.0);
            }
        }
    }

    #[test]
    fn coefficients_are_palindromic_with_unit_ends() {
        for d in [1usize, 2, 3, 7, 10] {
            let spec = EdgePolynomialSpec::new(d).unwrap();
            let b = spec.coefficients();
            assert_eq!(b.len(), d + 1);
            assert_eq!(b[0], 1.0);
            assert_eq!(b[d], 1.0);
            for i in 0..=d {
                assert_eq!(b[i], b[d - i], "d={d} i={i}");
                assert!(b[i] > 0.0);
            }
        }
    }

    #[test]
    fn display_roots_give_the_frozen_small_degree_coefficients() {
        let q2 = EdgePolynomialSpec::with_roots(2, &[0.5, 2.0]).unwrap();
        assert_eq!(q2.coefficients(), &[1.0, 2.5, 1.0]);
        let q3 = EdgePolynomialSpec::with_roots(3, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(q3.coefficients(), &[1.0, 3.5, 3.5, 1.0]);
        assert!(EdgePolynomialSpec::with_roots(2, &[0.5, 3.0]).is_err());
        assert!(EdgePolynomialSpec::with_roots(3, &[0.5, 0.9, 2.0]).is_err());
        assert!(EdgePolynomialSpec::with_roots(2, &[-0.5, -2.0]).is_err());
    }

    #[test]
    fn qd_is_supported_on_the_boundary_with_matching_corners() {
        let s = build_qd(1).unwrap();
        assert_eq!(s.support(), vec![lp(0, 0), lp(0, 1), lp(1, 0)]);
        for (_, a) in s.terms() {
            assert_eq!(*a, Complex64::new(1.0, 0.0));
        }
        let d = 4i64;
        let s = build_qd(d as usize).unwrap();
        let spec = EdgePolynomialSpec::new(d as usize).unwrap();
        for (m, a) in s.terms() {
            let on_boundary = m.x == 0 || m.y == 0 || m.x + m.y == d;
            assert!(on_boundary, "interior coefficient at {m}");
            // Position along whichever edge contains the point.
            let idx = if m.x + m.y == d {
                m.y
            } else if m.x == 0 {
                d - m.y
            } else {
                m.x
            } as usize;
            assert_eq!(a.re, spec.coefficients()[idx], "coefficient at {m}");
            assert_eq!(a.im, 0.0);
        }
        assert_eq!(s.support().len() as i64, 3 * d);
    }

    #[test]
    fn pd_strata_carry_rescaled_edge_patterns() {
        let spec = FamilySpec::new(6).unwrap();
        assert_eq!(spec.constants(), vec![1.0, 1e3, 1e6]);
        let s = build_pd(&spec).unwrap();
        // 19 points on the outer stratum? No: count = boundary of N6 (18)
        // plus boundary of N3 shifted (9) plus the center (6-6=0) point.
        assert_eq!(s.support().len(), 18 + 9 + 1);
        let q6 = EdgePolynomialSpec::new(6).unwrap();
        let q3 = EdgePolynomialSpec::new(3).unwrap();
        for (m, a) in s.terms() {
            let (k, inner) = if m.x == 0 || m.y == 0 || m.x + m.y == 6 {
                (0usize, &q6)
            } else if m.x == 1 || m.y == 1 || m.x + m.y == 5 {
                (1, &q3)
            } else {
                assert_eq!(*m, lp(2, 2));
                assert_eq!(a.re, 1e6);
                continue;
            };
            let d = 6 - 3 * k as i64;
            let (mx, my) = (m.x - k as i64, m.y - k as i64);
            let idx = if mx + my == d {
                my
            } else if mx == 0 {
                d - my
            } else {
                mx
            } as usize;
            let expected = spec.constants()[k] * inner.coefficients()[idx];
            assert_eq!(a.re, expected, "stratum {k} point {m}");
        }
    }

    #[test]
    fn p3_matches_the_degree_three_display() {
        let spec = FamilySpec::with_constants(3, vec![50.0]).unwrap();
        let s = build_pd(&spec).unwrap();
        assert_eq!(s.coefficient(lp(1, 1)), Some(Complex64::new(50.0, 0.0)));
        assert_eq!(s.coefficient(lp(3, 0)), Some(Complex64::new(1.0, 0.0)));
        let b1 = EdgePolynomialSpec::new(3).unwrap().coefficients()[1];
        assert_eq!(s.coefficient(lp(2, 1)), Some(Complex64::new(b1, 0.0)));
        assert_eq!(s.support().len(), 10);
    }

    #[test]
    fn amplification_ladder_is_validated() {
        assert!(FamilySpec::with_ratio(4, 0.5).is_err());
        assert!(FamilySpec::with_constants(6, vec![10.0, 5.0]).is_err());
        assert!(FamilySpec::with_constants(6, vec![10.0]).is_err());
        assert!(FamilySpec::with_constants(2, vec![]).is_ok());
    }

    #[test]
    fn hexagon_has_the_advertised_lattice_data() {
        let (polygon, w, s) = hexagon_section();
        let points = polygon.enumerate_points();
        assert_eq!(points.len(), 16);
        let interior = [lp(2, 1), lp(1, 2), lp(3, 1), lp(2, 2), lp(1, 3)];
        let boundary = points
            .iter()
            .filter(|m| !interior.contains(m))
            .count();
        assert_eq!(boundary, 11);
        assert_eq!(s.support().len(), 16);
        // Full unimodular triangulation: Euler count forces
        // 2·area = 2(I + B/2 - 1) = 19 cells.
        let z = subdivide(&polygon, &w).unwrap();
        assert!(z.all_unimodular());
        assert!(z.uses_all_points());
        assert_eq!(z.cells().len(), 19);
    }

    #[test]
    fn trinomial_section_realizes_the_closed_form_moment_map() {
        use crate::moment::{moment, TorusPoint};
        for d in 1..=5usize {
            let polygon = LatticePolygon::standard_triangle(d as i64);
            let p = fubini_study_params(&polygon).unwrap();
            let s = fubini_study_section(d).unwrap();
            for &(l1, l2, t1, t2) in &[
                (0.0, 0.0, 0.3, 1.1),
                (-1.7, 0.4, 2.0, 0.0),
                (2.2, -3.0, 5.1, 4.4),
                (0.9, 0.9, 0.0, 0.0),
            ] {
                let x = TorusPoint::new((l1, l2), (t1, t2)).unwrap();
                let (mx, my) = moment(&s, &p, &x).unwrap();
                let (r1, r2) = ((2.0 * l1).exp(), (2.0 * l2).exp());
                let den = 1.0 + r1 + r2;
                let ex = d as f64 * r1 / den;
                let ey = d as f64 * r2 / den;
                assert!((mx - ex).abs() < 1e-10 && (my - ey).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degree_three_family_shows_its_hole_under_fubini_study() {
        let polygon = LatticePolygon::standard_triangle(3);
        let p = fubini_study_params(&polygon).unwrap();
        let s = build_pd(&FamilySpec::new(3).unwrap()).unwrap();
        let (points, _) = sampler::sample_amoeba(&s, &p, 300, 48, 8.0).unwrap();
        let mut raster =
            sampler::rasterize(&points, &fubini_study_section(3).unwrap(), &p, &polygon, 240, 1.5);
        raster.meta.leg_clusters = sampler::edge_leg_clusters(&s, &p, &polygon);
        let report = sampler::count_holes(&raster, &polygon).unwrap();
        assert_eq!(report.holes, 1);
        assert_eq!(report.legs, vec![3, 3, 3]);
    }

    #[test]
    fn doubling_search_finds_a_working_ratio() {
        let found = find_amplification_ratio(3, 10.0, 260, 40, 200).unwrap();
        assert_eq!(found.report.holes, 1);
        assert!(found.ratio >= 10.0);
        assert!(!found.attempts.is_empty());
        assert_eq!(found.attempts.last().unwrap().1, 1);
    }
}
