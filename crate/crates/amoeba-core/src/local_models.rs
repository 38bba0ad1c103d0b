//! Local models on the standard chart of the projective plane.
//!
//! The curve under deformation is the line C₀ = {x₁ + x₂ + 1 = 0} (or its
//! γ-cutoff variant). A family of radial maps 𝓕_t rescales the two chart
//! coordinates by powers of max-type radius functions so that at t = 1 the
//! moment image of the line collapses onto the Y-shaped graph
//! Γ = {r₁ = 1, r₂ ≤ 1} ∪ {r₂ = 1, r₁ ≤ 1} ∪ {r₁ = r₂ ≥ 1} in the radii
//! plane. This module evaluates the maps for four deformation profiles
//! (sharp maxima, smoothed maxima, a variably-smoothed "optimal" variant,
//! and a coefficient cutoff), the closed-form ratios of the pulled-back
//! Fubini-Study form against the chart area form, and grid certificates for
//! the positivity bounds those ratios satisfy.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum LocalModelError {
    #[error("invalid profile: {0}")]
    BadProfile(&'static str),
    #[error("operation needs the {0} profile")]
    ProfileMismatch(&'static str),
    #[error("point with radii ({0}, {1}) is outside the region r1 <= r2 <= 1")]
    RegionMismatch(f64, f64),
    #[error("point ({0}, {1}) does not satisfy the curve equation")]
    NotOnCurve(Complex64, Complex64),
    #[error("pullback ratio {ratio} is not positive at t={t}, x=({x1}, {x2})")]
    BoundViolation {
        t: f64,
        x1: Complex64,
        x2: Complex64,
        ratio: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Sharp maxima; the deformed line is piecewise smooth and its time-1
    /// image is exactly the Y graph.
    PiecewiseMax,
    /// Maxima smoothed over a width-`eps` window; smooth everywhere, the
    /// image fattens within O(eps) of the trivalent vertex.
    SmoothedH,
    /// Smoothing width modulated by a secondary profile `b` so the map stays
    /// sharp only at the two curve points over the vertex; image is exact.
    OptimalB,
    /// Coefficient cutoff of the line section itself; the curve becomes
    /// toric near the coordinate axes. Its radial maps are the sharp ones.
    GammaEps,
}

/// Scalar profile bundle: the smoothing step `h`, its associated logarithmic
/// derivative weight `λ`, the window modulation `b`, and the cutoff `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    pub kind: ProfileKind,
    pub eps: f64,
    /// Inner saturation constant of γ: γ(u) = 0 for √u ≤ a1·eps.
    pub a1: f64,
    /// Outer saturation constant of γ: γ(u) = 1 for √u ≥ a2·eps.
    pub a2: f64,
}

/// Quintic step: 0 below -1, 1 above 1, C² at the seams, H(u)+H(-u) = 1.
fn quintic_step(u: f64) -> f64 {
    if u <= -1.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let u2 = u * u;
        (8.0 + u * (15.0 + u2 * (3.0 * u2 - 10.0))) / 16.0
    }
}

fn quintic_step_prime(u: f64) -> f64 {
    if !(u.abs() < 1.0) {
        0.0
    } else {
        let w = u * u - 1.0;
        15.0 * w * w / 16.0
    }
}

/// Smootherstep on [0, 1]; sup |B'| = 1.875 at v = 1/2.
fn smootherstep(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else if v >= 1.0 {
        1.0
    } else {
        v * v * v * (10.0 + v * (6.0 * v - 15.0))
    }
}

fn smootherstep_prime(v: f64) -> f64 {
    if !(v > 0.0 && v < 1.0) {
        0.0
    } else {
        let w = v * (v - 1.0);
        30.0 * w * w
    }
}

fn step(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `a / b` with the convention that a zero window means a sharp step.
fn sharp_div(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else if a < 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    }
}

/// `a * h` where `h` is a saturating weight; avoids NaN from `±inf * 0`.
fn sat_mul(a: f64, h: f64) -> f64 {
    if h == 0.0 {
        0.0
    } else if h == 1.0 {
        a
    } else {
        a * h
    }
}

impl CutoffProfile {
    pub fn piecewise_max() -> Self {
        CutoffProfile {
            kind: ProfileKind::PiecewiseMax,
            eps: 0.0,
            a1: 0.0,
            a2: 0.0,
        }
    }

    pub fn smoothed(eps: f64) -> Result<Self, LocalModelError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(LocalModelError::BadProfile("eps must be positive"));
        }
        Ok(CutoffProfile {
            kind: ProfileKind::SmoothedH,
            eps,
            a1: 0.0,
            a2: 0.0,
        })
    }

    pub fn optimal(eps: f64) -> Result<Self, LocalModelError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(LocalModelError::BadProfile("eps must be positive"));
        }
        Ok(CutoffProfile {
            kind: ProfileKind::OptimalB,
            eps,
            a1: 0.0,
            a2: 0.0,
        })
    }

    /// Cutoff profile with saturation radii `a1 * eps < a2 * eps`. The local
    /// model has three section terms, so the constants must satisfy
    /// 1 < a1 < a2 < 3, and the outer radius must stay below 1.
    pub fn cutoff(eps: f64, a1: f64, a2: f64) -> Result<Self, LocalModelError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(LocalModelError::BadProfile("eps must be positive"));
        }
        if !(1.0 < a1 && a1 < a2 && a2 < 3.0) {
            return Err(LocalModelError::BadProfile(
                "cutoff constants must satisfy 1 < a1 < a2 < 3",
            ));
        }
        if a2 * eps >= 1.0 {
            return Err(LocalModelError::BadProfile(
                "outer cutoff radius a2 * eps must stay below 1",
            ));
        }
        Ok(CutoffProfile {
            kind: ProfileKind::GammaEps,
            eps,
            a1,
            a2,
        })
    }

    /// Step profile h. Identically 0 for a ≤ -eps, identically 1 for
    /// a ≥ eps, and h(a) + h(-a) = 1.
    pub fn h(&self, a: f64) -> f64 {
        match self.kind {
            ProfileKind::PiecewiseMax | ProfileKind::GammaEps => step(a),
            ProfileKind::SmoothedH | ProfileKind::OptimalB => quintic_step(a / self.eps),
        }
    }

    pub fn h_prime(&self, a: f64) -> f64 {
        match self.kind {
            ProfileKind::PiecewiseMax | ProfileKind::GammaEps => 0.0,
            ProfileKind::SmoothedH | ProfileKind::OptimalB => {
                quintic_step_prime(a / self.eps) / self.eps
            }
        }
    }

    /// λ(a) = h(a) + a h'(a) = d(a·h(a))/da.
    pub fn lambda(&self, a: f64) -> f64 {
        let hp = self.h_prime(a);
        if hp == 0.0 {
            self.h(a)
        } else {
            self.h(a) + a * hp
        }
    }

    /// Window modulation for the optimal profile: 0 for a ≤ 0, 1 for
    /// a ≥ √eps, slope bounded by 1.875/√eps.
    pub fn b(&self, a: f64) -> f64 {
        smootherstep(a / self.eps.sqrt())
    }

    pub fn b_prime(&self, a: f64) -> f64 {
        let s = self.eps.sqrt();
        smootherstep_prime(a / s) / s
    }

    /// Cutoff weight in the squared-radius variable u: 0 for √u ≤ a1·eps,
    /// 1 for √u ≥ a2·eps.
    pub fn gamma(&self, u: f64) -> f64 {
        let s = u.max(0.0).sqrt();
        let lo = self.a1 * self.eps;
        let hi = self.a2 * self.eps;
        smootherstep((s - lo) / (hi - lo))
    }

    /// dγ/du.
    pub fn gamma_prime(&self, u: f64) -> f64 {
        let s = u.max(0.0).sqrt();
        if s == 0.0 {
            return 0.0;
        }
        let lo = self.a1 * self.eps;
        let hi = self.a2 * self.eps;
        smootherstep_prime((s - lo) / (hi - lo)) / (hi - lo) / (2.0 * s)
    }

    /// γ♯(u) = 2u γ'(u); the elasticity term appearing in the cutoff ratio.
    pub fn gamma_sharp(&self, u: f64) -> f64 {
        2.0 * u * self.gamma_prime(u)
    }
}

/// One radial deformation 𝓕_t; `t = 0` is the identity on the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotopyMap {
    pub profile: CutoffProfile,
    pub t: f64,
}

impl IsotopyMap {
    pub fn new(profile: CutoffProfile, t: f64) -> Result<Self, LocalModelError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(LocalModelError::BadProfile("t must lie in [0, 1]"));
        }
        Ok(IsotopyMap { profile, t })
    }
}

/// Log radius functions log η and their gradients in (ℓ₁, ℓ₂) = (log r₁, log r₂).
///
/// η₁ scales x₁ and smooths max(1, r₂); η₂ scales x₂ and smooths max(1, r₁);
/// η₀ is the common denominator smoothing max(r₁, r₂). The crossed indices
/// follow the displayed formulas of the deformation family.
struct EtaDerivs {
    le1: f64,
    le2: f64,
    le0: f64,
    d1: (f64, f64),
    d2: (f64, f64),
    d0: (f64, f64),
}

/// Smoothed maximum a ∨ b = a + (b-a)·h(b-a); exact max outside the window.
fn smooth_max(p: &CutoffProfile, a: f64, b: f64) -> f64 {
    let d = b - a;
    let h = p.h(d);
    if h == 0.0 {
        a
    } else if h == 1.0 {
        b
    } else {
        a + d * h
    }
}

/// u² h'(u) with the zero-slope guard; the weight of the window-variation
/// terms in the optimal profile gradients.
fn uu_hprime(p: &CutoffProfile, u: f64) -> f64 {
    let hp = p.h_prime(u);
    if hp == 0.0 {
        0.0
    } else {
        u * u * hp
    }
}

/// Gradients for the sharp profiles restricted to the closed region
/// ℓ₁ ≤ ℓ₂ ≤ 0. The stepped weights are the region constants λ₀ = 1,
/// λ₁ = λ₂ = 0, which makes boundary points evaluate as interior limits.
fn eta_derivs_sharp_region(l2: f64) -> EtaDerivs {
    EtaDerivs {
        le1: 0.0,
        le2: 0.0,
        le0: l2,
        d1: (0.0, 0.0),
        d2: (0.0, 0.0),
        d0: (0.0, 1.0),
    }
}

fn eta_derivs(p: &CutoffProfile, l1: f64, l2: f64) -> EtaDerivs {
    match p.kind {
        ProfileKind::PiecewiseMax | ProfileKind::GammaEps => {
            let s0 = step(l2 - l1);
            EtaDerivs {
                le1: l2.max(0.0),
                le2: l1.max(0.0),
                le0: l1.max(l2),
                d1: (0.0, step(l2)),
                d2: (step(l1), 0.0),
                d0: (1.0 - s0, s0),
            }
        }
        ProfileKind::SmoothedH => {
            let lam0 = p.lambda(l2 - l1);
            EtaDerivs {
                le1: sat_mul(l2, p.h(l2)),
                le2: sat_mul(l1, p.h(l1)),
                le0: smooth_max(p, l1, l2),
                d1: (0.0, p.lambda(l2)),
                d2: (p.lambda(l1), 0.0),
                d0: (1.0 - lam0, lam0),
            }
        }
        ProfileKind::OptimalB => {
            // Window arguments: b₁ keyed to log(r₁/r₂²), b₂ to log(r₂/r₁²),
            // b₀ to log(r₁r₂). Each shrinks its smoothing window to zero
            // near the corresponding corner of the Y graph.
            let a1 = l1 - 2.0 * l2;
            let a2 = l2 - 2.0 * l1;
            let a0 = l1 + l2;
            let u1 = sharp_div(l1, p.b(a1));
            let u2 = sharp_div(l2, p.b(a2));
            let v = sharp_div(l2 - l1, p.b(a0));
            let w1 = uu_hprime(p, u1) * p.b_prime(a1);
            let w2 = uu_hprime(p, u2) * p.b_prime(a2);
            let w0 = uu_hprime(p, v) * p.b_prime(a0);
            let lamv = p.lambda(v);
            let hv = p.h(v);
            let le0 = if hv == 0.0 {
                l1
            } else if hv == 1.0 {
                l2
            } else {
                l1 + (l2 - l1) * hv
            };
            EtaDerivs {
                le1: sat_mul(l2, p.h(u2)),
                le2: sat_mul(l1, p.h(u1)),
                le0,
                d1: (2.0 * w2, p.lambda(u2) - w2),
                d2: (p.lambda(u1) - w1, 2.0 * w1),
                d0: (1.0 - lamv - w0, lamv - w0),
            }
        }
    }
}

/// Applies the radial deformation to a chart point. Both coordinates are
/// rescaled by real factors, so angles are preserved. For the `GammaEps`
/// profile the radial maps are the sharp ones; the γ cutoff deforms the
/// curve, not the chart.
pub fn apply_isotopy(map: &IsotopyMap, x1: Complex64, x2: Complex64) -> (Complex64, Complex64) {
    let r1 = x1.norm();
    let r2 = x2.norm();
    if r1 == 0.0 && r2 == 0.0 {
        return (x1, x2);
    }
    let e = eta_derivs(&map.profile, r1.ln(), r2.ln());
    let f1 = (map.t * (e.le1 - e.le0)).exp();
    let f2 = (map.t * (e.le2 - e.le0)).exp();
    (f1 * x1, f2 * x2)
}

fn on_line(x1: Complex64, x2: Complex64) -> bool {
    (x1 + x2 + Complex64::new(1.0, 0.0)).norm() <= 1e-9 * (1.0 + x1.norm() + x2.norm())
}

fn in_canonical_region(r1: f64, r2: f64) -> bool {
    r1 <= r2 * (1.0 + 1e-12) + 1e-300 && r2 <= 1.0 + 1e-12
}

/// Product guard: region constants multiply ratios of coordinates that can
/// overflow at the chart axes; a zero weight must kill the term exactly.
fn coef(c: f64, v: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * v
    }
}

/// Closed-form pullback ratio against dx₁∧dx̄₁ for a point of the plain line
/// in the region r₁ ≤ r₂ ≤ 1, with gradients supplied by the profile.
fn line_ratio(map: &IsotopyMap, x1: Complex64, x2: Complex64, e: &EtaDerivs) -> f64 {
    let t = map.t;
    let r1 = x1.norm();
    let r2 = x2.norm();
    let phi1 = e.le1 - e.le0;
    let phi2 = e.le2 - e.le0;
    let (p1, q1) = (e.d1.0 - e.d0.0, e.d1.1 - e.d0.1);
    let (p2, q2) = (e.d2.0 - e.d0.0, e.d2.1 - e.d0.1);
    let g1 = (2.0 * t * phi1).exp();
    let g2 = (2.0 * t * phi2).exp();
    let re12 = (x1 / x2).re;
    let re21 = (x2 / x1).re;
    let n = g1 * (1.0 + t * (p1 - coef(q1, re12)))
        + g2 * (1.0 + t * (q2 - coef(p2, re21)))
        + g1 * g2 * (1.0 - t * coef(p1 - p2, x2.re) + t * coef(q1 - q2, x1.re));
    let d = 1.0 + g1 * r1 * r1 + g2 * r2 * r2;
    n / (d * d)
}

/// Ratio of the pulled-back Fubini-Study form to the chart area form
/// dx₁∧dx̄₁, evaluated by the closed-form region expression. The point must
/// lie on the deformed curve's time-0 position (the plain line, or the
/// cutoff line for the `GammaEps` profile) and in the region r₁ ≤ r₂ ≤ 1.
pub fn pullback_ratio(
    map: &IsotopyMap,
    x1: Complex64,
    x2: Complex64,
) -> Result<f64, LocalModelError> {
    let r1 = x1.norm();
    let r2 = x2.norm();
    if !in_canonical_region(r1, r2) {
        return Err(LocalModelError::RegionMismatch(r1, r2));
    }
    match map.profile.kind {
        ProfileKind::GammaEps => {
            let p = &map.profile;
            // Saturation of the other two cutoff weights is part of the
            // region: the formula treats only the x₁ coefficient as cut.
            if r2 < p.a2 * p.eps {
                return Err(LocalModelError::RegionMismatch(r1, r2));
            }
            let g = p.gamma(r1 * r1);
            let gs = p.gamma_sharp(r1 * r1);
            let res = g * x1 + x2 + Complex64::new(1.0, 0.0);
            if res.norm() > 1e-9 * (1.0 + r1 + r2) {
                return Err(LocalModelError::NotOnCurve(x1, x2));
            }
            let t = map.t;
            let s = (1.0 / r2).powf(2.0 * t);
            let re12 = if r2 == 0.0 { 0.0 } else { (x1 / x2).re };
            // Lower bound from the cutoff-region computation: the x₂ wedge
            // term is nonnegative and dropped.
            let n = s * (1.0 + t * (g + gs) * re12) + s * s * (1.0 - x1.re * gs);
            let d = 1.0 + s * (r1 * r1 + r2 * r2);
            Ok(n / (d * d))
        }
        ProfileKind::PiecewiseMax => {
            if !on_line(x1, x2) {
                return Err(LocalModelError::NotOnCurve(x1, x2));
            }
            let e = eta_derivs_sharp_region(r2.ln());
            Ok(line_ratio(map, x1, x2, &e))
        }
        ProfileKind::SmoothedH | ProfileKind::OptimalB => {
            if !on_line(x1, x2) {
                return Err(LocalModelError::NotOnCurve(x1, x2));
            }
            let e = eta_derivs(&map.profile, r1.ln(), r2.ln());
            Ok(line_ratio(map, x1, x2, &e))
        }
    }
}

/// Same ratio normalized against the restriction of the Fubini-Study form
/// to the undeformed line, ω_FS|_{C₀} = 3 dx₁∧dx̄₁ / (1 + |x|²)².
pub fn pullback_ratio_vs_restriction(
    map: &IsotopyMap,
    x1: Complex64,
    x2: Complex64,
) -> Result<f64, LocalModelError> {
    if map.profile.kind == ProfileKind::GammaEps {
        return Err(LocalModelError::ProfileMismatch("plain line"));
    }
    let r = pullback_ratio(map, x1, x2)?;
    let d = 1.0 + x1.norm_sqr() + x2.norm_sqr();
    Ok(r * d * d / 3.0)
}

/// Moves an arbitrary chart point into the region r₁ ≤ r₂ ≤ 1 by the
/// homogeneous coordinate permutation with largest modulus in slot 0 and
/// smallest in slot 1. Permutations preserve the line and the Fubini-Study
/// form, and the radial deformations commute with them.
pub fn canonicalize(x1: Complex64, x2: Complex64) -> (Complex64, Complex64) {
    let z = [Complex64::new(1.0, 0.0), x1, x2];
    let m = [1.0, x1.norm(), x2.norm()];
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| m[a].partial_cmp(&m[b]).unwrap());
    (z[idx[0]] / z[idx[2]], z[idx[1]] / z[idx[2]])
}

/// Region ratio after canonicalization; defined for every chart point of
/// the plain line.
pub fn pullback_ratio_any(
    map: &IsotopyMap,
    x1: Complex64,
    x2: Complex64,
) -> Result<f64, LocalModelError> {
    let (a, b) = canonicalize(x1, x2);
    pullback_ratio(map, a, b)
}

/// Decomposition of the smoothed ratio into the principal part ω̃_t and the
/// three displayed remainder terms: ratio ≈ ω̃_t + t[(1-λ₀)R₀ + λ₁R₁ + λ₂R₂]
/// up to corrections that vanish with the smoothing window.
pub struct RemainderTerms {
    pub omega_tilde: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub lam0: f64,
    pub lam1: f64,
    pub lam2: f64,
}

pub fn remainder_terms(
    map: &IsotopyMap,
    x1: Complex64,
    x2: Complex64,
) -> Result<RemainderTerms, LocalModelError> {
    if !matches!(
        map.profile.kind,
        ProfileKind::SmoothedH | ProfileKind::OptimalB
    ) {
        return Err(LocalModelError::ProfileMismatch("smoothed"));
    }
    if !on_line(x1, x2) {
        return Err(LocalModelError::NotOnCurve(x1, x2));
    }
    let p = &map.profile;
    let t = map.t;
    let r1 = x1.norm();
    let r2 = x2.norm();
    let (l1, l2) = (r1.ln(), r2.ln());
    let e = eta_derivs(p, l1, l2);
    let g1 = (2.0 * t * (e.le1 - e.le0)).exp();
    let g2 = (2.0 * t * (e.le2 - e.le0)).exp();
    let eta1_2t = (2.0 * t * e.le1).exp();
    let eta2_2t = (2.0 * t * e.le2).exp();
    let re12 = (x1 / x2).re;
    let re21 = (x2 / x1).re;
    let d = 1.0 + g1 * r1 * r1 + g2 * r2 * r2;
    let dd = d * d;
    Ok(RemainderTerms {
        omega_tilde: (g2 * (1.0 + t * re12) + g1 * (1.0 - t) + g1 * g2) / dd,
        r0: (g2 * (1.0 + re21) - g1 * (1.0 + re12)) / dd,
        r1: g2 * (eta1_2t * x2.re - re21) / dd,
        r2: g1 * (eta2_2t * x1.re - re12) / dd,
        lam0: p.lambda(l2 - l1),
        lam1: p.lambda(l1),
        lam2: p.lambda(l2),
    })
}

/// Grid of on-curve points covering the region r₁ ≤ r₂ ≤ 1 of the plain
/// line; half-cell offsets keep samples off the region boundary.
fn canonical_line_grid(grid: usize) -> Vec<(Complex64, Complex64)> {
    let half = 3f64.sqrt() / 2.0;
    let mut pts = Vec::new();
    for i in 0..grid {
        let u = -0.5 + 0.5 * (i as f64 + 0.5) / grid as f64;
        for j in 0..grid {
            let v = -half + 2.0 * half * (j as f64 + 0.5) / grid as f64;
            let x1 = Complex64::new(u, v);
            let x2 = -Complex64::new(1.0, 0.0) - x1;
            let (r1, r2) = (x1.norm(), x2.norm());
            if r1 <= r2 && r2 <= 1.0 && r1 > 0.0 {
                pts.push((x1, x2));
            }
        }
    }
    pts
}

#[derive(Debug, Clone, Copy)]
pub struct TBound {
    pub t: f64,
    pub min_dx: f64,
    pub min_fs: f64,
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub kind: ProfileKind,
    pub eps: f64,
    pub grid: usize,
    pub samples: usize,
    pub per_t: Vec<TBound>,
    pub min_dx: f64,
    pub min_fs: f64,
    pub witness: (Complex64, Complex64, f64),
}

/// Sweeps the region grid over `t_steps` deformation times and returns the
/// minimum certified ratios. Fails with a witness if any ratio drops to
/// zero or below.
pub fn certify_bounds(
    profile: &CutoffProfile,
    t_steps: usize,
    grid: usize,
) -> Result<CertificateReport, LocalModelError> {
    if t_steps < 2 || grid < 8 {
        return Err(LocalModelError::BadProfile(
            "need at least 2 time steps and an 8-cell grid",
        ));
    }
    let pts: Vec<(Complex64, Complex64)> = match profile.kind {
        ProfileKind::GammaEps => canonical_line_grid(grid)
            .into_iter()
            .filter_map(|(x1, _)| {
                let g = profile.gamma(x1.norm_sqr());
                let x2 = -Complex64::new(1.0, 0.0) - g * x1;
                let (r1, r2) = (x1.norm(), x2.norm());
                (r1 <= r2 && r2 <= 1.0 && r2 >= profile.a2 * profile.eps).then_some((x1, x2))
            })
            .collect(),
        _ => canonical_line_grid(grid),
    };
    let samples = pts.len();
    let mut per_t = Vec::with_capacity(t_steps);
    let mut min_dx = f64::INFINITY;
    let mut min_fs = f64::INFINITY;
    let mut witness = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
    for k in 0..t_steps {
        let t = k as f64 / (t_steps - 1) as f64;
        let map = IsotopyMap {
            profile: *profile,
            t,
        };
        let (t_dx, t_fs, arg) = pts
            .par_iter()
            .map(|&(x1, x2)| {
                let r = pullback_ratio(&map, x1, x2).expect("grid point in region");
                let d = 1.0 + x1.norm_sqr() + x2.norm_sqr();
                (r, r * d * d / 3.0, (x1, x2))
            })
            .reduce(
                || (f64::INFINITY, f64::INFINITY, (Complex64::default(), Complex64::default())),
                |a, b| {
                    let dx = a.0.min(b.0);
                    let fs = a.1.min(b.1);
                    let arg = if b.0 < a.0 { b.2 } else { a.2 };
                    (dx, fs, arg)
                },
            );
        per_t.push(TBound {
            t,
            min_dx: t_dx,
            min_fs: t_fs,
        });
        if t_dx < min_dx {
            min_dx = t_dx;
            witness = (arg.0, arg.1, t);
        }
        min_fs = min_fs.min(t_fs);
    }
    if min_dx <= 0.0 {
        return Err(LocalModelError::BoundViolation {
            t: witness.2,
            x1: witness.0,
            x2: witness.1,
            ratio: min_dx,
        });
    }
    Ok(CertificateReport {
        kind: profile.kind,
        eps: profile.eps,
        grid,
        samples,
        per_t,
        min_dx,
        min_fs,
        witness,
    })
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub eps: Vec<f64>,
    pub max_deviation: Vec<f64>,
    /// deviation(eps_{i+1}) / deviation(eps_i) for consecutive entries.
    pub halving_ratios: Vec<f64>,
    /// deviation / eps for the smoothed profile, deviation / √eps for the
    /// optimal one; should stay of one magnitude across the sweep.
    pub scale_constants: Vec<f64>,
}

/// Maximum deviation of a smoothed-profile ratio from the sharp-profile
/// ratio over the region sweep, for each smoothing width.
pub fn deviation_scaling(
    kind: ProfileKind,
    eps_list: &[f64],
    t_steps: usize,
    grid: usize,
) -> Result<ScalingReport, LocalModelError> {
    if !matches!(kind, ProfileKind::SmoothedH | ProfileKind::OptimalB) {
        return Err(LocalModelError::ProfileMismatch("smoothed"));
    }
    if eps_list.is_empty() {
        return Err(LocalModelError::BadProfile("empty eps sweep"));
    }
    let pts = canonical_line_grid(grid);
    let sharp = CutoffProfile::piecewise_max();
    let mut max_deviation = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let prof = match kind {
            ProfileKind::SmoothedH => CutoffProfile::smoothed(eps)?,
            _ => CutoffProfile::optimal(eps)?,
        };
        let mut dev: f64 = 0.0;
        for k in 0..t_steps {
            let t = k as f64 / (t_steps - 1) as f64;
            let m_sharp = IsotopyMap { profile: sharp, t };
            let m_smooth = IsotopyMap { profile: prof, t };
            let d = pts
                .par_iter()
                .map(|&(x1, x2)| {
                    let a = pullback_ratio(&m_sharp, x1, x2).expect("grid point in region");
                    let b = pullback_ratio(&m_smooth, x1, x2).expect("grid point in region");
                    (a - b).abs()
                })
                .reduce(|| 0.0, f64::max);
            dev = dev.max(d);
        }
        max_deviation.push(dev);
    }
    let halving_ratios = max_deviation
        .windows(2)
        .map(|w| w[1] / w[0])
        .collect::<Vec<_>>();
    let scale_constants = eps_list
        .iter()
        .zip(&max_deviation)
        .map(|(&e, &d)| match kind {
            ProfileKind::SmoothedH => d / e,
            _ => d / e.sqrt(),
        })
        .collect();
    Ok(ScalingReport {
        eps: eps_list.to_vec(),
        max_deviation,
        halving_ratios,
        scale_constants,
    })
}

/// The cutoff line p_t = γ_{ε,t}(r₁²/η₁²)x₁ + γ_{ε,t}(r₂²/η₂²)x₂ + γ_{ε,t}(1/η₀²)
/// with γ_{ε,t}(u) = t·γ_ε(u) + (1-t) and sharp η's. At t = 0 this is the
/// plain line; at t = 1 the coefficients vanish near the coordinate axes and
/// the curve becomes toric there.
#[derive(Debug, Clone, Copy)]
pub struct CutoffLine {
    pub profile: CutoffProfile,
    pub t: f64,
}

pub fn cutoff_line(profile: &CutoffProfile, t: f64) -> Result<CutoffLine, LocalModelError> {
    if profile.kind != ProfileKind::GammaEps {
        return Err(LocalModelError::ProfileMismatch("GammaEps"));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(LocalModelError::BadProfile("t must lie in [0, 1]"));
    }
    Ok(CutoffLine {
        profile: *profile,
        t,
    })
}

impl CutoffLine {
    fn gamma_t(&self, u: f64) -> f64 {
        self.t * self.profile.gamma(u) + (1.0 - self.t)
    }

    /// The three coefficient weights at radii (r₁, r₂): the multipliers of
    /// x₁, x₂ and the constant term.
    pub fn gamma_weights(&self, r1: f64, r2: f64) -> (f64, f64, f64) {
        let eta1 = r2.max(1.0);
        let eta2 = r1.max(1.0);
        let eta0 = r1.max(r2);
        (
            self.gamma_t((r1 / eta1).powi(2)),
            self.gamma_t((r2 / eta2).powi(2)),
            self.gamma_t((1.0 / eta0).powi(2)),
        )
    }

    pub fn eval(&self, x1: Complex64, x2: Complex64) -> Complex64 {
        let (c1, c2, c0) = self.gamma_weights(x1.norm(), x2.norm());
        c1 * x1 + c2 * x2 + Complex64::new(c0, 0.0)
    }

    /// True when any of the three γ arguments falls in the open transition
    /// band (a1·eps, a2·eps); outside it the evaluator agrees with the plain
    /// line or a toric axis line exactly.
    pub fn in_transition(&self, r1: f64, r2: f64) -> bool {
        let eta1 = r2.max(1.0);
        let eta2 = r1.max(1.0);
        let eta0 = r1.max(r2);
        let lo = self.profile.a1 * self.profile.eps;
        let hi = self.profile.a2 * self.profile.eps;
        [r1 / eta1, r2 / eta2, 1.0 / eta0]
            .into_iter()
            .any(|s| s > lo && s < hi)
    }

    /// All solutions x₁ of p_t(x₁, x₂) = 0 on the slice of fixed x₂ with
    /// |x₁| ≤ rho_max. The radial profile of the x₁ term is nondecreasing,
    /// so roots are located by a sign scan over log-spaced radii followed by
    /// bisection. A slice through a dead zone of the x₁ coefficient where
    /// the rest of the section also vanishes contributes one marker point of
    /// the toric disc.
    pub fn slice_roots(&self, x2: Complex64, rho_max: f64) -> Vec<Complex64> {
        let r2 = x2.norm();
        let rest = |rho: f64| -> Complex64 {
            let (_, c2, c0) = self.gamma_weights(rho, r2);
            c2 * x2 + Complex64::new(c0, 0.0)
        };
        let lhs = |rho: f64| -> f64 {
            let (c1, _, _) = self.gamma_weights(rho, r2);
            c1 * rho
        };
        let f = |rho: f64| lhs(rho) - rest(rho).norm();
        let n = 800;
        let lo_log = (1e-6f64).ln();
        let hi_log = rho_max.max(1e-5).ln();
        let grid: Vec<f64> = (0..=n)
            .map(|i| (lo_log + (hi_log - lo_log) * i as f64 / n as f64).exp())
            .collect();
        let mut roots: Vec<Complex64> = Vec::new();
        let mut push_root = |rho: f64| {
            let w = rest(rho);
            let x1 = if w.norm() > 1e-14 {
                -rho * w / w.norm()
            } else {
                Complex64::new(rho, 0.0)
            };
            if roots
                .iter()
                .all(|r| (r - x1).norm() > 1e-9 * (1.0 + rho))
            {
                roots.push(x1);
            }
        };
        // Dead-zone disc: both sides identically zero at small radii.
        if f(grid[0]).abs() < 1e-14 && lhs(grid[0]) < 1e-14 {
            push_root(grid[0].max(1e-6));
        }
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (f(a), f(b));
            if fa == 0.0 {
                push_root(a);
                continue;
            }
            if fa * fb < 0.0 {
                let (mut lo, mut hi) = (a, b);
                let mut flo = fa;
                for _ in 0..90 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                push_root(0.5 * (lo + hi));
            }
        }
        roots
    }
}

/// Distance in the radii plane from (r₁, r₂) to the Y graph
/// Γ = {r₁ = 1, r₂ ≤ 1} ∪ {r₂ = 1, r₁ ≤ 1} ∪ {r₁ = r₂ ≥ 1}.
pub fn y_distance(r1: f64, r2: f64) -> f64 {
    let leg_a = if r2 <= 1.0 {
        (r1 - 1.0).abs()
    } else {
        (r1 - 1.0).hypot(r2 - 1.0)
    };
    let leg_b = if r1 <= 1.0 {
        (r2 - 1.0).abs()
    } else {
        (r1 - 1.0).hypot(r2 - 1.0)
    };
    let diag = if r1 + r2 >= 2.0 {
        (r1 - r2).abs() / 2f64.sqrt()
    } else {
        (r1 - 1.0).hypot(r2 - 1.0)
    };
    leg_a.min(leg_b).min(diag)
}

#[derive(Debug, Clone, Copy)]
pub struct YImageReport {
    pub samples: usize,
    pub max_dev: f64,
    /// Maximum deviation from points whose source log radii lie outside the
    /// exclusion ball around the vertex.
    pub max_dev_outside: f64,
    pub max_dev_inside: f64,
    /// Sup-norm radius of the log-radii exclusion ball, 3·eps.
    pub exclusion_radius: f64,
}

/// Samples the deformed curve and measures how far its radii image sits
/// from the Y graph. For the plain-line profiles the samples run over an
/// x₁ grid of the line; for the cutoff profile they come from slice-solving
/// the cutoff line along both axes.
pub fn y_image_check(map: &IsotopyMap, grid: usize) -> Result<YImageReport, LocalModelError> {
    let mut sources: Vec<(Complex64, Complex64)> = Vec::new();
    match map.profile.kind {
        ProfileKind::GammaEps => {
            let line = cutoff_line(&map.profile, 1.0)?;
            let n = grid.max(16);
            for i in 0..n {
                let lr = -3.0 + 4.1 * i as f64 / (n - 1) as f64;
                let r = lr.exp();
                for j in 0..24 {
                    let ang = 2.0 * std::f64::consts::PI * (j as f64 + 0.37) / 24.0;
                    let w = Complex64::from_polar(r, ang);
                    for x1 in line.slice_roots(w, r + 2.5) {
                        sources.push((x1, w));
                    }
                    // Second sweep axis: fixed x₁, roots in x₂; the cutoff
                    // line is symmetric under the coordinate swap.
                    for x2 in line.slice_roots(w, r + 2.5) {
                        sources.push((w, x2));
                    }
                }
            }
        }
        _ => {
            let n = grid.max(16);
            for i in 0..n {
                let u = -4.0 + 8.0 * (i as f64 + 0.5) / n as f64;
                for j in 0..n {
                    let v = -4.0 + 8.0 * (j as f64 + 0.5) / n as f64;
                    let x1 = Complex64::new(u, v);
                    let x2 = -Complex64::new(1.0, 0.0) - x1;
                    if x1.norm() > 1e-9 && x2.norm() > 1e-9 {
                        sources.push((x1, x2));
                    }
                }
            }
        }
    }
    let excl = 3.0 * map.profile.eps;
    let (mut max_dev, mut max_out, mut max_in) = (0f64, 0f64, 0f64);
    for &(x1, x2) in &sources {
        let (y1, y2) = apply_isotopy(map, x1, x2);
        let d = y_distance(y1.norm(), y2.norm());
        max_dev = max_dev.max(d);
        let l1 = x1.norm().ln().abs();
        let l2 = x2.norm().ln().abs();
        if l1.max(l2) < excl {
            max_in = max_in.max(d);
        } else {
            max_out = max_out.max(d);
        }
    }
    Ok(YImageReport {
        samples: sources.len(),
        max_dev,
        max_dev_outside: max_out,
        max_dev_inside: max_in,
        exclusion_radius: excl,
    })
}

/// Fubini-Study two-form on a pair of tangent vectors at `y`, scalarized by
/// dropping the overall factor i; dx∧dx̄ scalarizes to -2 on the coordinate
/// frame, so ratios against it divide by -2.
fn fs_two_form(
    y: (Complex64, Complex64),
    tu: (Complex64, Complex64),
    tv: (Complex64, Complex64),
) -> f64 {
    let z1 = tu.0 * tv.0.conj();
    let z2 = tu.1 * tv.1.conj();
    let au = y.1 * tu.0 - y.0 * tu.1;
    let av = y.1 * tv.0 - y.0 * tv.1;
    let z3 = au * av.conj();
    let d = 1.0 + y.0.norm_sqr() + y.1.norm_sqr();
    2.0 * (z1.im + z2.im + z3.im) / (d * d)
}

/// Numeric pullback ratio via centered differences of the composed map
/// x₁ ↦ 𝓕_t(x₁, x₂(x₁)) along the curve parameterized by `param`.
fn numeric_pullback_ratio(
    map: &IsotopyMap,
    x1: Complex64,
    param: &dyn Fn(Complex64) -> Complex64,
    h: f64,
) -> f64 {
    let g = |z: Complex64| -> (Complex64, Complex64) { apply_isotopy(map, z, param(z)) };
    let du = Complex64::new(h, 0.0);
    let dv = Complex64::new(0.0, h);
    let (au, bu) = g(x1 + du);
    let (cu, eu) = g(x1 - du);
    let (av, bv) = g(x1 + dv);
    let (cv, ev) = g(x1 - dv);
    let tu = ((au - cu) / (2.0 * h), (bu - eu) / (2.0 * h));
    let tv = ((av - cv) / (2.0 * h), (bv - ev) / (2.0 * h));
    fs_two_form(g(x1), tu, tv) / -2.0
}

/// Minimum numeric pullback ratio of the smoothed deformation applied to
/// the cutoff line over the transition disc |x₁| < a2·eps, where the curve
/// is genuinely non-holomorphic. Away from the disc the curve is complex
/// and automatically symplectic.
pub fn certify_cutoff_smoothed(
    cut: &CutoffProfile,
    smooth_eps: f64,
    t_steps: usize,
    grid: usize,
) -> Result<(f64, Complex64), LocalModelError> {
    if cut.kind != ProfileKind::GammaEps {
        return Err(LocalModelError::ProfileMismatch("GammaEps"));
    }
    let smooth = CutoffProfile::smoothed(smooth_eps)?;
    let cl = cutoff_line(cut, 1.0)?;
    let param = move |z: Complex64| -> Complex64 {
        -Complex64::new(1.0, 0.0) - cl.gamma_t(z.norm_sqr()) * z
    };
    let mut min_ratio = f64::INFINITY;
    let mut arg = Complex64::default();
    for k in 0..t_steps {
        let t = k as f64 / (t_steps - 1) as f64;
        let map = IsotopyMap { profile: smooth, t };
        for i in 0..grid {
            let rho = cut.a2 * cut.eps * (i as f64 + 0.5) / grid as f64;
            for j in 0..grid {
                let ang = 2.0 * std::f64::consts::PI * (j as f64 + 0.37) / grid as f64;
                let x1 = Complex64::from_polar(rho.max(1e-4), ang);
                let r = numeric_pullback_ratio(&map, x1, &param, 1e-5);
                if r < min_ratio {
                    min_ratio = r;
                    arg = x1;
                }
            }
        }
    }
    if min_ratio <= 0.0 {
        return Err(LocalModelError::BoundViolation {
            t: 1.0,
            x1: arg,
            x2: param(arg),
            ratio: min_ratio,
        });
    }
    Ok((min_ratio, arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn all_profiles() -> Vec<CutoffProfile> {
        vec![
            CutoffProfile::piecewise_max(),
            CutoffProfile::smoothed(0.1).unwrap(),
            CutoffProfile::optimal(0.1).unwrap(),
            CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap(),
        ]
    }

    #[test]
    fn identity_at_t_zero() {
        for profile in all_profiles() {
            let map = IsotopyMap { profile, t: 0.0 };
            let x1 = c(0.3, -0.7);
            let x2 = c(-1.3, 0.7);
            let (y1, y2) = apply_isotopy(&map, x1, x2);
            assert_eq!((y1, y2), (x1, x2));
        }
    }

    #[test]
    fn sharp_image_lands_on_y_graph() {
        let map = IsotopyMap {
            profile: CutoffProfile::piecewise_max(),
            t: 1.0,
        };
        let (y1, y2) = apply_isotopy(&map, c(-0.5, 0.0), c(-0.5, 0.0));
        assert!((y1 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((y2 - c(-1.0, 0.0)).norm() < 1e-15);
        // Every line point maps to radii on the graph, not just the sample.
        for i in 0..60 {
            for j in 0..60 {
                let x1 = c(-4.0 + 8.0 * (i as f64 + 0.5) / 60.0, -4.0 + 8.0 * (j as f64 + 0.5) / 60.0);
                let x2 = -c(1.0, 0.0) - x1;
                if x1.norm() < 1e-9 || x2.norm() < 1e-9 {
                    continue;
                }
                let (y1, y2) = apply_isotopy(&map, x1, x2);
                assert!(
                    y_distance(y1.norm(), y2.norm()) <= 1e-12,
                    "off graph at {x1}"
                );
            }
        }
    }

    #[test]
    fn isotopy_commutes_with_coordinate_swap() {
        for profile in all_profiles() {
            for t in [0.3, 1.0] {
                let map = IsotopyMap { profile, t };
                for &(a, b) in &[
                    (c(0.4, 0.2), c(-1.1, 0.3)),
                    (c(-2.0, 1.0), c(0.2, -0.1)),
                    (c(0.9, -0.9), c(1.4, 0.6)),
                ] {
                    let (y1, y2) = apply_isotopy(&map, a, b);
                    let (s2, s1) = apply_isotopy(&map, b, a);
                    assert!((y1 - s1).norm() <= 1e-12 * (1.0 + s1.norm()));
                    assert!((y2 - s2).norm() <= 1e-12 * (1.0 + s2.norm()));
                }
            }
        }
    }

    #[test]
    fn frozen_ratio_values_at_the_diagonal_point() {
        let x = c(-0.5, 0.0);
        let m0 = IsotopyMap {
            profile: CutoffProfile::piecewise_max(),
            t: 0.0,
        };
        let m1 = IsotopyMap {
            profile: CutoffProfile::piecewise_max(),
            t: 1.0,
        };
        let r0 = pullback_ratio(&m0, x, x).unwrap();
        let r1 = pullback_ratio(&m1, x, x).unwrap();
        assert!((r0 - 4.0 / 3.0).abs() < 1e-12, "t=0 ratio {r0}");
        assert!((r1 - 8.0 / 3.0).abs() < 1e-12, "t=1 ratio {r1}");
    }

    #[test]
    fn ratio_rejects_bad_points() {
        let map = IsotopyMap {
            profile: CutoffProfile::piecewise_max(),
            t: 0.5,
        };
        match pullback_ratio(&map, c(-2.0, 0.0), c(1.0, 0.0)) {
            Err(LocalModelError::RegionMismatch(..)) => {}
            other => panic!("expected region mismatch, got {other:?}"),
        }
        match pullback_ratio(&map, c(-0.3, 0.0), c(-0.3, 0.0)) {
            Err(LocalModelError::NotOnCurve(..)) => {}
            other => panic!("expected off-curve rejection, got {other:?}"),
        }
    }

    #[test]
    fn sharp_certificate_meets_displayed_bounds() {
        let report = certify_bounds(&CutoffProfile::piecewise_max(), 11, 120).unwrap();
        assert!(report.min_dx >= 1.0 / 6.0 - 1e-9, "min {}", report.min_dx);
        assert!(report.min_fs >= 0.5 - 1e-9, "min fs {}", report.min_fs);
        assert!(report.samples > 5_000);
    }

    #[test]
    fn smoothed_ratio_matches_sharp_away_from_seams() {
        let eps = 0.1;
        let smooth = CutoffProfile::smoothed(eps).unwrap();
        for t in [0.0, 0.4, 1.0] {
            let ms = IsotopyMap { profile: smooth, t };
            let mp = IsotopyMap {
                profile: CutoffProfile::piecewise_max(),
                t,
            };
            for &(x1, x2) in &canonical_line_grid(40) {
                let l1 = x1.norm().ln();
                let l2 = x2.norm().ln();
                if l1.abs() < 2.0 * eps || l2.abs() < 2.0 * eps || (l2 - l1).abs() < 2.0 * eps {
                    continue;
                }
                let a = pullback_ratio(&ms, x1, x2).unwrap();
                let b = pullback_ratio(&mp, x1, x2).unwrap();
                assert!((a - b).abs() < 1e-12, "smoothed {a} sharp {b} at {x1}");
            }
        }
    }

    #[test]
    fn deviation_halves_with_the_window() {
        let report =
            deviation_scaling(ProfileKind::SmoothedH, &[0.2, 0.1, 0.05], 6, 120).unwrap();
        for r in &report.halving_ratios {
            assert!((0.3..=3.0).contains(r), "smoothed halving ratio {r}");
        }
        let opt = deviation_scaling(ProfileKind::OptimalB, &[0.2, 0.1, 0.05], 6, 120).unwrap();
        for r in &opt.halving_ratios {
            assert!((0.3..=3.0).contains(r), "optimal halving ratio {r}");
        }
        // Smoothed deviations vanish linearly, so they drop faster than the
        // optimal profile's square-root rate.
        assert!(report.max_deviation[2] < opt.max_deviation[2]);
    }

    #[test]
    fn lambda_matches_derivative_of_a_times_h() {
        for profile in [
            CutoffProfile::smoothed(0.1).unwrap(),
            CutoffProfile::optimal(0.07).unwrap(),
        ] {
            let fd = 1e-6;
            for i in 0..100 {
                let a = -0.25 + 0.5 * i as f64 / 99.0;
                let num =
                    ((a + fd) * profile.h(a + fd) - (a - fd) * profile.h(a - fd)) / (2.0 * fd);
                assert!(
                    (profile.lambda(a) - num).abs() < 1e-6,
                    "lambda mismatch at {a}"
                );
            }
        }
    }

    #[test]
    fn h_is_a_balanced_nondecreasing_step() {
        let profile = CutoffProfile::smoothed(0.13).unwrap();
        let mut prev = -1.0;
        for i in 0..1000 {
            let a = -0.4 + 0.8 * i as f64 / 999.0;
            let h = profile.h(a);
            assert!((h + profile.h(-a) - 1.0).abs() <= 1e-12);
            assert!(h >= prev - 1e-15);
            prev = h;
        }
        assert_eq!(profile.h(-0.13), 0.0);
        assert_eq!(profile.h(0.13), 1.0);
    }

    #[test]
    fn b_profile_saturates_with_bounded_slope() {
        let eps = 0.09f64;
        let profile = CutoffProfile::optimal(eps).unwrap();
        assert_eq!(profile.b(0.0), 0.0);
        assert_eq!(profile.b(-1.0), 0.0);
        assert_eq!(profile.b(eps.sqrt()), 1.0);
        let mut max_slope = 0.0f64;
        let mut prev = 0.0;
        for i in 0..=2000 {
            let a = eps.sqrt() * i as f64 / 2000.0;
            let b = profile.b(a);
            assert!(b >= prev - 1e-15);
            prev = b;
            max_slope = max_slope.max(profile.b_prime(a));
        }
        assert!(max_slope <= 1.875 / eps.sqrt() + 1e-9);
        assert!(max_slope >= 1.8 / eps.sqrt());
    }

    #[test]
    fn gamma_saturates_at_the_stated_radii() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let inner = 1.5 * 0.05;
        let outer = 2.5 * 0.05;
        assert_eq!(p.gamma(inner * inner), 0.0);
        assert_eq!(p.gamma(outer * outer), 1.0);
        let mid = 0.5 * (inner + outer);
        let g = p.gamma(mid * mid);
        assert!(g > 0.0 && g < 1.0);
        let fd = ((p.gamma(mid * mid + 1e-7) - p.gamma(mid * mid - 1e-7)) / 2e-7) * 2.0
            * mid
            * mid;
        assert!((p.gamma_sharp(mid * mid) - fd).abs() < 1e-4);
    }

    #[test]
    fn profile_validation_rejects_bad_parameters() {
        assert!(CutoffProfile::smoothed(-1.0).is_err());
        assert!(CutoffProfile::cutoff(0.05, 0.9, 2.5).is_err());
        assert!(CutoffProfile::cutoff(0.05, 2.5, 1.5).is_err());
        assert!(CutoffProfile::cutoff(0.5, 1.5, 2.5).is_err());
        assert!(IsotopyMap::new(CutoffProfile::piecewise_max(), 1.5).is_err());
    }

    #[test]
    fn cutoff_line_is_plain_at_t_zero() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let line = cutoff_line(&p, 0.0).unwrap();
        for &(x1, x2) in &[(c(0.01, 0.02), c(-3.0, 1.0)), (c(2.0, -1.0), c(0.5, 0.5))] {
            let lhs = line.eval(x1, x2);
            let rhs = x1 + x2 + c(1.0, 0.0);
            assert!((lhs - rhs).norm() < 1e-15);
        }
    }

    #[test]
    fn cutoff_saturated_zone_is_the_toric_line() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let line = cutoff_line(&p, 1.0).unwrap();
        let x1 = c(0.03, 0.04);
        let x2 = c(-0.95, 0.2);
        assert_eq!(line.eval(x1, x2), x2 + c(1.0, 0.0));
    }

    #[test]
    fn cutoff_roots_match_the_plain_line_outside_transition() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let line = cutoff_line(&p, 1.0).unwrap();
        let mut checked = 0;
        for i in 0..40 {
            let ang = 2.0 * std::f64::consts::PI * i as f64 / 40.0;
            for r in [0.4, 0.8, 1.3] {
                let x2 = Complex64::from_polar(r, ang);
                let plain = -c(1.0, 0.0) - x2;
                if line.in_transition(plain.norm(), r) {
                    continue;
                }
                assert!(
                    line.eval(plain, x2).norm() <= 1e-12 * (1.0 + r),
                    "plain root lost at {x2}"
                );
                let roots = line.slice_roots(x2, r + 2.5);
                assert!(
                    roots.iter().any(|z| (z - plain).norm() < 1e-6),
                    "solver missed plain root at {x2}"
                );
                checked += 1;
            }
        }
        assert!(checked > 60);
    }

    #[test]
    fn cutoff_slice_through_the_dead_zone_is_toric() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let line = cutoff_line(&p, 1.0).unwrap();
        let roots = line.slice_roots(c(-1.0, 0.0), 3.0);
        assert!(!roots.is_empty());
        assert!(roots.iter().any(|z| z.norm() <= 1.5 * 0.05 + 1e-9));
    }

    #[test]
    fn y_image_sharp_is_exact_and_identity_spread_is_recorded() {
        let exact = y_image_check(
            &IsotopyMap {
                profile: CutoffProfile::piecewise_max(),
                t: 1.0,
            },
            160,
        )
        .unwrap();
        assert!(exact.max_dev <= 1e-12, "sharp deviation {}", exact.max_dev);
        let spread = y_image_check(
            &IsotopyMap {
                profile: CutoffProfile::piecewise_max(),
                t: 0.0,
            },
            160,
        )
        .unwrap();
        // The undeformed line's radii fill the curved triangle; its farthest
        // points sit near the asymptotic 1/sqrt(2) strip distance.
        assert!(spread.max_dev > 0.5 && spread.max_dev < 0.7072);
    }

    #[test]
    fn y_image_smoothed_fattens_linearly_and_optimal_is_exact() {
        let mut devs = Vec::new();
        for eps in [0.2, 0.1] {
            let sm = CutoffProfile::smoothed(eps).unwrap();
            let r = y_image_check(&IsotopyMap { profile: sm, t: 1.0 }, 160).unwrap();
            // The smoothing windows bend the image off the graph along the
            // full length of each seam, by at most a fixed multiple of eps.
            let scale = r.max_dev / eps;
            assert!((0.04..0.10).contains(&scale), "smoothed dev/eps {scale}");
            devs.push(r.max_dev);
        }
        let halving = devs[1] / devs[0];
        assert!((0.4..0.6).contains(&halving), "halving {halving}");
        // The shrinking windows of the optimal profile leave no residue:
        // its time-1 image sits on the graph to machine precision.
        let op = CutoffProfile::optimal(0.1).unwrap();
        let r = y_image_check(&IsotopyMap { profile: op, t: 1.0 }, 160).unwrap();
        assert!(r.max_dev <= 1e-12, "optimal deviation {}", r.max_dev);
    }

    #[test]
    fn y_image_cutoff_lands_on_the_graph() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let report = y_image_check(&IsotopyMap { profile: p, t: 1.0 }, 48).unwrap();
        assert!(report.samples > 1_000);
        assert!(report.max_dev <= 1e-9, "cutoff deviation {}", report.max_dev);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn eta_gradients_match_finite_differences(
            l1 in -1.2f64..0.6,
            l2 in -1.2f64..0.6,
            smoothed in prop::bool::ANY,
        ) {
            let p = if smoothed {
                CutoffProfile::smoothed(0.11).unwrap()
            } else {
                CutoffProfile::optimal(0.11).unwrap()
            };
            let fd = 1e-6;
            let e = eta_derivs(&p, l1, l2);
            for (get, grad) in [
                (&(|a: f64, b: f64| eta_derivs(&p, a, b).le1) as &dyn Fn(f64, f64) -> f64, e.d1),
                (&(|a: f64, b: f64| eta_derivs(&p, a, b).le2), e.d2),
                (&(|a: f64, b: f64| eta_derivs(&p, a, b).le0), e.d0),
            ] {
                let g1 = (get(l1 + fd, l2) - get(l1 - fd, l2)) / (2.0 * fd);
                let g2 = (get(l1, l2 + fd) - get(l1, l2 - fd)) / (2.0 * fd);
                prop_assert!((g1 - grad.0).abs() < 5e-6, "d/dl1 {} vs {}", g1, grad.0);
                prop_assert!((g2 - grad.1).abs() < 5e-6, "d/dl2 {} vs {}", g2, grad.1);
            }
        }

        #[test]
        fn closed_form_ratio_matches_numeric_pullback(
            u in -0.47f64..-0.03,
            v in -0.8f64..0.8,
            t in 0.0f64..1.0,
            which in 0usize..3,
        ) {
            let x1 = c(u, v);
            let x2 = -c(1.0, 0.0) - x1;
            let (r1, r2) = (x1.norm(), x2.norm());
            prop_assume!(r1 < r2 * 0.995 && r2 < 0.995 && r1 > 0.05);
            let profile = match which {
                0 => CutoffProfile::piecewise_max(),
                1 => CutoffProfile::smoothed(0.1).unwrap(),
                _ => CutoffProfile::optimal(0.1).unwrap(),
            };
            // The sharp profile is non-differentiable on the seams; keep a
            // margin so the finite differences stay inside one region.
            if which == 0 {
                let (l1, l2) = (r1.ln(), r2.ln());
                prop_assume!(l1.abs() > 1e-3 && l2.abs() > 1e-3 && (l2 - l1).abs() > 1e-3);
            }
            let map = IsotopyMap { profile, t };
            let formula = pullback_ratio(&map, x1, x2).unwrap();
            let param = |z: Complex64| -c(1.0, 0.0) - z;
            let numeric = numeric_pullback_ratio(&map, x1, &param, 1e-5);
            prop_assert!(
                (formula - numeric).abs() <= 1e-4 * (1.0 + formula.abs()),
                "formula {} numeric {}", formula, numeric
            );
        }

        #[test]
        fn region_ratio_is_permutation_invariant(
            u in -0.45f64..-0.05,
            v in -0.7f64..0.7,
            t in 0.0f64..1.0,
        ) {
            let x1 = c(u, v);
            let x2 = -c(1.0, 0.0) - x1;
            prop_assume!(x1.norm() > 0.05 && x1.norm() < 0.98 * x2.norm() && x2.norm() < 0.98);
            let map = IsotopyMap { profile: CutoffProfile::smoothed(0.1).unwrap(), t };
            let base = pullback_ratio(&map, x1, x2).unwrap();
            // All six homogeneous permutations of the same projective point.
            let images = [
                (x2, x1),
                (x1 / x2, 1.0 / x2),
                (1.0 / x2, x1 / x2),
                (x2 / x1, 1.0 / x1),
                (1.0 / x1, x2 / x1),
            ];
            for (a, b) in images {
                let r = pullback_ratio_any(&map, a, b).unwrap();
                prop_assert!((r - base).abs() < 1e-9 * (1.0 + base), "{} vs {}", r, base);
            }
        }
    }

    #[test]
    fn remainder_terms_decompose_the_smoothed_ratio() {
        let eps = 0.05;
        let profile = CutoffProfile::smoothed(eps).unwrap();
        let mut max_r: f64 = 0.0;
        let mut max_gap: f64 = 0.0;
        for t in [0.5, 1.0] {
            let map = IsotopyMap { profile, t };
            for &(x1, x2) in &canonical_line_grid(160) {
                let (l1, l2) = (x1.norm().ln(), x2.norm().ln());
                let in_strip =
                    l1.abs() < eps || l2.abs() < eps || (l2 - l1).abs() < eps;
                if !in_strip {
                    continue;
                }
                let terms = remainder_terms(&map, x1, x2).unwrap();
                let rt = (1.0 - terms.lam0) * terms.r0
                    + terms.lam1 * terms.r1
                    + terms.lam2 * terms.r2;
                max_r = max_r.max(rt.abs());
                let full = pullback_ratio(&map, x1, x2).unwrap();
                max_gap = max_gap.max((full - terms.omega_tilde - t * rt).abs());
            }
        }
        // The remainder stays of size eps inside the seam strips and the
        // decomposition closes up to the same order.
        assert!(max_r < 1.2 * eps, "remainder {max_r}");
        assert!(max_r > 0.01 * eps);
        assert!(max_gap < 1.2 * eps, "decomposition gap {max_gap}");
    }

    #[test]
    fn cutoff_certificates_stay_positive() {
        let p = CutoffProfile::cutoff(0.05, 1.5, 2.5).unwrap();
        let report = certify_bounds(&p, 6, 120).unwrap();
        // The minimum sits at the region corner r1 = r2 = 1, outside the
        // cutoff disc, so it matches the sharp-profile bound.
        assert!(
            report.min_dx >= 1.0 / 6.0 - 1e-9,
            "cutoff min ratio {}",
            report.min_dx
        );
        // Smoothed deformation of the cutoff curve over the transition
        // disc: bounded below by 1/2 minus a fixed multiple of eps.
        let mut mins = Vec::new();
        for eps in [0.1, 0.05] {
            let p = CutoffProfile::cutoff(eps, 1.5, 2.5).unwrap();
            let (min_smooth, _) = certify_cutoff_smoothed(&p, eps, 6, 32).unwrap();
            let c = (0.5 - min_smooth) / eps;
            assert!((0.4..1.0).contains(&c), "eps {eps} deficit constant {c}");
            mins.push(min_smooth);
        }
        assert!(mins[1] > mins[0]);
    }
}

