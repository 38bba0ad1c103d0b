//! Weighted sections and the moment map they induce on the torus.
//!
//! A section is `s^{δ^w} = Σ δ^{w_m} a_m e^{<m, n>}` over the lattice points
//! of the Newton polygon, with `n = log r + iθ`. The densities
//! `ρ_m = |term_m|² / Σ|term|²` depend only on the radii and push the torus
//! into the polygon via `F(x) = Σ ρ_m(x) · m`. Near the large complex limit
//! (δ → 0) the mass at a point concentrates on one face of the subdivision
//! `Z_w`; `active_simplex` checks that concentration pointwise.
//!
//! All magnitudes run through log-sum-exp: terms are compared by
//! `L_m = w_m ln δ + <m, log r> + ln|a_m|` with the maximum subtracted, since
//! `δ^{w_m}` underflows doubles long before the mathematics degenerates.

use crate::lattice::{LatticePoint, LatticePolygon};
use crate::rat::{rat_to_f64, Rat};
use crate::subdivision::{interpolant, subdivide, Subdivision, WeightFunction};
use num::Signed;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum MomentError {
    #[error("section has no nonzero coefficients")]
    EmptySection,
    #[error("delta must lie in (0, 1], got {0}")]
    DeltaOutOfRange(f64),
    #[error("delta must lie strictly below 1 for localization checks, got {0}")]
    DeltaNotLocalizing(f64),
    #[error("a_exponent must be positive, got {0}")]
    BadExponent(f64),
    #[error("section term at {0} lies outside the weight polygon")]
    SupportOutsidePolygon(LatticePoint),
    #[error("coordinates must be finite")]
    NonFiniteInput,
    #[error("weight has no positive cell gap; supply an explicit a_exponent")]
    NoPositiveGap,
    #[error("active set {{{}}} is not a face of any cell (δ may be too large or w non-generic)",
        .active.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))]
    ActiveSetNotAFace {
        x: TorusPoint,
        active: Vec<LatticePoint>,
        rho: Vec<(LatticePoint, f64)>,
    },
}

/// A Laurent polynomial section: complex coefficients on lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSection {
    terms: Vec<(LatticePoint, Complex64)>,
    unit_modulus: bool,
}

impl LaurentSection {
    /// Terms with zero coefficients are dropped; duplicate points rejected.
    pub fn new(mut terms: Vec<(LatticePoint, Complex64)>) -> Result<Self, MomentError> {
        terms.retain(|(_, a)| a.norm_sqr() != 0.0);
        terms.sort_by_key(|(m, _)| *m);
        if terms.is_empty() {
            return Err(MomentError::EmptySection);
        }
        for pair in terms.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(MomentError::SupportOutsidePolygon(pair[0].0));
            }
        }
        if terms.iter().any(|(_, a)| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(MomentError::NonFiniteInput);
        }
        Ok(Self {
            terms,
            unit_modulus: false,
        })
    }

    /// The all-ones section on every lattice point of the polygon.
    pub fn ones(polygon: &LatticePolygon) -> Self {
        let terms = polygon
            .enumerate_points()
            .into_iter()
            .map(|m| (m, Complex64::new(1.0, 0.0)))
            .collect();
        Self::new(terms).expect("polygon has lattice points")
    }

    /// Marks (and checks, to 1e-12) that every coefficient has modulus one.
    pub fn assert_unit_modulus(mut self) -> Result<Self, MomentError> {
        for (m, a) in &self.terms {
            if (a.norm() - 1.0).abs() > 1e-12 {
                return Err(MomentError::SupportOutsidePolygon(*m));
            }
        }
        self.unit_modulus = true;
        Ok(self)
    }

    pub fn unit_modulus(&self) -> bool {
        self.unit_modulus
    }

    /// Terms sorted by lattice point.
    pub fn terms(&self) -> &[(LatticePoint, Complex64)] {
        &self.terms
    }

    pub fn coefficient(&self, m: LatticePoint) -> Option<Complex64> {
        self.terms
            .binary_search_by_key(&m, |(p, _)| *p)
            .ok()
            .map(|i| self.terms[i].1)
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.terms.iter().map(|(m, _)| *m).collect()
    }
}

/// A point of the algebraic torus in logarithmic coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub logr: (f64, f64),
    pub theta: (f64, f64),
}

impl TorusPoint {
    pub fn new(logr: (f64, f64), theta: (f64, f64)) -> Result<Self, MomentError> {
        if !(logr.0.is_finite() && logr.1.is_finite() && theta.0.is_finite() && theta.1.is_finite())
        {
            return Err(MomentError::NonFiniteInput);
        }
        Ok(Self { logr, theta })
    }

    /// From complex torus coordinates; both must be nonzero.
    pub fn from_complex(x1: Complex64, x2: Complex64) -> Result<Self, MomentError> {
        Self::new((x1.norm().ln(), x2.norm().ln()), (x1.arg(), x2.arg()))
    }

    pub fn x1(&self) -> Complex64 {
        Complex64::from_polar(self.logr.0.exp(), self.theta.0)
    }

    pub fn x2(&self) -> Complex64 {
        Complex64::from_polar(self.logr.1.exp(), self.theta.1)
    }
}

/// Weight data for the δ-deformed moment map. `delta = 1` leaves every
/// section untouched (the classical map); localization checks require
/// `delta < 1`.
#[derive(Debug, Clone)]
pub struct MomentParams {
    delta: f64,
    w: WeightFunction,
    a_exponent: f64,
}

impl MomentParams {
    pub fn new(delta: f64, w: WeightFunction, a_exponent: f64) -> Result<Self, MomentError> {
        if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
            return Err(MomentError::DeltaOutOfRange(delta));
        }
        if !(a_exponent > 0.0) || !a_exponent.is_finite() {
            return Err(MomentError::BadExponent(a_exponent));
        }
        Ok(Self {
            delta,
            w,
            a_exponent,
        })
    }

    /// Uses the computable default threshold exponent `a = g_w / 2`.
    pub fn with_default_exponent(delta: f64, w: WeightFunction) -> Result<Self, MomentError> {
        let a = default_a_exponent(&w)?;
        Self::new(delta, w, a)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.w
    }

    pub fn a_exponent(&self) -> f64 {
        self.a_exponent
    }

    /// The ρ threshold δ^a of the active-set test.
    pub fn threshold(&self) -> f64 {
        self.delta.powf(self.a_exponent)
    }

    pub(crate) fn check_section(&self, s: &LaurentSection) -> Result<(), MomentError> {
        for (m, _) in s.terms() {
            if self.w.value(*m).is_none() {
                return Err(MomentError::SupportOutsidePolygon(*m));
            }
        }
        Ok(())
    }
}

/// The smallest positive gap `w_m - ℓ_S(m)` over all cells S of Z_w: how far
/// off-cell weights sit above each cell's supporting plane. Governs how fast
/// off-cell densities decay in δ.
pub fn min_positive_gap(z: &Subdivision, w: &WeightFunction) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for cell in z.cells() {
        let ell = interpolant(cell.vertices(), w);
        for (m, wm) in w.points().iter().zip(w.values()) {
            let diff = wm - ell.eval(*m);
            if diff.is_positive() && best.as_ref().map_or(true, |b| &diff < b) {
                best = Some(diff);
            }
        }
    }
    best
}

/// Default localization exponent `a = g_w / 2`, with `g_w` the minimum
/// positive cell gap of the weight.
pub fn default_a_exponent(w: &WeightFunction) -> Result<f64, MomentError> {
    let z = subdivide(w.polygon(), w).map_err(|_| MomentError::NoPositiveGap)?;
    let gap = min_positive_gap(&z, w).ok_or(MomentError::NoPositiveGap)?;
    Ok(rat_to_f64(&gap) / 2.0)
}

/// The localization error bound `K = diameter(Δ) · #(Δ ∩ M)`: whenever the
/// density mass off a set S is below ε, the localized and full moment maps
/// differ by at most K·ε.
pub fn localization_bound(polygon: &LatticePolygon) -> f64 {
    polygon.diameter() * polygon.enumerate_points().len() as f64
}

/// Log-magnitudes `L_m = w_m ln δ + <m, log r> + ln|a_m|` for each term.
fn log_magnitudes(s: &LaurentSection, p: &MomentParams, x: &TorusPoint) -> Vec<f64> {
    let ln_delta = p.delta.ln();
    s.terms()
        .iter()
        .map(|(m, a)| {
            let w = rat_to_f64(p.w.value(*m).expect("support checked"));
            w * ln_delta + m.x as f64 * x.logr.0 + m.y as f64 * x.logr.1 + a.norm().ln()
        })
        .collect()
}

/// Section value as `(log_scale, unit_sum)` with the true value
/// `exp(log_scale) · unit_sum`; `unit_sum` has magnitude in [0, #terms].
/// Splitting keeps extreme δ-weights representable.
pub fn eval_section_scaled(
    s: &LaurentSection,
    p: &MomentParams,
    x: &TorusPoint,
) -> Result<(f64, Complex64), MomentError> {
    p.check_section(s)?;
    let mags = log_magnitudes(s, p, x);
    let max = mags.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = Complex64::new(0.0, 0.0);
    for ((m, a), l) in s.terms().iter().zip(&mags) {
        let phase = m.x as f64 * x.theta.0 + m.y as f64 * x.theta.1 + a.arg();
        sum += Complex64::from_polar((l - max).exp(), phase);
    }
    Ok((max, sum))
}

/// Section value as a plain complex number; may overflow to infinity for
/// extreme radii, where the scaled form stays finite.
pub fn eval_section(
    s: &LaurentSection,
    p: &MomentParams,
    x: &TorusPoint,
) -> Result<Complex64, MomentError> {
    let (scale, sum) = eval_section_scaled(s, p, x)?;
    Ok(sum * scale.exp())
}

/// Densities ρ_m over the section's support; nonnegative, summing to one.
/// Radii only: the phases cancel in |·|².
pub fn rho(
    s: &LaurentSection,
    p: &MomentParams,
    x: &TorusPoint,
) -> Result<Vec<(LatticePoint, f64)>, MomentError> {
    p.check_section(s)?;
    let mags = log_magnitudes(s, p, x);
    let max = mags.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = mags.iter().map(|l| (2.0 * (l - max)).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(s.terms()
        .iter()
        .zip(weights)
        .map(|((m, _), wt)| (*m, wt / total))
        .collect())
}

/// The moment map `F(x) = Σ ρ_m(x) · m`, a convex combination of the
/// section's support points.
pub fn moment(
    s: &LaurentSection,
    p: &MomentParams,
    x: &TorusPoint,
) -> Result<(f64, f64), MomentError> {
    let densities = rho(s, p, x)?;
    Ok(combine(&densities))
}

/// The moment map of the section restricted to `subset`; a convex
/// combination of `subset`. Errors if the section vanishes there.
pub fn localized_moment(
    s: &LaurentSection,
    p: &MomentParams,
    subset: &[LatticePoint],
    x: &TorusPoint,
) -> Result<(f64, f64), MomentError> {
    let terms: Vec<(LatticePoint, Complex64)> = s
        .terms()
        .iter()
        .filter(|(m, _)| subset.contains(m))
        .cloned()
        .collect();
    let restricted = LaurentSection::new(terms)?;
    let densities = rho(&restricted, p, x)?;
    Ok(combine(&densities))
}

fn combine(densities: &[(LatticePoint, f64)]) -> (f64, f64) {
    let mut fx = 0.0;
    let mut fy = 0.0;
    for (m, r) in densities {
        fx += r * m.x as f64;
        fy += r * m.y as f64;
    }
    (fx, fy)
}

/// The active set `S_x = {m : ρ_m(x) > δ^a}`, checked to be a face of some
/// cell of `z` (which must be the subdivision of the params' weight).
pub fn active_simplex(
    s: &LaurentSection,
    p: &MomentParams,
    z: &Subdivision,
    x: &TorusPoint,
) -> Result<Vec<LatticePoint>, MomentError> {
    if p.delta >= 1.0 {
        return Err(MomentError::DeltaNotLocalizing(p.delta));
    }
    let densities = rho(s, p, x)?;
    let threshold = p.threshold();
    let active: Vec<LatticePoint> = densities
        .iter()
        .filter(|(_, r)| *r > threshold)
        .map(|(m, _)| *m)
        .collect();
    let is_face = !active.is_empty()
        && z.cells()
            .iter()
            .any(|c| active.iter().all(|m| c.vertices().contains(m)));
    if is_face {
        Ok(active)
    } else {
        Err(MomentError::ActiveSetNotAFace {
            x: *x,
            active,
            rho: densities,
        })
    }
}
