//! Position-dependent coefficient cutoffs of a section.
//!
//! Two modifications of a section `s = Σ δ^{w_m} a_m x^m` turn it into a
//! field of sections whose coefficients vary with the evaluation point. The
//! hat cutoff multiplies each monomial by γ(ρ_m(x)), keeping a term only
//! where its own density is visible. The check cutoff multiplies by
//! 1 − γ̌(max of foreign densities), keeping a term wherever nothing outside
//! its subdivision neighborhood dominates. In a zone where every density of
//! one cell saturates γ and the rest vanish, both fields equal the localized
//! section of that cell exactly, so the modified curve is toric there.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::LatticePoint;
use crate::local_models::{CutoffProfile, LocalModelError};
use crate::moment::{self, LaurentSection, MomentError, MomentParams, TorusPoint};
use crate::subdivision::Subdivision;

#[derive(Debug, Error, Clone)]
pub enum CutoffError {
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Profile(#[from] LocalModelError),
    #[error("check width {0} must lie in [delta^a, eps] = [{1}, {2}]")]
    CheckWidthOutOfRange(f64, f64, f64),
    #[error("subdivision polygon does not match the weight polygon")]
    SubdivisionMismatch,
    #[error("operation needs the three-point local line section")]
    LocalLineOnly,
}

/// Neighborhood sets Δ_m of the subdivision: Δ_m holds every m' such that
/// the segment {m, m'} is a cell of Z, including m itself when {m} is a
/// vertex of Z. A lattice point unused by the subdivision gets an empty set,
/// so even its own density counts as foreign in the check cutoff.
pub fn delta_m_neighbors(z: &Subdivision) -> BTreeMap<LatticePoint, Vec<LatticePoint>> {
    let mut sets: BTreeMap<LatticePoint, BTreeSet<LatticePoint>> = BTreeMap::new();
    for cell in z.cells() {
        for v in cell.vertices() {
            sets.entry(*v).or_default().insert(*v);
        }
    }
    for (a, b) in z.edge_incidence().keys() {
        sets.entry(*a).or_default().insert(*b);
        sets.entry(*b).or_default().insert(*a);
    }
    sets.into_iter()
        .map(|(m, set)| (m, set.into_iter().collect()))
        .collect()
}

#[derive(Debug, Clone)]
pub struct CutoffSection {
    section: LaurentSection,
    params: MomentParams,
    profile: CutoffProfile,
    check_profile: CutoffProfile,
    delta_m: BTreeMap<LatticePoint, Vec<LatticePoint>>,
}

/// Builds the cutoff field over the subdivision `z` of `p`'s weight, with
/// saturation radii 1.5·eps and 2.5·eps and check width ε̌ = eps. The active
/// threshold must localize below the cutoff: δ^a ≤ eps.
pub fn cutoff_section(
    s: &LaurentSection,
    p: &MomentParams,
    z: &Subdivision,
    eps: f64,
) -> Result<CutoffSection, CutoffError> {
    p.check_section(s)?;
    if z.polygon() != p.weight().polygon() {
        return Err(CutoffError::SubdivisionMismatch);
    }
    let profile = CutoffProfile::cutoff(eps, 1.5, 2.5)?;
    let cs = CutoffSection {
        section: s.clone(),
        params: p.clone(),
        profile,
        check_profile: profile,
        delta_m: delta_m_neighbors(z),
    };
    cs.with_check_width(eps)
}

impl CutoffSection {
    /// Replaces the check width ε̌; it must satisfy δ^a ≤ ε̌ ≤ eps.
    pub fn with_check_width(mut self, eps_check: f64) -> Result<Self, CutoffError> {
        let lo = self.params.threshold();
        let hi = self.profile.eps;
        if !(eps_check >= lo && eps_check <= hi) {
            return Err(CutoffError::CheckWidthOutOfRange(eps_check, lo, hi));
        }
        self.check_profile = CutoffProfile::cutoff(eps_check, self.profile.a1, self.profile.a2)?;
        Ok(self)
    }

    pub fn section(&self) -> &LaurentSection {
        &self.section
    }

    pub fn params(&self) -> &MomentParams {
        &self.params
    }

    pub fn profile(&self) -> &CutoffProfile {
        &self.profile
    }

    /// The neighborhood Δ_m; empty for points unused by the subdivision.
    pub fn delta_m(&self, m: LatticePoint) -> &[LatticePoint] {
        self.delta_m.get(&m).map_or(&[], |v| v.as_slice())
    }

    /// Hat weights γ(ρ_m(x)) per support point. The γ argument is the
    /// density itself, so saturation happens at ρ_m = (2.5·eps)².
    pub fn hat_weights(&self, x: &TorusPoint) -> Result<Vec<(LatticePoint, f64)>, CutoffError> {
        let rho = moment::rho(&self.section, &self.params, x)?;
        Ok(rho
            .into_iter()
            .map(|(m, r)| (m, self.profile.gamma(r)))
            .collect())
    }

    /// Check weights 1 − γ̌(max_{m' ∉ Δ_m} ρ_{m'}(x)) per support point.
    pub fn check_weights(&self, x: &TorusPoint) -> Result<Vec<(LatticePoint, f64)>, CutoffError> {
        let rho = moment::rho(&self.section, &self.params, x)?;
        Ok(self
            .section
            .terms()
            .iter()
            .map(|(m, _)| {
                let own = self.delta_m(*m);
                let foreign = rho
                    .iter()
                    .filter(|(m2, _)| own.binary_search(m2).is_err())
                    .map(|&(_, r)| r)
                    .fold(0.0f64, f64::max);
                (*m, 1.0 - self.check_profile.gamma(foreign))
            })
            .collect())
    }

    /// The hat field frozen at `x`: the section with coefficients
    /// a_m·γ(ρ_m(x)). Errors if every weight vanishes.
    pub fn hat_section_at(&self, x: &TorusPoint) -> Result<LaurentSection, CutoffError> {
        let weights = self.hat_weights(x)?;
        Ok(reweight(&self.section, &weights)?)
    }

    /// The check field frozen at `x`.
    pub fn check_section_at(&self, x: &TorusPoint) -> Result<LaurentSection, CutoffError> {
        let weights = self.check_weights(x)?;
        Ok(reweight(&self.section, &weights)?)
    }

    /// Scaled value of the hat field at its own base point, as
    /// (log scale, unit-scale sum).
    pub fn eval_hat_scaled(&self, x: &TorusPoint) -> Result<(f64, Complex64), CutoffError> {
        let frozen = self.hat_section_at(x)?;
        Ok(moment::eval_section_scaled(&frozen, &self.params, x)?)
    }

    pub fn eval_check_scaled(&self, x: &TorusPoint) -> Result<(f64, Complex64), CutoffError> {
        let frozen = self.check_section_at(x)?;
        Ok(moment::eval_section_scaled(&frozen, &self.params, x)?)
    }

    /// Solutions x₁ of the hat field's curve on the slice of fixed x₂, for
    /// the three-point local line section only. The x₁ coefficient grows
    /// radially, so roots are bracketed by a scan over log-spaced radii. A
    /// slice whose remainder terms die inside the dead zone of the x₁
    /// coefficient contributes one marker point of the toric disc.
    pub fn line_slice_roots(
        &self,
        x2: Complex64,
        rho_max: f64,
    ) -> Result<Vec<Complex64>, CutoffError> {
        let pts = self.section.support();
        if pts
            != [
                LatticePoint::new(0, 0),
                LatticePoint::new(0, 1),
                LatticePoint::new(1, 0),
            ]
        {
            return Err(CutoffError::LocalLineOnly);
        }
        let theta2 = x2.arg();
        let r2 = x2.norm();
        let coeffs = |rho: f64| -> Result<(Complex64, Complex64), CutoffError> {
            let x = TorusPoint::new((rho.ln(), r2.max(1e-300).ln()), (0.0, theta2))?;
            let frozen = self.hat_section_at(&x);
            match frozen {
                Ok(f) => {
                    let c1 = f.coefficient(LatticePoint::new(1, 0)).unwrap_or_default();
                    let c2 = f.coefficient(LatticePoint::new(0, 1)).unwrap_or_default();
                    let c0 = f.coefficient(LatticePoint::new(0, 0)).unwrap_or_default();
                    let d = self.params.delta();
                    let w = self.params.weight();
                    let pw = |m: LatticePoint| {
                        d.powf(w.value(m).map(crate::rat::rat_to_f64).unwrap_or(0.0))
                    };
                    Ok((
                        c1 * pw(LatticePoint::new(1, 0)),
                        c2 * pw(LatticePoint::new(0, 1)) * x2 + c0 * pw(LatticePoint::new(0, 0)),
                    ))
                }
                Err(CutoffError::Moment(MomentError::EmptySection)) => {
                    Ok((Complex64::default(), Complex64::default()))
                }
                Err(e) => Err(e),
            }
        };
        let f = |rho: f64| -> Result<f64, CutoffError> {
            let (c1, rest) = coeffs(rho)?;
            Ok(c1.norm() * rho - rest.norm())
        };
        let n = 800;
        let lo_log = (1e-6f64).ln();
        let hi_log = rho_max.max(1e-5).ln();
        let grid: Vec<f64> = (0..=n)
            .map(|i| (lo_log + (hi_log - lo_log) * i as f64 / n as f64).exp())
            .collect();
        let mut roots: Vec<Complex64> = Vec::new();
        let mut push_root = |rho: f64| -> Result<(), CutoffError> {
            let (c1, rest) = coeffs(rho)?;
            let x1 = if rest.norm() > 1e-14 && c1.norm() > 1e-14 {
                let dir = -(rest / c1);
                rho * dir / dir.norm()
            } else {
                Complex64::new(rho, 0.0)
            };
            if roots.iter().all(|r| (r - x1).norm() > 1e-9 * (1.0 + rho)) {
                roots.push(x1);
            }
            Ok(())
        };
        let f0 = f(grid[0])?;
        if f0.abs() < 1e-14 {
            push_root(grid[0])?;
        }
        let mut fa = f0;
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fb = f(b)?;
            if fa == 0.0 {
                push_root(a)?;
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi) = (a, b);
                let mut flo = fa;
                for _ in 0..90 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid)?;
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                push_root(0.5 * (lo + hi))?;
            }
            fa = fb;
        }
        Ok(roots)
    }
}

fn reweight(
    s: &LaurentSection,
    weights: &[(LatticePoint, f64)],
) -> Result<LaurentSection, MomentError> {
    let table: BTreeMap<LatticePoint, f64> = weights.iter().cloned().collect();
    LaurentSection::new(
        s.terms()
            .iter()
            .map(|(m, a)| (*m, a * table.get(m).copied().unwrap_or(0.0)))
            .collect(),
    )
}
