//! All roots of dense univariate complex polynomials.
//!
//! Simultaneous Aberth–Ehrlich iteration: every root refined against all
//! others at once, so clusters repel and no deflation error accumulates.
//! Slice polynomials here stay at degree ≤ ~30, where this converges in a
//! handful of sweeps. Convergence is judged by relative backward error,
//! which stays reachable at multiple roots where forward accuracy degrades.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("no convergence after {restarts} restarts; worst relative residual {residual:e}")]
    NoConvergence { restarts: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct RootFindConfig {
    pub max_iters: usize,
    pub residual_tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            residual_tol: 1e-12,
            restarts: 6,
            seed: 0,
        }
    }
}

/// Exact zero test; `norm_sqr` underflows for magnitudes below ~1e-154.
fn is_zero(v: Complex64) -> bool {
    v.re == 0.0 && v.im == 0.0
}

/// Complex division with the denominator prescaled to unit size, so
/// quotients of two tiny values (e.g. p/p' near a root of modulus 1e-120)
/// survive instead of underflowing in `a·conj(b)`.
fn robust_div(a: Complex64, b: Complex64) -> Complex64 {
    let eb = b.re.abs().max(b.im.abs());
    if eb == 0.0 {
        return Complex64::new(f64::INFINITY, f64::INFINITY);
    }
    let s = 1.0 / eb;
    if !s.is_finite() {
        return a * eb.recip(); // eb infinite: quotient is 0 or NaN, both handled upstream
    }
    (a * s) / (b * s)
}

/// Value and derivative by Horner's rule; `coeffs` low-to-high degree.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// The backward-error scale Σ |c_i| |z|^i.
fn residual_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut scale = 0.0;
    let mut pow = 1.0;
    for c in coeffs {
        scale += c.norm() * pow;
        pow *= r;
    }
    scale.max(f64::MIN_POSITIVE)
}

/// All complex roots of `Σ coeffs[i] z^i`, multiplicity as repetition.
/// Exact leading zeros are trimmed; exact trailing zeros contribute roots at
/// the origin. Every returned root has relative backward error below
/// `cfg.residual_tol`.
pub fn all_roots(coeffs: &[Complex64], cfg: &RootFindConfig) -> Result<Vec<Complex64>, RootError> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map_or(false, |v| is_zero(*v)) {
        c.pop();
    }
    if c.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    // Normalize magnitudes once so δ-weighted slice coefficients cannot
    // overflow the iteration.
    let max_mag = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for v in &mut c {
        *v /= max_mag;
    }
    let mut zero_roots = 0;
    while c.first().map_or(false, |v| is_zero(*v)) {
        c.remove(0);
        zero_roots += 1;
    }
    let n = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-c[0] / c[1]);
        return Ok(roots);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base_radii = tropical_radii(&c);
    let mut worst_final = f64::INFINITY;

    for restart in 0..=cfg.restarts {
        let mut z: Vec<Complex64> = base_radii
            .iter()
            .enumerate()
            .map(|(k, &radius)| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.41
                    + if restart == 0 { 0.0 } else { rng.gen_range(-0.9..0.9) };
                let r = radius * if restart == 0 { 1.0 } else { rng.gen_range(0.5..2.0) };
                Complex64::from_polar(r, angle)
            })
            .collect();

        for _ in 0..cfg.max_iters {
            let mut moved = 0.0f64;
            for k in 0..n {
                let (p, dp) = horner(&c, z[k]);
                if p.norm() <= cfg.residual_tol * residual_scale(&c, z[k]) {
                    continue;
                }
                let mut newton = robust_div(p, dp);
                if !newton.is_finite() {
                    // Flat spot or underflowed derivative: nudge off it.
                    newton = Complex64::new(1e-8 * (1.0 + z[k].norm()), 0.0);
                }
                let mut rep = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != k {
                        let d = z[k] - z[j];
                        if !is_zero(d) {
                            rep += robust_div(Complex64::new(1.0, 0.0), d);
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * rep;
                let step = if denom.is_finite() && denom.norm_sqr() > 1e-12 {
                    newton / denom
                } else {
                    newton
                };
                let next = z[k] - step;
                if next.is_finite() {
                    z[k] = next;
                    moved = moved.max(step.norm() / (base_radii[k] + z[k].norm()));
                } else {
                    // Diverged iterate: restart it on a jittered base circle.
                    z[k] = Complex64::from_polar(
                        base_radii[k] * rng.gen_range(0.5..2.0),
                        rng.gen_range(0.0..6.28),
                    );
                    moved = 1.0;
                }
            }
            if moved < 1e-16 {
                break;
            }
        }

        let worst = z.iter().fold(0.0f64, |acc, &zk| {
            let ratio = horner(&c, zk).0.norm() / residual_scale(&c, zk);
            if ratio.is_finite() {
                acc.max(ratio)
            } else {
                f64::INFINITY
            }
        });
        if worst <= cfg.residual_tol {
            roots.extend(z);
            return Ok(roots);
        }
        worst_final = worst_final.min(worst);
    }
    Err(RootError::NoConvergence {
        restarts: cfg.restarts,
        residual: worst_final,
    })
}

/// Initial moduli from the Newton polygon of the coefficients: for each
/// segment of the upper hull of `(i, ln|c_i|)` joining exponents i < j, the
/// polynomial has j−i roots of modulus near `(|c_i|/|c_j|)^{1/(j−i)}`. Puts
/// starting points within a bounded factor of every root even when the
/// coefficients span hundreds of orders of magnitude.
fn tropical_radii(c: &[Complex64]) -> Vec<f64> {
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| !is_zero(**v))
        .map(|(i, v)| (i, v.norm().ln()))
        .collect();
    // Upper convex hull, left to right.
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(i, u) in &pts {
        while hull.len() >= 2 {
            let (i1, u1) = hull[hull.len() - 2];
            let (i2, u2) = hull[hull.len() - 1];
            let turn = (i2 - i1) as f64 * (u - u1) - (i - i1) as f64 * (u2 - u1);
            if turn >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((i, u));
    }
    let mut radii = Vec::with_capacity(c.len() - 1);
    for seg in hull.windows(2) {
        let (i, ui) = seg[0];
        let (j, uj) = seg[1];
        let r = ((ui - uj) / (j - i) as f64).exp();
        let r = if r.is_finite() && r > 0.0 { r } else { 1.0 };
        for _ in i..j {
            radii.push(r);
        }
    }
    radii
}

/// Expands `Π (z - r_i)` into low-to-high coefficients.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        c.push(zero);
        for i in (0..c.len()).rev() {
            let prev = if i > 0 { c[i - 1] } else { zero };
            c[i] = prev - r * c[i];
        }
    }
    c
}
