//! Fiber topology over points of the moment polygon.
//!
//! Two fibrations are supported. The literal torus fibration fixes the
//! radii produced by inverting the moment map and takes the zero set of the
//! section on the angle 2-torus; that zero set is generically a finite set
//! of points, located by winding numbers. The piecewise-max line model is
//! the time-1 radial contraction of the line curve x₁ + x₂ + 1 = 0: its
//! fibers over spine points are genuinely one-dimensional, reconstructed
//! here as curves on the angle torus by masked marching squares over the
//! explicit radii rays that contract onto the spine point.

use crate::moment::{eval_section_scaled, moment, LaurentSection, MomentParams, TorusPoint};
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum FiberError {
    #[error("no torus radii map near ({0}, {1})")]
    InversionFailure(f64, f64),
    #[error("target ({0}, {1}) is not on the line-model spine")]
    TargetOffSpine(f64, f64),
    #[error("line-model fibers need the unit line section at δ = 1 with zero weight")]
    ModelMismatch,
    #[error("angle grid must have at least 16 cells per axis")]
    GridTooCoarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    Points,
    Circles,
    ThetaGraph,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberReport {
    pub components: usize,
    pub betti1: usize,
    pub kind: FiberKind,
}

/// Which fibration the fiber is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberModel {
    /// Zero set of the section on the fixed-radii torus over `r`.
    LiteralTorus,
    /// Time-1 piecewise-max contraction of the line curve; `r` must lie on
    /// the Y-shaped spine of the line.
    PiecewiseMaxLine,
}

pub fn fiber_topology(
    s: &LaurentSection,
    p: &MomentParams,
    r: (f64, f64),
    angle_grid: usize,
    model: FiberModel,
) -> Result<FiberReport, FiberError> {
    if angle_grid < 16 {
        return Err(FiberError::GridTooCoarse);
    }
    match model {
        FiberModel::LiteralTorus => literal_torus_fiber(s, p, r, angle_grid),
        FiberModel::PiecewiseMaxLine => {
            check_line_model(s, p)?;
            line_model_fiber(r, angle_grid)
        }
    }
}

fn check_line_model(s: &LaurentSection, p: &MomentParams) -> Result<(), FiberError> {
    let mut support: Vec<(i64, i64)> = s.terms().iter().map(|(m, _)| (m.x, m.y)).collect();
    support.sort();
    let ok = support == [(0, 0), (0, 1), (1, 0)]
        && s.terms()
            .iter()
            .all(|(_, a)| (a - Complex64::new(1.0, 0.0)).norm() < 1e-12)
        && p.delta() == 1.0;
    if ok {
        Ok(())
    } else {
        Err(FiberError::ModelMismatch)
    }
}

/// Solves `moment(logr) = target` over log-radii by damped Newton with
/// multistart. The moment map is the gradient of a strictly convex
/// potential, so its Jacobian (twice the ρ-covariance of the support) is
/// positive definite and the solution, when it exists, is unique.
pub fn invert_moment(
    s: &LaurentSection,
    p: &MomentParams,
    target: (f64, f64),
) -> Result<(f64, f64), FiberError> {
    let fail = FiberError::InversionFailure(target.0, target.1);
    let mut starts = vec![(0.0, 0.0)];
    for i in -2..=2 {
        for j in -2..=2 {
            starts.push((5.0 * i as f64, 5.0 * j as f64));
        }
    }
    let tol = 1e-11;
    for start in starts {
        let mut lr = start;
        let mut converged = false;
        for _ in 0..120 {
            let x = TorusPoint::new(lr, (0.0, 0.0)).expect("finite");
            let f = moment(s, p, &x).map_err(|_| fail.clone())?;
            let res = (f.0 - target.0, f.1 - target.1);
            let err = (res.0 * res.0 + res.1 * res.1).sqrt();
            if err <= tol {
                converged = true;
                break;
            }
            let (j11, j12, j22) = moment_jacobian(s, p, &x, f);
            let det = j11 * j22 - j12 * j12;
            if det.abs() < 1e-300 {
                break;
            }
            let step = (
                -(j22 * res.0 - j12 * res.1) / det,
                -(-j12 * res.0 + j11 * res.1) / det,
            );
            // Backtracking on the residual norm.
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let cand = (lr.0 + lambda * step.0, lr.1 + lambda * step.1);
                if cand.0.is_finite() && cand.1.is_finite() && cand.0.abs() < 1e4 && cand.1.abs() < 1e4 {
                    let xc = TorusPoint::new(cand, (0.0, 0.0)).expect("finite");
                    let fc = moment(s, p, &xc).map_err(|_| fail.clone())?;
                    let ec = ((fc.0 - target.0).powi(2) + (fc.1 - target.1).powi(2)).sqrt();
                    if ec < err {
                        lr = cand;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if converged {
            return Ok(lr);
        }
    }
    Err(fail)
}

/// Jacobian of the moment map in log-radii: 2 × (Σ ρ m mᵀ − F Fᵀ),
/// returned as (J₁₁, J₁₂, J₂₂).
fn moment_jacobian(
    s: &LaurentSection,
    p: &MomentParams,
    x: &TorusPoint,
    f: (f64, f64),
) -> (f64, f64, f64) {
    let rho = crate::moment::rho(s, p, x).expect("support checked");
    let mut m11 = 0.0;
    let mut m12 = 0.0;
    let mut m22 = 0.0;
    for (m, r) in &rho {
        m11 += r * (m.x * m.x) as f64;
        m12 += r * (m.x * m.y) as f64;
        m22 += r * (m.y * m.y) as f64;
    }
    (
        2.0 * (m11 - f.0 * f.0),
        2.0 * (m12 - f.0 * f.1),
        2.0 * (m22 - f.1 * f.1),
    )
}

/// Fiber of the literal torus fibration: winding numbers of the section
/// around each angle-grid cell count its zeros on the torus.
fn literal_torus_fiber(
    s: &LaurentSection,
    p: &MomentParams,
    r: (f64, f64),
    n: usize,
) -> Result<FiberReport, FiberError> {
    let lr = invert_moment(s, p, r)?;
    let theta = |k: usize| (k as f64 + 0.37) * 2.0 * std::f64::consts::PI / n as f64;
    let mut vals = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            let x = TorusPoint::new(lr, (theta(i), theta(j))).expect("finite");
            let (_, unit) = eval_section_scaled(s, p, &x).expect("support checked");
            vals[j * n + i] = unit;
        }
    }
    let mut count = 0usize;
    for j in 0..n {
        for i in 0..n {
            let a = vals[j * n + i];
            let b = vals[j * n + (i + 1) % n];
            let c = vals[((j + 1) % n) * n + (i + 1) % n];
            let d = vals[((j + 1) % n) * n + i];
            let mut w = 0.0;
            for (u, v) in [(a, b), (b, c), (c, d), (d, a)] {
                let mut dphi = v.arg() - u.arg();
                while dphi > std::f64::consts::PI {
                    dphi -= 2.0 * std::f64::consts::PI;
                }
                while dphi <= -std::f64::consts::PI {
                    dphi += 2.0 * std::f64::consts::PI;
                }
                w += dphi;
            }
            count += (w / (2.0 * std::f64::consts::PI)).round().abs() as usize;
        }
    }
    Ok(FiberReport {
        components: count,
        betti1: 0,
        kind: FiberKind::Points,
    })
}

/// A segment of radii `r(τ) = u + τ v` whose time-1 contraction lands on
/// the target spine point. On the angle torus the curve equation
/// A(θ) + τ B(θ) = 0 with A = u₁x̂₁ + u₂x̂₂ + 1, B = v₁x̂₁ + v₂x̂₂ has a
/// real solution exactly where Im(A·conj B) = 0 with τ = -Re(A·conj B)/|B|².
struct RadiiRay {
    u: (f64, f64),
    v: (f64, f64),
    tau: (f64, f64),
}

/// Classification of a point on the line spine Y.
enum LinePosition {
    /// Branch with r₂ = 1, r₁ = R < 1 (toward moment point (0, 1/2)).
    LegX2 { r1: f64 },
    /// Branch with r₁ = 1, r₂ = R < 1 (toward (1/2, 0)).
    LegX1 { r2: f64 },
    /// Diagonal branch r₁ = r₂ = ρ > 1 (toward (1/2, 1/2)).
    Diagonal { rho: f64 },
    Vertex,
    End,
}

fn classify_line_target(r: (f64, f64)) -> Result<LinePosition, FiberError> {
    let (f1, f2) = r;
    let tol = 1e-6;
    let off = FiberError::TargetOffSpine(f1, f2);
    let end_tol = 0.02;
    if (f1 - f2).abs() <= tol {
        if (f1 - 1.0 / 3.0).abs() <= tol {
            return Ok(LinePosition::Vertex);
        }
        if f1 > 1.0 / 3.0 && f1 < 0.5 + tol {
            if f1 >= 0.5 - end_tol {
                return Ok(LinePosition::End);
            }
            let rho2 = f1 / (1.0 - 2.0 * f1);
            return Ok(LinePosition::Diagonal { rho: rho2.sqrt() });
        }
        return Err(off);
    }
    // Leg branches: F = (R², 1)/(2 + R²) up to swapping coordinates.
    let (lo, hi, swapped) = if f1 < f2 { (f1, f2, false) } else { (f2, f1, true) };
    if hi <= 0.0 || lo < -tol {
        return Err(off);
    }
    let r_sq = lo / hi;
    if (hi * (2.0 + r_sq) - 1.0).abs() > 100.0 * tol {
        return Err(off);
    }
    let rr = r_sq.sqrt();
    if rr <= end_tol {
        return Ok(LinePosition::End);
    }
    if swapped {
        Ok(LinePosition::LegX1 { r2: rr })
    } else {
        Ok(LinePosition::LegX2 { r1: rr })
    }
}

fn line_model_fiber(r: (f64, f64), n: usize) -> Result<FiberReport, FiberError> {
    let rays = match classify_line_target(r)? {
        LinePosition::End => {
            // The fiber collapses onto the toric boundary: one point.
            return Ok(FiberReport {
                components: 1,
                betti1: 0,
                kind: FiberKind::Points,
            });
        }
        LinePosition::LegX2 { r1 } => vec![
            // Radii (r1·τ, τ) for τ ≤ 1 and (r1, τ) for τ ≥ 1 both contract
            // to (r1, 1).
            RadiiRay {
                u: (0.0, 0.0),
                v: (r1, 1.0),
                tau: (1e-6, 1.0),
            },
            RadiiRay {
                u: (r1, 0.0),
                v: (0.0, 1.0),
                tau: (1.0, 1.0 + r1),
            },
        ],
        LinePosition::LegX1 { r2 } => vec![
            RadiiRay {
                u: (0.0, 0.0),
                v: (1.0, r2),
                tau: (1e-6, 1.0),
            },
            RadiiRay {
                u: (0.0, r2),
                v: (1.0, 0.0),
                tau: (1.0, 1.0 + r2),
            },
        ],
        LinePosition::Vertex => vec![
            RadiiRay {
                u: (0.0, 0.0),
                v: (1.0, 1.0),
                tau: (1e-6, 1.0),
            },
            RadiiRay {
                u: (1.0, 0.0),
                v: (0.0, 1.0),
                tau: (1.0, 2.0),
            },
            RadiiRay {
                u: (0.0, 1.0),
                v: (1.0, 0.0),
                tau: (1.0, 2.0),
            },
        ],
        LinePosition::Diagonal { rho } => vec![
            RadiiRay {
                u: (rho, 0.0),
                v: (0.0, 1.0),
                tau: (rho, 1.0 + rho),
            },
            RadiiRay {
                u: (0.0, rho),
                v: (1.0, 0.0),
                tau: (rho, 1.0 + rho),
            },
        ],
    };
    Ok(curve_graph_report(&rays, n))
}

/// Marching squares over each ray's masked level set, glued on shared grid
/// edges and at nearby endpoints, then counted as a topological graph.
fn curve_graph_report(rays: &[RadiiRay], n: usize) -> FiberReport {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let theta = |k: usize| (k as f64 + 0.37) * h;

    // Vertex per crossed grid edge, shared across rays.
    let mut vertex_of_edge: HashMap<(u8, usize, usize), usize> = HashMap::new();
    let mut positions: Vec<(f64, f64)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for ray in rays {
        // Exact τ range: folds where τ* grazes a range endpoint stay inside
        // the mask, and junctions between rays are healed by the endpoint
        // merge below. Positive slack would double-draw curves near
        // junctions and manufacture spurious loops.
        let slack = 0.0;
        let mut g = vec![0.0f64; n * n];
        let mut mask = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                let x1 = Complex64::from_polar(1.0, theta(i));
                let x2 = Complex64::from_polar(1.0, theta(j));
                let a = ray.u.0 * x1 + ray.u.1 * x2 + Complex64::new(1.0, 0.0);
                let b = ray.v.0 * x1 + ray.v.1 * x2;
                let cross = a * b.conj();
                let b2 = b.norm_sqr();
                g[j * n + i] = cross.im;
                if b2 > 1e-12 {
                    let tau = -cross.re / b2;
                    mask[j * n + i] =
                        tau >= ray.tau.0 - slack && tau <= ray.tau.1 + slack;
                }
            }
        }
        for j in 0..n {
            for i in 0..n {
                let corners = [
                    (i, j),
                    ((i + 1) % n, j),
                    ((i + 1) % n, (j + 1) % n),
                    (i, (j + 1) % n),
                ];
                if corners.iter().any(|&(a, b)| !mask[b * n + a]) {
                    continue;
                }
                let vals: Vec<f64> = corners.iter().map(|&(a, b)| g[b * n + a]).collect();
                // Cell edges in order bottom, right, top, left.
                let cell_edges = [
                    (0usize, 1usize, (0u8, i, j)),
                    (1, 2, (1, (i + 1) % n, j)),
                    (3, 2, (0, i, (j + 1) % n)),
                    (0, 3, (1, i, j)),
                ];
                let mut crossings = Vec::new();
                for &(c0, c1, key) in &cell_edges {
                    if vals[c0] == 0.0 && vals[c1] == 0.0 {
                        continue;
                    }
                    if vals[c0] * vals[c1] < 0.0 || vals[c0] == 0.0 {
                        let t = vals[c0] / (vals[c0] - vals[c1]);
                        let p0 = corner_pos(corners[c0], theta);
                        let p1 = corner_pos(corners[c1], theta);
                        let pos = (
                            p0.0 + t * torus_delta(p1.0 - p0.0),
                            p0.1 + t * torus_delta(p1.1 - p0.1),
                        );
                        let id = *vertex_of_edge.entry(key).or_insert_with(|| {
                            positions.push(pos);
                            positions.len() - 1
                        });
                        crossings.push(id);
                    }
                }
                match crossings.len() {
                    2 => edges.push((crossings[0], crossings[1])),
                    4 => {
                        // Saddle: pair by the sign of the cell average.
                        let avg: f64 = vals.iter().sum::<f64>() / 4.0;
                        if avg * vals[0] >= 0.0 {
                            edges.push((crossings[0], crossings[3]));
                            edges.push((crossings[1], crossings[2]));
                        } else {
                            edges.push((crossings[0], crossings[1]));
                            edges.push((crossings[2], crossings[3]));
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    // Dedupe repeated edges (the slack makes neighboring rays re-draw the
    // same crossing pair near a junction).
    edges.sort();
    edges.dedup();

    let nv = positions.len();
    let mut dsu: Vec<usize> = (0..nv).collect();
    fn find(dsu: &mut Vec<usize>, a: usize) -> usize {
        let mut a = a;
        while dsu[a] != a {
            dsu[a] = dsu[dsu[a]];
            a = dsu[a];
        }
        a
    }
    // Glue endpoints of distinct arcs that coincide up to grid resolution.
    let mut degree = vec![0usize; nv];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let endpoints: Vec<usize> = (0..nv).filter(|&v| degree[v] == 1).collect();
    for (qi, &a) in endpoints.iter().enumerate() {
        for &b in &endpoints[qi + 1..] {
            let d1 = torus_delta(positions[a].0 - positions[b].0).abs();
            let d2 = torus_delta(positions[a].1 - positions[b].1).abs();
            if (d1 * d1 + d2 * d2).sqrt() <= 3.0 * h {
                let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
                if ra != rb {
                    dsu[ra] = rb;
                }
            }
        }
    }

    // Count in the quotient graph, skipping isolated vertices.
    let mut class_edges = Vec::new();
    for &(a, b) in &edges {
        class_edges.push((find(&mut dsu, a), find(&mut dsu, b)));
    }
    let mut active: Vec<usize> = class_edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect();
    active.sort();
    active.dedup();
    let index: HashMap<usize, usize> = active.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let vtotal = active.len();
    let mut comp_dsu: Vec<usize> = (0..vtotal).collect();
    for &(a, b) in &class_edges {
        let (ra, rb) = (find(&mut comp_dsu, index[&a]), find(&mut comp_dsu, index[&b]));
        if ra != rb {
            comp_dsu[ra] = rb;
        }
    }
    let comp_ids: Vec<usize> = (0..vtotal).map(|v| find(&mut comp_dsu, v)).collect();
    let mut comps: Vec<usize> = comp_ids.clone();
    comps.sort();
    comps.dedup();
    let components = comps.len();
    let mut per_comp_v = HashMap::new();
    let mut per_comp_e = HashMap::new();
    for v in 0..vtotal {
        *per_comp_v.entry(comp_ids[v]).or_insert(0usize) += 1;
    }
    for &(a, b) in &class_edges {
        let c = find(&mut comp_dsu, index[&a]);
        let _ = b;
        *per_comp_e.entry(c).or_insert(0usize) += 1;
    }
    let mut betti1 = 0usize;
    let mut all_circles = components > 0;
    for &c in &comps {
        let v = per_comp_v.get(&c).copied().unwrap_or(0);
        let e = per_comp_e.get(&c).copied().unwrap_or(0);
        let b1 = (e + 1).saturating_sub(v);
        betti1 += b1;
        if b1 != 1 {
            all_circles = false;
        }
    }
    let kind = if vtotal == 0 {
        FiberKind::Points
    } else if all_circles {
        FiberKind::Circles
    } else if components == 1 && betti1 == 2 {
        FiberKind::ThetaGraph
    } else {
        FiberKind::Other
    };
    FiberReport {
        components,
        betti1,
        kind,
    }
}

fn corner_pos(c: (usize, usize), theta: impl Fn(usize) -> f64) -> (f64, f64) {
    (theta(c.0), theta(c.1))
}

/// Wraps an angle difference to (-π, π].
fn torus_delta(d: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut d = d % two_pi;
    if d > std::f64::consts::PI {
        d -= two_pi;
    }
    if d <= -std::f64::consts::PI {
        d += two_pi;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticePoint, LatticePolygon};
    use crate::subdivision::WeightFunction;

    fn line_section() -> (LaurentSection, MomentParams) {
        let t = LatticePolygon::standard_triangle(1);
        let p = MomentParams::new(1.0, WeightFunction::zero(&t), 0.5).unwrap();
        (LaurentSection::ones(&t), p)
    }

    fn leg_target(r1: f64) -> (f64, f64) {
        (r1 * r1 / (2.0 + r1 * r1), 1.0 / (2.0 + r1 * r1))
    }

    #[test]
    fn leg_fiber_is_a_circle() {
        let (s, p) = line_section();
        let rep =
            fiber_topology(&s, &p, leg_target(0.55), 200, FiberModel::PiecewiseMaxLine).unwrap();
        assert_eq!(rep.components, 1, "{rep:?}");
        assert_eq!(rep.betti1, 1, "{rep:?}");
        assert_eq!(rep.kind, FiberKind::Circles);
    }

    #[test]
    fn mirrored_leg_fiber_is_a_circle() {
        let (s, p) = line_section();
        let target = (1.0 / (2.0 + 0.49), 0.49 / (2.0 + 0.49));
        let rep = fiber_topology(&s, &p, target, 200, FiberModel::PiecewiseMaxLine).unwrap();
        assert_eq!((rep.components, rep.betti1), (1, 1), "{rep:?}");
        assert_eq!(rep.kind, FiberKind::Circles);
    }

    #[test]
    fn vertex_fiber_is_a_theta_graph() {
        let (s, p) = line_section();
        let rep = fiber_topology(
            &s,
            &p,
            (1.0 / 3.0, 1.0 / 3.0),
            200,
            FiberModel::PiecewiseMaxLine,
        )
        .unwrap();
        assert_eq!(rep.components, 1, "{rep:?}");
        assert_eq!(rep.betti1, 2, "{rep:?}");
        assert_eq!(rep.kind, FiberKind::ThetaGraph);
    }

    #[test]
    fn diagonal_fiber_is_a_circle() {
        let (s, p) = line_section();
        let rho: f64 = 1.25;
        let f = rho * rho / (1.0 + 2.0 * rho * rho);
        let rep = fiber_topology(&s, &p, (f, f), 200, FiberModel::PiecewiseMaxLine).unwrap();
        assert_eq!((rep.components, rep.betti1), (1, 1), "{rep:?}");
        assert_eq!(rep.kind, FiberKind::Circles);
    }

    #[test]
    fn boundary_end_fiber_is_a_point() {
        let (s, p) = line_section();
        let rep =
            fiber_topology(&s, &p, (0.5, 0.0), 200, FiberModel::PiecewiseMaxLine).unwrap();
        assert_eq!(rep.components, 1);
        assert_eq!(rep.betti1, 0);
        assert_eq!(rep.kind, FiberKind::Points);
    }

    #[test]
    fn off_spine_target_is_rejected() {
        let (s, p) = line_section();
        let out = fiber_topology(&s, &p, (0.1, 0.1), 200, FiberModel::PiecewiseMaxLine);
        assert!(matches!(out, Err(FiberError::TargetOffSpine(_, _))));
    }

    #[test]
    fn literal_fiber_of_line_interior_point() {
        let (s, p) = line_section();
        // Radii (0.55, 0.62) lie inside the line amoeba; its torus meets the
        // curve in two points.
        let x = TorusPoint::new((0.55f64.ln(), 0.62f64.ln()), (0.0, 0.0)).unwrap();
        let r = moment(&s, &p, &x).unwrap();
        let rep = fiber_topology(&s, &p, r, 200, FiberModel::LiteralTorus).unwrap();
        assert_eq!(rep.components, 2, "{rep:?}");
        assert_eq!(rep.kind, FiberKind::Points);
    }

    #[test]
    fn literal_fiber_outside_amoeba_is_empty() {
        let (s, p) = line_section();
        let x = TorusPoint::new((0.05f64.ln(), 0.05f64.ln()), (0.0, 0.0)).unwrap();
        let r = moment(&s, &p, &x).unwrap();
        let rep = fiber_topology(&s, &p, r, 200, FiberModel::LiteralTorus).unwrap();
        assert_eq!(rep.components, 0, "{rep:?}");
    }

    #[test]
    fn literal_fiber_counts_all_eight_points() {
        // 1 + x₁² + x₂² on the unit bitorus: 2θ₁ = ±2π/3 paired with
        // 2θ₂ = ∓2π/3 gives eight angle solutions.
        let t = LatticePolygon::standard_triangle(2);
        let s = LaurentSection::new(
            [(0, 0), (2, 0), (0, 2)]
                .map(|(x, y)| (LatticePoint::new(x, y), Complex64::new(1.0, 0.0)))
                .to_vec(),
        )
        .unwrap();
        let p = MomentParams::new(1.0, WeightFunction::zero(&t), 0.5).unwrap();
        let rep =
            fiber_topology(&s, &p, (2.0 / 3.0, 2.0 / 3.0), 240, FiberModel::LiteralTorus).unwrap();
        assert_eq!(rep.components, 8, "{rep:?}");
    }

    #[test]
    fn inversion_roundtrips_interior_targets() {
        let t = LatticePolygon::standard_triangle(2);
        let w = WeightFunction::quadratic(&t);
        let p = MomentParams::with_default_exponent(0.3, w).unwrap();
        let s = LaurentSection::ones(&t);
        for target in [(0.7, 0.6), (0.2, 0.3), (1.1, 0.4)] {
            let lr = invert_moment(&s, &p, target).unwrap();
            let x = TorusPoint::new(lr, (0.0, 0.0)).unwrap();
            let f = moment(&s, &p, &x).unwrap();
            assert!((f.0 - target.0).abs() < 1e-9, "{f:?} vs {target:?}");
            assert!((f.1 - target.1).abs() < 1e-9);
        }
    }

    #[test]
    fn model_mismatch_is_rejected() {
        let t = LatticePolygon::standard_triangle(2);
        let s = LaurentSection::ones(&t);
        let p = MomentParams::new(1.0, WeightFunction::zero(&t), 0.5).unwrap();
        let out = fiber_topology(&s, &p, (1.0 / 3.0, 1.0 / 3.0), 64, FiberModel::PiecewiseMaxLine);
        assert!(matches!(out, Err(FiberError::ModelMismatch)));
    }
}
