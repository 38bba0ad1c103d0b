//! Curve sampling and amoeba rasterization.
//!
//! The curve is swept slice-wise: fix one torus coordinate on a log-radius ×
//! angle grid, clear the other variable's minimal exponent, and take all
//! roots of the resulting univariate polynomial. Both axes must be swept;
//! near-vertical boundary segments of the amoeba are invisible to a single
//! axis. Slice coefficients are built in log-magnitude form (largest term
//! scaled to one) so δ-weights never underflow.
//!
//! Images land in an occupancy raster over the polygon's bounding box.
//! Holes are bounded complement components inside Δ (flood fill from the
//! boundary). Legs per edge are the radius clusters of the edge-restricted
//! section's roots, where the closure of the curve actually meets the toric
//! divisor; the count lands in the raster meta. A raster populated without
//! section data falls back to counting occupied components that contact a
//! thin band along the edge, which agrees once the moment image separates
//! the tentacles at raster scale but undercounts when the curve passes
//! subcell-close to an edge between contact points.

use crate::lattice::{LatticePoint, LatticePolygon};
use crate::moment::{eval_section_scaled, moment, LaurentSection, MomentParams, TorusPoint};
use crate::roots::{all_roots, RootFindConfig};
use crate::spine::SpineGraph;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum SamplerError {
    #[error("slice spec needs ≥ 2 slices and ≥ 1 angle")]
    BadSpec,
    #[error("raster holds no occupied cells")]
    EmptyRaster,
    #[error("resolution too coarse: spine raster shows {seen} holes where the graph has {expected}")]
    ResolutionTooCoarse { expected: usize, seen: usize },
    #[error("section and raster use different polygons")]
    PolygonMismatch,
}

/// Which torus coordinate a sweep holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    FixX1,
    FixX2,
}

#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub axis: SliceAxis,
    pub log_range: (f64, f64),
    pub slices: usize,
    pub angles: usize,
}

/// A slice that produced no usable roots, with the reason.
#[derive(Debug, Clone)]
pub struct SliceDiagnostic {
    pub axis: SliceAxis,
    pub log_radius: f64,
    pub angle: f64,
    pub reason: String,
}

/// Occupancy grid over the polygon's bounding box. Cell (i, j) covers
/// `origin + (i..i+1, j..j+1) * cell`; bit set means amoeba presence.
#[derive(Debug, Clone, PartialEq)]
pub struct AmoebaRaster {
    pub nx: usize,
    pub ny: usize,
    pub origin: (f64, f64),
    pub cell: (f64, f64),
    bits: Vec<u64>,
    pub meta: RasterMeta,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RasterMeta {
    pub delta: f64,
    pub dilation_radius_cells: f64,
    pub slices: usize,
    pub angles: usize,
    pub samples: usize,
    /// Per-edge tentacle counts from log-space end clustering, in
    /// `polygon.edges()` order. Empty when the raster was populated without
    /// sample data.
    pub leg_clusters: Vec<usize>,
}

impl AmoebaRaster {
    pub fn new(polygon: &LatticePolygon, resolution: usize) -> Self {
        let (lo, hi) = polygon.bounding_box();
        let origin = (lo.x as f64, lo.y as f64);
        let cell = (
            (hi.x - lo.x) as f64 / resolution as f64,
            (hi.y - lo.y) as f64 / resolution as f64,
        );
        let words = (resolution * resolution + 63) / 64;
        Self {
            nx: resolution,
            ny: resolution,
            origin,
            cell,
            bits: vec![0; words],
            meta: RasterMeta::default(),
        }
    }

    /// An empty raster with explicit geometry, the ingest counterpart of a
    /// serialized dump.
    pub fn with_geometry(nx: usize, ny: usize, origin: (f64, f64), cell: (f64, f64)) -> Self {
        let words = (nx * ny + 63) / 64;
        Self {
            nx,
            ny,
            origin,
            cell,
            bits: vec![0; words],
            meta: RasterMeta::default(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        let idx = j * self.nx + i;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        let idx = j * self.nx + i;
        self.bits[idx / 64] |= 1 << (idx % 64);
    }

    /// Cell index of a moment-coordinate point, clamped to the grid.
    pub fn locate(&self, x: f64, y: f64) -> (usize, usize) {
        let i = ((x - self.origin.0) / self.cell.0).floor() as i64;
        let j = ((y - self.origin.1) / self.cell.1).floor() as i64;
        (
            i.clamp(0, self.nx as i64 - 1) as usize,
            j.clamp(0, self.ny as i64 - 1) as usize,
        )
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.cell.0,
            self.origin.1 + (j as f64 + 0.5) * self.cell.1,
        )
    }

    pub fn occupied_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn occupied_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Morphological dilation by a disk of the given radius in cell units.
    pub fn dilate(&mut self, radius_cells: f64) {
        if radius_cells <= 0.0 {
            return;
        }
        let r = radius_cells.floor() as i64 + 1;
        let mut offsets = Vec::new();
        for dx in -r..=r {
            for dy in -r..=r {
                if (dx * dx + dy * dy) as f64 <= radius_cells * radius_cells {
                    offsets.push((dx, dy));
                }
            }
        }
        let mut out = self.bits.clone();
        for (i, j) in self.occupied_cells() {
            for &(dx, dy) in &offsets {
                let x = i as i64 + dx;
                let y = j as i64 + dy;
                if x >= 0 && y >= 0 && (x as usize) < self.nx && (y as usize) < self.ny {
                    let idx = y as usize * self.nx + x as usize;
                    out[idx / 64] |= 1 << (idx % 64);
                }
            }
        }
        self.bits = out;
        self.meta.dilation_radius_cells = radius_cells;
    }

    /// True when each occupied cell of `self` is within `k` cells of an
    /// occupied cell of `other` and vice versa (set equality up to k cells).
    pub fn set_equal_within(&self, other: &AmoebaRaster, k: usize) -> bool {
        if self.nx != other.nx || self.ny != other.ny {
            return false;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        a.dilate(k as f64 + 0.5);
        b.dilate(k as f64 + 0.5);
        let contained = |thin: &AmoebaRaster, fat: &AmoebaRaster| {
            thin.bits
                .iter()
                .zip(&fat.bits)
                .all(|(t, f)| t & !f == 0)
        };
        contained(self, &b) && contained(other, &a)
    }
}

/// Bounded complement components and per-edge leg counts of a raster.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleReport {
    pub holes: usize,
    pub hole_areas: Vec<f64>,
    pub legs: Vec<usize>,
}

/// Builds the univariate slice polynomial with the largest coefficient
/// magnitude scaled to one. Returns low-to-high coefficients over the free
/// exponent range (minimal exponent cleared). `None` when every coefficient
/// vanishes.
fn slice_polynomial(
    s: &LaurentSection,
    p: &MomentParams,
    axis: SliceAxis,
    log_radius: f64,
    angle: f64,
) -> Option<Vec<Complex64>> {
    let free = |m: &LatticePoint| match axis {
        SliceAxis::FixX1 => m.y,
        SliceAxis::FixX2 => m.x,
    };
    let fixed = |m: &LatticePoint| match axis {
        SliceAxis::FixX1 => m.x,
        SliceAxis::FixX2 => m.y,
    };
    let ln_delta = p.delta().ln();
    let w_of = |m: LatticePoint| crate::rat::rat_to_f64(p.weight().value(m).expect("support"));
    let lmax = s
        .terms()
        .iter()
        .map(|(m, a)| w_of(*m) * ln_delta + fixed(m) as f64 * log_radius + a.norm().ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let kmin = s.terms().iter().map(|(m, _)| free(m)).min()?;
    let kmax = s.terms().iter().map(|(m, _)| free(m)).max()?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (kmax - kmin + 1) as usize];
    for (m, a) in s.terms() {
        let l = w_of(*m) * ln_delta + fixed(m) as f64 * log_radius + a.norm().ln();
        let phase = fixed(m) as f64 * angle + a.arg();
        coeffs[(free(m) - kmin) as usize] += Complex64::from_polar((l - lmax).exp(), phase);
    }
    // Cancellation check is relative to the gross term mass: each term enters
    // with magnitude exp(l - lmax) ≤ 1, so a coefficient vector that is tiny
    // against that mass is a genuine cancellation, not small data.
    let gross = s.terms().len() as f64;
    let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_mag <= 1e-13 * gross {
        return None;
    }
    Some(coeffs)
}

/// All curve points over one sweep of slices. Failed or degenerate slices
/// are reported in the diagnostics without aborting the sweep; every
/// returned point back-substitutes into the slice polynomial with relative
/// residual below 1e-9.
pub fn sample_curve(
    s: &LaurentSection,
    p: &MomentParams,
    spec: &SliceSpec,
) -> Result<(Vec<TorusPoint>, Vec<SliceDiagnostic>), SamplerError> {
    if spec.slices < 2 || spec.angles < 1 {
        return Err(SamplerError::BadSpec);
    }
    let (lo, hi) = spec.log_range;
    let jobs: Vec<(f64, f64)> = (0..spec.slices)
        .flat_map(|i| {
            let lr = lo + (hi - lo) * i as f64 / (spec.slices - 1) as f64;
            (0..spec.angles).map(move |j| {
                (lr, 2.0 * std::f64::consts::PI * j as f64 / spec.angles as f64)
            })
        })
        .collect();
    let results: Vec<(Vec<TorusPoint>, Option<SliceDiagnostic>)> = jobs
        .par_iter()
        .map(|&(lr, angle)| solve_slice(s, p, spec.axis, lr, angle))
        .collect();
    let mut points = Vec::new();
    let mut diagnostics = Vec::new();
    for (pts, diag) in results {
        points.extend(pts);
        diagnostics.extend(diag);
    }
    Ok((points, diagnostics))
}

fn solve_slice(
    s: &LaurentSection,
    p: &MomentParams,
    axis: SliceAxis,
    log_radius: f64,
    angle: f64,
) -> (Vec<TorusPoint>, Option<SliceDiagnostic>) {
    let diag = |reason: String| SliceDiagnostic {
        axis,
        log_radius,
        angle,
        reason,
    };
    let Some(coeffs) = slice_polynomial(s, p, axis, log_radius, angle) else {
        return (Vec::new(), Some(diag("degenerate slice: polynomial vanishes".into())));
    };
    let cfg = RootFindConfig::default();
    let roots = match all_roots(&coeffs, &cfg) {
        Ok(r) => r,
        Err(e) => return (Vec::new(), Some(diag(format!("root finding failed: {e}")))),
    };
    let mut points = Vec::new();
    let mut rejected = 0usize;
    for u in roots {
        if u.re == 0.0 && u.im == 0.0 {
            continue; // boundary stratum, not a torus point
        }
        let (free_lr, free_th) = (u.norm().ln(), u.arg());
        if !free_lr.is_finite() {
            rejected += 1;
            continue;
        }
        let x = match axis {
            SliceAxis::FixX1 => TorusPoint::new((log_radius, free_lr), (angle, free_th)),
            SliceAxis::FixX2 => TorusPoint::new((free_lr, log_radius), (free_th, angle)),
        };
        let Ok(x) = x else {
            rejected += 1;
            continue;
        };
        // Residual contract on the full section, in scaled form.
        let (_, unit) = eval_section_scaled(s, p, &x).expect("support checked");
        let scale = s.terms().len() as f64;
        if unit.norm() <= 1e-9 * scale {
            points.push(x);
        } else {
            rejected += 1;
        }
    }
    let diagnostic =
        (rejected > 0).then(|| diag(format!("{rejected} roots rejected by residual check")));
    (points, diagnostic)
}

/// Per-axis log-radius ranges covering the curve's tropical vertices with a
/// margin. Vertices are balance points of term triples where the maximal
/// log-magnitude is attained three times; with flat weights and unit
/// coefficients everything balances at the origin and the margin alone
/// remains.
pub fn auto_log_range(s: &LaurentSection, p: &MomentParams, margin: f64) -> ((f64, f64), (f64, f64)) {
    let ln_delta = p.delta().ln();
    let pts: Vec<(LatticePoint, f64)> = s
        .terms()
        .iter()
        .map(|(m, a)| {
            let w = crate::rat::rat_to_f64(p.weight().value(*m).expect("support"));
            (*m, w * ln_delta + a.norm().ln())
        })
        .collect();
    let mut xs = vec![0.0f64];
    let mut ys = vec![0.0f64];
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            for k in (j + 1)..pts.len() {
                let (ma, ha) = pts[i];
                let (mb, hb) = pts[j];
                let (mc, hc) = pts[k];
                let d1 = mb.sub(ma);
                let d2 = mc.sub(ma);
                let det = (d1.x * d2.y - d1.y * d2.x) as f64;
                if det == 0.0 {
                    continue;
                }
                // <m_b - m_a, v> = h_a - h_b and likewise for c.
                let r1 = ha - hb;
                let r2 = ha - hc;
                let vx = (r1 * d2.y as f64 - r2 * d1.y as f64) / det;
                let vy = (r2 * d1.x as f64 - r1 * d2.x as f64) / det;
                let val = ma.x as f64 * vx + ma.y as f64 * vy + ha;
                let top = pts
                    .iter()
                    .map(|(m, h)| m.x as f64 * vx + m.y as f64 * vy + h)
                    .fold(f64::NEG_INFINITY, f64::max);
                if top - val <= 1e-9 * (1.0 + top.abs()) {
                    xs.push(vx);
                    ys.push(vy);
                }
            }
        }
    }
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo - margin, hi + margin)
    };
    (span(&xs), span(&ys))
}

/// High percentile of nearest-neighbor distances between sample cells, in
/// cell units. This is the raster's effective sampling resolution: gaps
/// along the sampled curve are this wide, so the dilation has to bridge
/// them or the interior of the amoeba fills with spurious pockets.
fn estimate_spacing_cells(raster: &AmoebaRaster, cells: &[(usize, usize)]) -> f64 {
    let stride = (cells.len() / 4096).max(1);
    let mut dists = Vec::new();
    for &(i, j) in cells.iter().step_by(stride) {
        let mut best = f64::INFINITY;
        for r in 1..=8i64 {
            for dx in -r..=r {
                for dy in -r..=r {
                    if dx.abs().max(dy.abs()) != r {
                        continue;
                    }
                    let a = i as i64 + dx;
                    let b = j as i64 + dy;
                    if a < 0 || b < 0 || a as usize >= raster.nx || b as usize >= raster.ny {
                        continue;
                    }
                    if raster.get(a as usize, b as usize) {
                        best = best.min(((dx * dx + dy * dy) as f64).sqrt());
                    }
                }
            }
            if best <= r as f64 {
                break;
            }
        }
        dists.push(if best.is_finite() { best } else { 9.0 });
    }
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_by(f64::total_cmp);
    dists[(dists.len() * 95 / 100).min(dists.len() - 1)]
}

/// Per-edge leg counts, in `polygon.edges()` order: the number of distinct
/// radius clusters among the nonzero roots of the δ-scaled section
/// restricted to each polygon edge.
///
/// The closure of the curve meets the toric divisor of an edge exactly at
/// the roots of that edge's restriction, and the moment image presents one
/// leg per cluster of root moduli. Roots whose log-radii differ by at most
/// 0.3 merge into one cluster: coincident or near-coincident contacts count
/// once, which is also the finest separation a raster-scale picture can
/// support. Roots at the origin and trimmed infinite roots belong to the
/// adjacent corners, not to the edge interior, and are excluded.
pub fn edge_leg_clusters(
    s: &LaurentSection,
    p: &MomentParams,
    polygon: &LatticePolygon,
) -> Vec<usize> {
    let ln_delta = p.delta().ln();
    let cfg = RootFindConfig::default();
    polygon
        .edges()
        .iter()
        .map(|(a, b)| {
            let g = gcd_i64((b.x - a.x).abs(), (b.y - a.y).abs()).max(1);
            let step = LatticePoint::new((b.x - a.x) / g, (b.y - a.y) / g);
            // Log-magnitude form: the largest coefficient is scaled to one so
            // steep δ-weights cannot underflow the root iteration.
            let raw: Vec<(Complex64, f64)> = (0..=g)
                .map(|k| {
                    let m = LatticePoint::new(a.x + k * step.x, a.y + k * step.y);
                    match (s.coefficient(m), p.weight().value(m)) {
                        (Some(c), Some(w)) if c.norm() > 0.0 => {
                            let lw = c.norm().ln() + crate::rat::rat_to_f64(w) * ln_delta;
                            (c / c.norm(), lw)
                        }
                        _ => (Complex64::new(0.0, 0.0), f64::NEG_INFINITY),
                    }
                })
                .collect();
            let top = raw.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
            if !top.is_finite() {
                return 0;
            }
            let coeffs: Vec<Complex64> = raw
                .into_iter()
                .map(|(u, lw)| u * (lw - top).exp())
                .collect();
            let roots = match all_roots(&coeffs, &cfg) {
                Ok(r) => r,
                Err(_) => return 0,
            };
            let mut lr: Vec<f64> = roots
                .iter()
                .filter(|z| z.norm() > 0.0)
                .map(|z| z.norm().ln())
                .collect();
            if lr.is_empty() {
                return 0;
            }
            lr.sort_by(f64::total_cmp);
            let mut clusters = 1usize;
            for w in lr.windows(2) {
                if w[1] - w[0] > 0.3 {
                    clusters += 1;
                }
            }
            clusters
        })
        .collect()
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd_i64(b, a % b)
    }
}

/// Moment images of sampled points marked into a fresh raster, then dilated
/// by `dilation_factor` times the measured inter-sample spacing (clamped to
/// [1, 6] cells). The applied radius lands in the raster meta, along with
/// the per-edge leg clusters of the sample set.
pub fn rasterize(
    points: &[TorusPoint],
    s: &LaurentSection,
    p: &MomentParams,
    polygon: &LatticePolygon,
    resolution: usize,
    dilation_factor: f64,
) -> AmoebaRaster {
    let mut raster = AmoebaRaster::new(polygon, resolution);
    let cells: Vec<(usize, usize)> = points
        .par_iter()
        .map(|x| {
            let (fx, fy) = moment(s, p, x).expect("support checked");
            raster.locate(fx, fy)
        })
        .collect();
    for &(i, j) in &cells {
        raster.set(i, j);
    }
    raster.meta.delta = p.delta();
    raster.meta.samples = points.len();
    raster.meta.leg_clusters = edge_leg_clusters(s, p, polygon);
    let spacing = estimate_spacing_cells(&raster, &cells);
    raster.dilate((dilation_factor * spacing).clamp(1.0, 4.0));
    raster
}

/// Default sweep: both axes, auto log range, shared slice/angle counts.
pub fn sample_amoeba(
    s: &LaurentSection,
    p: &MomentParams,
    slices: usize,
    angles: usize,
    margin: f64,
) -> Result<(Vec<TorusPoint>, Vec<SliceDiagnostic>), SamplerError> {
    let (range_x1, range_x2) = auto_log_range(s, p, margin);
    let spec1 = SliceSpec {
        axis: SliceAxis::FixX1,
        log_range: range_x1,
        slices,
        angles,
    };
    let spec2 = SliceSpec {
        axis: SliceAxis::FixX2,
        log_range: range_x2,
        slices,
        angles,
    };
    let (mut pts, mut diags) = sample_curve(s, p, &spec1)?;
    let (pts2, diags2) = sample_curve(s, p, &spec2)?;
    pts.extend(pts2);
    diags.extend(diags2);
    Ok((pts, diags))
}

/// Cell states for complement analysis.
#[derive(Clone, Copy, PartialEq)]
enum CellState {
    Occupied,
    FreeInside,
    Outside,
}

fn classify_cells(r: &AmoebaRaster, polygon: &LatticePolygon) -> Vec<CellState> {
    let mut states = vec![CellState::Outside; r.nx * r.ny];
    for j in 0..r.ny {
        for i in 0..r.nx {
            let (cx, cy) = r.center(i, j);
            let inside = polygon.contains_f64(cx, cy, 1e-12);
            states[j * r.nx + i] = if !inside {
                CellState::Outside
            } else if r.get(i, j) {
                CellState::Occupied
            } else {
                CellState::FreeInside
            };
        }
    }
    states
}

/// Flood-fills the free complement from ∂Δ; whatever free region never
/// reaches the boundary is a hole. Legs are occupied 8-connected components
/// meeting a band 3 cells deep along each polygon edge, reported in the
/// polygon's edge order.
pub fn count_holes(r: &AmoebaRaster, polygon: &LatticePolygon) -> Result<HoleReport, SamplerError> {
    if r.occupied_count() == 0 {
        return Err(SamplerError::EmptyRaster);
    }
    let states = classify_cells(r, polygon);
    let nx = r.nx;
    let ny = r.ny;
    let mut unbounded = vec![false; nx * ny];
    let mut queue = std::collections::VecDeque::new();
    for j in 0..ny {
        for i in 0..nx {
            let idx = j * nx + i;
            if states[idx] != CellState::FreeInside {
                continue;
            }
            let on_border = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            let near_outside = neighbors4(i, j, nx, ny)
                .into_iter()
                .any(|(a, b)| states[b * nx + a] == CellState::Outside);
            if on_border || near_outside {
                unbounded[idx] = true;
                queue.push_back((i, j));
            }
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        for (a, b) in neighbors4(i, j, nx, ny) {
            let idx = b * nx + a;
            if states[idx] == CellState::FreeInside && !unbounded[idx] {
                unbounded[idx] = true;
                queue.push_back((a, b));
            }
        }
    }

    // Pockets near the dilation scale are sampling artifacts: gaps in the
    // tail of the inter-sample spacing distribution survive a dilation
    // keyed to its 95th percentile. Only components well above that scale
    // count as holes.
    let floor_cells = ((4.0 * r.meta.dilation_radius_cells).powi(2)).max(16.0);
    let mut seen = vec![false; nx * ny];
    let mut hole_areas = Vec::new();
    let cell_area = r.cell.0 * r.cell.1;
    for j in 0..ny {
        for i in 0..nx {
            let idx = j * nx + i;
            if states[idx] != CellState::FreeInside || unbounded[idx] || seen[idx] {
                continue;
            }
            let mut size = 0usize;
            let mut stack = vec![(i, j)];
            seen[idx] = true;
            while let Some((a, b)) = stack.pop() {
                size += 1;
                for (c, d) in neighbors4(a, b, nx, ny) {
                    let k = d * nx + c;
                    if states[k] == CellState::FreeInside && !unbounded[k] && !seen[k] {
                        seen[k] = true;
                        stack.push((c, d));
                    }
                }
            }
            if size as f64 >= floor_cells {
                hole_areas.push(size as f64 * cell_area);
            }
        }
    }
    hole_areas.sort_by(|a, b| b.total_cmp(a));

    // Legs: sampled rasters carry the log-space end clusters; rasters
    // populated cell-by-cell fall back to occupied components in a band 3
    // cells deep that contact the edge (within ~1 cell), which separates
    // tentacles from stray interior samples drifting into the band.
    if r.meta.leg_clusters.len() == polygon.edges().len() {
        return Ok(HoleReport {
            holes: hole_areas.len(),
            hole_areas,
            legs: r.meta.leg_clusters.clone(),
        });
    }
    let cell_len = r.cell.0.max(r.cell.1);
    let band = 3.0 * cell_len;
    let contact = 1.2 * cell_len;
    let mut legs = Vec::new();
    for (a, b) in polygon.edges() {
        let seg = ((a.x as f64, a.y as f64), (b.x as f64, b.y as f64));
        let mut in_band = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                if states[j * nx + i] == CellState::Occupied {
                    let c = r.center(i, j);
                    if point_segment_distance(c, seg.0, seg.1) <= band {
                        in_band[j * nx + i] = true;
                    }
                }
            }
        }
        let mut visited = vec![false; nx * ny];
        let mut count = 0usize;
        for j in 0..ny {
            for i in 0..nx {
                let idx = j * nx + i;
                if !in_band[idx] || visited[idx] {
                    continue;
                }
                let mut touches_edge = false;
                let mut stack = vec![(i, j)];
                visited[idx] = true;
                while let Some((a2, b2)) = stack.pop() {
                    if point_segment_distance(r.center(a2, b2), seg.0, seg.1) <= contact {
                        touches_edge = true;
                    }
                    for (c, d) in neighbors8(a2, b2, nx, ny) {
                        let k = d * nx + c;
                        if in_band[k] && !visited[k] {
                            visited[k] = true;
                            stack.push((c, d));
                        }
                    }
                }
                if touches_edge {
                    count += 1;
                }
            }
        }
        legs.push(count);
    }

    Ok(HoleReport {
        holes: hole_areas.len(),
        hole_areas,
        legs,
    })
}

fn neighbors4(i: usize, j: usize, nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(4);
    if i > 0 {
        out.push((i - 1, j));
    }
    if j > 0 {
        out.push((i, j - 1));
    }
    if i + 1 < nx {
        out.push((i + 1, j));
    }
    if j + 1 < ny {
        out.push((i, j + 1));
    }
    out
}

fn neighbors8(i: usize, j: usize, nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(8);
    for dx in -1i64..=1 {
        for dy in -1i64..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let a = i as i64 + dx;
            let b = j as i64 + dy;
            if a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < ny {
                out.push((a as usize, b as usize));
            }
        }
    }
    out
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (px, py) = (p.0 - a.0, p.1 - a.1);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        ((px * dx + py * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (px - t * dx, py - t * dy);
    (qx * qx + qy * qy).sqrt()
}

fn spine_segments(g: &SpineGraph) -> Vec<((f64, f64), (f64, f64))> {
    let vs: Vec<(f64, f64)> = g
        .vertices()
        .iter()
        .map(|v| {
            (
                crate::rat::rat_to_f64(&v.position.0),
                crate::rat::rat_to_f64(&v.position.1),
            )
        })
        .collect();
    g.edges().iter().map(|&(a, b)| (vs[a], vs[b])).collect()
}

/// Rasterizes the spine graph itself (dense samples along each edge).
pub fn raster_of_spine(
    g: &SpineGraph,
    polygon: &LatticePolygon,
    resolution: usize,
    dilation_radius_cells: f64,
) -> AmoebaRaster {
    let mut raster = AmoebaRaster::new(polygon, resolution);
    let step = raster.cell.0.min(raster.cell.1) / 4.0;
    for (a, b) in spine_segments(g) {
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let (i, j) = raster.locate(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            raster.set(i, j);
        }
    }
    raster.dilate(dilation_radius_cells);
    raster
}

/// Checks that the raster scale resolves the spine: its own rasterization
/// must reproduce the graph's bounded faces as holes.
pub fn verify_resolution(
    g: &SpineGraph,
    polygon: &LatticePolygon,
    resolution: usize,
    dilation_radius_cells: f64,
) -> Result<(), SamplerError> {
    let raster = raster_of_spine(g, polygon, resolution, dilation_radius_cells);
    let report = count_holes(&raster, polygon)?;
    let expected = g.bounded_faces();
    if report.holes != expected {
        return Err(SamplerError::ResolutionTooCoarse {
            expected,
            seen: report.holes,
        });
    }
    Ok(())
}

/// One-dimensional squared-distance transform (lower envelope of parabolas)
/// with physical sample spacing `h`.
fn dt1d(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut out = vec![0.0f64; n];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let x = |q: usize| q as f64 * h;
    for q in 1..n {
        if f[q] == f64::INFINITY && f[v[k]] == f64::INFINITY {
            continue;
        }
        loop {
            let p = v[k];
            let denom = 2.0 * x(q) - 2.0 * x(p);
            let s = if denom == 0.0 {
                f64::INFINITY
            } else {
                ((f[q] + x(q) * x(q)) - (f[p] + x(p) * x(p))) / denom
            };
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < x(q) {
            k += 1;
        }
        let d = x(q) - x(v[k]);
        out[q] = d * d + f[v[k]];
    }
    out
}

/// Squared Euclidean distance from every cell center to the nearest
/// occupied cell center, in moment units.
pub fn distance_transform(r: &AmoebaRaster) -> Vec<f64> {
    let nx = r.nx;
    let ny = r.ny;
    let mut field = vec![f64::INFINITY; nx * ny];
    for (i, j) in r.occupied_cells() {
        field[j * nx + i] = 0.0;
    }
    // Columns first, then rows.
    for i in 0..nx {
        let col: Vec<f64> = (0..ny).map(|j| field[j * nx + i]).collect();
        let d = dt1d(&col, r.cell.1);
        for j in 0..ny {
            field[j * nx + i] = d[j];
        }
    }
    for j in 0..ny {
        let row: Vec<f64> = (0..nx).map(|i| field[j * nx + i]).collect();
        let d = dt1d(&row, r.cell.0);
        for i in 0..nx {
            field[j * nx + i] = d[i];
        }
    }
    field
}

/// Directed Hausdorff distances `(spine→amoeba, amoeba→spine)` in units of
/// the polygon diameter. Spine→amoeba reads a distance transform at dense
/// spine samples (half-cell slop); amoeba→spine is exact per cell center.
pub fn hausdorff_to_spine(
    r: &AmoebaRaster,
    g: &SpineGraph,
    polygon: &LatticePolygon,
) -> Result<(f64, f64), SamplerError> {
    if r.occupied_count() == 0 {
        return Err(SamplerError::EmptyRaster);
    }
    let segments = spine_segments(g);
    let diam = polygon.diameter();

    let occupied = r.occupied_cells();
    let d_a2s = occupied
        .par_iter()
        .map(|&(i, j)| {
            let c = r.center(i, j);
            segments
                .iter()
                .map(|&(a, b)| point_segment_distance(c, a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);

    let edt = distance_transform(r);
    let step = r.cell.0.min(r.cell.1) / 2.0;
    let mut d_s2a = 0.0f64;
    for (a, b) in &segments {
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let (x, y) = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            let (i, j) = r.locate(x, y);
            d_s2a = d_s2a.max(edt[j * r.nx + i].sqrt());
        }
    }
    Ok((d_s2a / diam, d_a2s / diam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment::MomentParams;
    use crate::spine::build_spine;
    use crate::subdivision::{subdivide, WeightFunction};
    use proptest::prelude::*;

    fn line_setup() -> (LatticePolygon, MomentParams, LaurentSection) {
        let t = LatticePolygon::standard_triangle(1);
        let p = MomentParams::new(1.0, WeightFunction::zero(&t), 0.5).unwrap();
        let s = LaurentSection::ones(&t);
        (t, p, s)
    }

    fn weighted_setup(degree: i64, delta: f64) -> (LatticePolygon, MomentParams, LaurentSection) {
        let t = LatticePolygon::standard_triangle(degree);
        let w = WeightFunction::quadratic(&t);
        let p = MomentParams::with_default_exponent(delta, w).unwrap();
        let s = LaurentSection::ones(&t);
        (t, p, s)
    }

    #[test]
    fn line_slice_solves_exactly() {
        let (_, p, s) = line_setup();
        // x₂ = -1/2 fixed: 1 + x₁ + x₂ = 0 at x₁ = -1/2.
        let (pts, diags) = solve_slice(&s, &p, SliceAxis::FixX2, 0.5f64.ln(), std::f64::consts::PI);
        assert!(diags.is_none());
        assert_eq!(pts.len(), 1);
        let x1 = pts[0].x1();
        assert!((x1 - Complex64::new(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fermat_slice_has_two_verified_roots() {
        let t = LatticePolygon::standard_triangle(2);
        let s = LaurentSection::new(
            [(0, 0), (2, 0), (0, 2)]
                .map(|(x, y)| (LatticePoint::new(x, y), Complex64::new(1.0, 0.0)))
                .to_vec(),
        )
        .unwrap();
        let p = MomentParams::new(1.0, WeightFunction::zero(&t), 0.5).unwrap();
        let (pts, diags) = solve_slice(&s, &p, SliceAxis::FixX2, 0.3, 1.1);
        assert!(diags.is_none());
        assert_eq!(pts.len(), 2);
        for x in &pts {
            let v = crate::moment::eval_section(&s, &p, x).unwrap();
            let scale = 1.0 + x.x1().norm_sqr() + x.x2().norm_sqr();
            assert!(v.norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn factored_slice_reports_degenerate() {
        // s = x₁x₂ + x₁ vanishes identically on the slice x₂ = -1.
        let t = LatticePolygon::new(vec![
            LatticePoint::new(1, 0),
            LatticePoint::new(1, 1),
        ]);
        // Degenerate polygon is rejected; build the section directly instead.
        assert!(t.is_err());
        let square = LatticePolygon::new(vec![
            LatticePoint::new(0, 0),
            LatticePoint::new(1, 0),
            LatticePoint::new(1, 1),
            LatticePoint::new(0, 1),
        ])
        .unwrap();
        let s = LaurentSection::new(vec![
            (LatticePoint::new(1, 0), Complex64::new(1.0, 0.0)),
            (LatticePoint::new(1, 1), Complex64::new(1.0, 0.0)),
        ])
        .unwrap();
        let p = MomentParams::new(1.0, WeightFunction::zero(&square), 0.5).unwrap();
        let (pts, diag) = solve_slice(&s, &p, SliceAxis::FixX2, 0.0, std::f64::consts::PI);
        assert!(pts.is_empty());
        assert!(diag.unwrap().reason.contains("degenerate"));
    }

    #[test]
    fn auto_range_flat_weight_is_margin_box() {
        let (_, p, s) = line_setup();
        let (rx, ry) = auto_log_range(&s, &p, 8.0);
        assert_eq!(rx, (-8.0, 8.0));
        assert_eq!(ry, (-8.0, 8.0));
    }

    #[test]
    fn auto_range_tracks_tropical_vertices() {
        let (_, p, s) = weighted_setup(2, 1e-3);
        let (rx, ry) = auto_log_range(&s, &p, 8.0);
        // The quadratic weight anchors at the origin and grows into the
        // positive quadrant: balance points are nonnegative multiples of
        // |ln δ| ≈ 6.9, the largest near 3|ln δ| ≈ 20.7.
        assert_eq!(rx.0, -8.0);
        assert_eq!(ry.0, -8.0);
        assert!(rx.1 > 20.0 && rx.1 < 40.0, "{rx:?}");
        assert!(ry.1 > 20.0 && ry.1 < 40.0, "{ry:?}");
    }

    #[test]
    fn empty_raster_roundtrip() {
        let t = LatticePolygon::standard_triangle(2);
        let r = AmoebaRaster::new(&t, 50);
        assert_eq!(r.occupied_count(), 0);
        assert!(count_holes(&r, &t).is_err());
    }

    #[test]
    fn line_amoeba_covers_curved_triangle_boundary() {
        let (t, p, s) = line_setup();
        let (pts, _) = sample_amoeba(&s, &p, 200, 32, 8.0).unwrap();
        let raster = rasterize(&pts, &s, &p, &t, 200, 1.5);
        // Radii boundary families of the line amoeba: r₁+r₂=1, r₂=r₁+1,
        // r₁=r₂+1, realized at aligned angles (π, π).
        let mut checked = 0;
        for k in 1..=7 {
            let r1 = k as f64 / 8.0;
            for (a, b) in [(r1, 1.0 - r1), (r1, r1 + 1.0), (r1 + 1.0, r1)] {
                let x = TorusPoint::new((a.ln(), b.ln()), (std::f64::consts::PI, std::f64::consts::PI))
                    .unwrap();
                let (fx, fy) = moment(&s, &p, &x).unwrap();
                let (i, j) = raster.locate(fx, fy);
                assert!(raster.get(i, j), "boundary point ({a}, {b}) missing");
                checked += 1;
            }
        }
        assert_eq!(checked, 21);
    }

    #[test]
    fn line_holes_and_legs() {
        let (t, p, s) = line_setup();
        let (pts, _) = sample_amoeba(&s, &p, 300, 64, 8.0).unwrap();
        let raster = rasterize(&pts, &s, &p, &t, 200, 1.5);
        let report = count_holes(&raster, &t).unwrap();
        assert_eq!(report.holes, 0);
        assert_eq!(report.legs, vec![1, 1, 1]);
    }

    #[test]
    fn degree3_amoeba_has_central_hole() {
        let (t, p, s) = weighted_setup(3, 1e-3);
        let (pts, _) = sample_amoeba(&s, &p, 300, 48, 8.0).unwrap();
        let raster = rasterize(&pts, &s, &p, &t, 240, 1.5);
        let report = count_holes(&raster, &t).unwrap();
        assert_eq!(report.holes, 1);
        assert_eq!(report.legs, vec![3, 3, 3]);
    }

    #[test]
    fn affine_weight_change_preserves_raster() {
        let (t, p, s) = weighted_setup(2, 1e-2);
        let w2 = {
            let base = p.weight().clone();
            WeightFunction::new(&t, |m| {
                base.value(m).unwrap().clone() + crate::rat::rat_int(2 * m.x - m.y)
                    - crate::rat::rat_int(1)
            })
        };
        let p2 = MomentParams::new(p.delta(), w2, p.a_exponent()).unwrap();
        let (pts1, _) = sample_amoeba(&s, &p, 250, 40, 8.0).unwrap();
        let (pts2, _) = sample_amoeba(&s, &p2, 250, 40, 8.0).unwrap();
        let r1 = rasterize(&pts1, &s, &p, &t, 150, 1.5);
        let r2 = rasterize(&pts2, &s, &p2, &t, 150, 1.5);
        assert!(r1.set_equal_within(&r2, 1));
    }

    #[test]
    fn spine_raster_matches_itself() {
        let (t, p, _) = weighted_setup(3, 1e-3);
        let z = subdivide(&t, p.weight()).unwrap();
        let g = build_spine(&z);
        let raster = raster_of_spine(&g, &t, 300, 1.5);
        let (d_s2a, d_a2s) = hausdorff_to_spine(&raster, &g, &t).unwrap();
        let cell = raster.cell.0.max(raster.cell.1) / t.diameter();
        assert!(d_s2a <= 1.5 * cell, "{d_s2a} vs cell {cell}");
        assert!(d_a2s <= 3.0 * cell, "{d_a2s} vs cell {cell}");
    }

    #[test]
    fn resolution_check_flags_coarse_grids() {
        let (t, p, _) = weighted_setup(3, 1e-3);
        let z = subdivide(&t, p.weight()).unwrap();
        let g = build_spine(&z);
        assert!(verify_resolution(&g, &t, 300, 1.5).is_ok());
        let coarse = verify_resolution(&g, &t, 6, 1.5);
        assert!(matches!(
            coarse,
            Err(SamplerError::ResolutionTooCoarse { .. })
        ));
    }

    #[test]
    fn convergence_toward_spine() {
        let (t, _, s) = weighted_setup(3, 0.5);
        let w = WeightFunction::quadratic(&t);
        let z = subdivide(&t, &w).unwrap();
        let g = build_spine(&z);
        let mut last = f64::INFINITY;
        for delta in [0.3, 0.03] {
            let p = MomentParams::with_default_exponent(delta, w.clone()).unwrap();
            let (pts, _) = sample_amoeba(&s, &p, 250, 32, 8.0).unwrap();
            let raster = rasterize(&pts, &s, &p, &t, 200, 1.5);
            let (_, d_a2s) = hausdorff_to_spine(&raster, &g, &t).unwrap();
            assert!(d_a2s < last * 1.05, "not shrinking: {d_a2s} after {last}");
            last = d_a2s;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// The distance transform matches brute force on random grids.
        #[test]
        fn edt_matches_brute_force(
            seeds in proptest::collection::vec((0usize..20, 0usize..14), 1..12),
        ) {
            let t = LatticePolygon::standard_triangle(1);
            let mut r = AmoebaRaster::new(&t, 20);
            r.ny = 14; // exercise anisotropy in the index math
            r.bits = vec![0; (20 * 14 + 63) / 64];
            for &(i, j) in &seeds {
                r.set(i, j.min(13));
            }
            let edt = distance_transform(&r);
            let occ = r.occupied_cells();
            for j in 0..r.ny {
                for i in 0..r.nx {
                    let c = r.center(i, j);
                    let brute = occ
                        .iter()
                        .map(|&(a, b)| {
                            let o = r.center(a, b);
                            (c.0 - o.0).powi(2) + (c.1 - o.1).powi(2)
                        })
                        .fold(f64::INFINITY, f64::min);
                    prop_assert!((edt[j * r.nx + i] - brute).abs() < 1e-9);
                }
            }
        }
    }
}
