//! Convex lattice polygons and their toric data.
//!
//! Coordinates are `i64` throughout; every predicate is exact (cross products
//! are widened to `i128`). A [`LatticePolygon`] is always stored in canonical
//! form: counterclockwise, starting at the lexicographically smallest vertex,
//! with no redundant (collinear) vertices.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(LatticePoint),
    #[error("vertices {0}, {1}, {2} are collinear; drop the middle one")]
    CollinearVertices(LatticePoint, LatticePoint, LatticePoint),
    #[error("vertex list is clockwise; reverse it")]
    ClockwiseOrientation,
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(LatticePoint),
}

/// A point of the rank-2 lattice `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Cross product `self × other`, exact in `i128`.
    pub fn cross(self, other: LatticePoint) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }

    pub fn dot(self, other: LatticePoint) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128
    }

    pub fn sub(self, other: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x + other.x, self.y + other.y)
    }

    /// gcd of the coordinate absolute values; 0 only for the origin.
    pub fn content(self) -> i64 {
        gcd(self.x.unsigned_abs(), self.y.unsigned_abs()) as i64
    }

    /// The primitive vector in the same direction. Panics on the origin.
    pub fn primitive(self) -> LatticePoint {
        let g = self.content();
        assert!(g > 0, "zero vector has no direction");
        LatticePoint::new(self.x / g, self.y / g)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Orientation of the triangle `a b c`: positive if counterclockwise.
pub fn orient(a: LatticePoint, b: LatticePoint, c: LatticePoint) -> i128 {
    b.sub(a).cross(c.sub(a))
}

/// A convex lattice polygon (a Newton polygon).
///
/// Invariants enforced by the constructor: at least 3 vertices, strictly
/// convex corners, counterclockwise order, first vertex lexicographically
/// smallest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolygon {
    vertices: Vec<LatticePoint>,
}

impl LatticePolygon {
    pub fn new(vertices: Vec<LatticePoint>) -> Result<Self, GeomError> {
        if vertices.len() < 3 {
            return Err(GeomError::TooFewVertices(vertices.len()));
        }
        {
            let mut sorted = vertices.clone();
            sorted.sort();
            for pair in sorted.windows(2) {
                if pair[0] == pair[1] {
                    return Err(GeomError::DuplicateVertex(pair[0]));
                }
            }
        }
        let n = vertices.len();
        let mut area2: i128 = 0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            area2 += a.cross(b);
        }
        if area2 < 0 {
            return Err(GeomError::ClockwiseOrientation);
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let turn = orient(a, b, c);
            if turn == 0 {
                return Err(GeomError::CollinearVertices(a, b, c));
            }
            if turn < 0 {
                return Err(GeomError::NotConvex(b));
            }
        }
        // Canonical rotation: lexicographically smallest vertex first.
        let start = (0..n)
            .min_by_key(|&i| vertices[i])
            .expect("nonempty vertex list");
        let mut vs = Vec::with_capacity(n);
        vs.extend_from_slice(&vertices[start..]);
        vs.extend_from_slice(&vertices[..start]);
        Ok(Self { vertices: vs })
    }

    /// The standard triangle `conv{(0,0),(d,0),(0,d)}`, the Newton polygon of
    /// plane curves of degree `d`.
    pub fn standard_triangle(d: i64) -> Self {
        assert!(d >= 1);
        Self::new(vec![
            LatticePoint::new(0, 0),
            LatticePoint::new(d, 0),
            LatticePoint::new(0, d),
        ])
        .expect("standard triangle is valid")
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    /// Edges in counterclockwise order, each as (tail, head).
    pub fn edges(&self) -> Vec<(LatticePoint, LatticePoint)> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[i], self.vertices[(i + 1) % n]))
            .collect()
    }

    /// Twice the Euclidean area (the lattice-normalized area), via shoelace.
    pub fn area2(&self) -> i64 {
        let n = self.vertices.len();
        let mut a: i128 = 0;
        for i in 0..n {
            a += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        i64::try_from(a).expect("area fits in i64")
    }

    pub fn bounding_box(&self) -> (LatticePoint, LatticePoint) {
        let xs = self.vertices.iter().map(|p| p.x);
        let ys = self.vertices.iter().map(|p| p.y);
        (
            LatticePoint::new(xs.clone().min().unwrap(), ys.clone().min().unwrap()),
            LatticePoint::new(xs.max().unwrap(), ys.max().unwrap()),
        )
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                let d = a.sub(*b);
                let dd = (d.x as f64).hypot(d.y as f64);
                if dd > best {
                    best = dd;
                }
            }
        }
        best
    }

    /// Whether `p` lies in the closed polygon.
    pub fn contains(&self, p: LatticePoint) -> bool {
        self.edges().iter().all(|&(a, b)| orient(a, b, p) >= 0)
    }

    /// Whether `p` lies strictly inside.
    pub fn contains_interior(&self, p: LatticePoint) -> bool {
        self.edges().iter().all(|&(a, b)| orient(a, b, p) > 0)
    }

    /// Closed containment for a real point, with tolerance `eps` in units of
    /// the edge normal length. Used for raster masks only.
    pub fn contains_f64(&self, x: f64, y: f64, eps: f64) -> bool {
        self.edges().iter().all(|&(a, b)| {
            let ex = (b.x - a.x) as f64;
            let ey = (b.y - a.y) as f64;
            let px = x - a.x as f64;
            let py = y - a.y as f64;
            ex * py - ey * px >= -eps * ex.hypot(ey)
        })
    }

    /// All lattice points of the closed polygon, sorted lexicographically.
    pub fn enumerate_points(&self) -> Vec<LatticePoint> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                let p = LatticePoint::new(x, y);
                if self.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Lattice points strictly inside, sorted lexicographically.
    pub fn interior_points(&self) -> Vec<LatticePoint> {
        self.enumerate_points()
            .into_iter()
            .filter(|&p| self.contains_interior(p))
            .collect()
    }

    /// Lattice points on the boundary, sorted lexicographically.
    pub fn boundary_points(&self) -> Vec<LatticePoint> {
        self.enumerate_points()
            .into_iter()
            .filter(|&p| !self.contains_interior(p))
            .collect()
    }

    /// Index of the polygon edge whose closed segment contains `p`, if any.
    pub fn edge_containing(&self, p: LatticePoint) -> Option<usize> {
        self.edges().iter().enumerate().find_map(|(i, &(a, b))| {
            (orient(a, b, p) == 0
                && p.sub(a).dot(b.sub(a)) >= 0
                && p.sub(b).dot(a.sub(b)) >= 0)
                .then_some(i)
        })
    }

    /// The normal fan of the polygon together with the support numbers of the
    /// associated ample divisor.
    ///
    /// Convention: the ray attached to an edge is the primitive functional
    /// minimized exactly on that edge (the inward normal), and
    /// `l = -min_{m in Δ} <m, ray>`, so `m in Δ` iff `<m, ray> + l >= 0` for
    /// every ray.
    pub fn normal_fan(&self) -> NormalFan {
        let rays = self
            .edges()
            .iter()
            .map(|&(a, b)| {
                let e = b.sub(a);
                // Rotating the edge direction left gives the inward normal for
                // a counterclockwise polygon.
                let ray = LatticePoint::new(-e.y, e.x).primitive();
                let l = -(a.dot(ray));
                let l = i64::try_from(l).expect("support number fits in i64");
                NormalRay { ray, l }
            })
            .collect();
        NormalFan { rays }
    }
}

/// Strict convex hull of a point set: counterclockwise, lexicographically
/// smallest vertex first, non-extreme collinear points dropped. Degenerate
/// inputs return what extreme points exist (0, 1, or the 2 segment endpoints).
pub fn convex_hull(points: &[LatticePoint]) -> Vec<LatticePoint> {
    let mut pts: Vec<LatticePoint> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let chain = |iter: &mut dyn Iterator<Item = LatticePoint>| -> Vec<LatticePoint> {
        let mut h: Vec<LatticePoint> = Vec::new();
        for q in iter {
            while h.len() >= 2 && orient(h[h.len() - 2], h[h.len() - 1], q) <= 0 {
                h.pop();
            }
            h.push(q);
        }
        h
    };
    let mut lower = chain(&mut pts.iter().copied());
    let mut upper = chain(&mut pts.iter().rev().copied());
    lower.pop();
    upper.pop();
    if lower.is_empty() {
        // All collinear; the chains collapsed to single endpoints.
        return vec![pts[0], *pts.last().unwrap()];
    }
    lower.extend(upper);
    lower
}

/// One ray of a normal fan with its support number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalRay {
    pub ray: LatticePoint,
    pub l: i64,
}

/// The complete normal fan of a convex lattice polygon: one ray per edge, in
/// counterclockwise edge order; the 2-dimensional cones sit between cyclically
/// adjacent rays and correspond to the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFan {
    pub rays: Vec<NormalRay>,
}

impl NormalFan {
    /// Whether the monomial `m`, viewed as a section of the polygon's ample
    /// line bundle, extends over the whole toric surface: the divisor
    /// `div(s_m) + D_Δ` is effective iff `<m, ray> + l >= 0` on every ray.
    pub fn effective(&self, m: LatticePoint) -> bool {
        self.rays.iter().all(|r| m.dot(r.ray) + r.l as i128 >= 0)
    }
}
