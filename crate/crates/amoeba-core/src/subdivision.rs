//! Regular subdivisions of a Newton polygon from rational weight functions.
//!
//! The subdivision induced by a weight `w` is the projection of the lower
//! convex hull of the lifted points `(m, w_m)`. "Lower" means the facet's
//! outward normal has negative last coordinate. Everything here is exact:
//! weights are `BigRational`, hull predicates are rational cross products,
//! and cone membership distinguishes boundary contact from strict interior.

use crate::lattice::{convex_hull, orient, LatticePoint, LatticePolygon};
use crate::rat::{rat_int, Rat};
use num::{BigInt, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivError {
    #[error("weight is not generic: a lower-hull facet has {} extreme vertices (support {})",
        .extreme.len(), format_points(.support))]
    NonGenericWeight {
        extreme: Vec<LatticePoint>,
        support: Vec<LatticePoint>,
    },
    #[error("cell [{}] is not a cell of the subdivision", format_points(.0))]
    NotACell([LatticePoint; 3]),
    #[error("cell [{}] has collinear vertices", format_points(.0))]
    DegenerateCell([LatticePoint; 3]),
    #[error("weight domain does not match the polygon: missing {}, extra {}",
        format_points(.missing), format_points(.extra))]
    DomainMismatch {
        missing: Vec<LatticePoint>,
        extra: Vec<LatticePoint>,
    },
    #[error("cells do not form a subdivision: {0}")]
    BadComplex(String),
}

fn format_points(pts: &[LatticePoint]) -> String {
    pts.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// An affine function `m ↦ l + <m, n>` on the lattice, with rational values.
/// These act on weight functions and form the kernel of the subdivision map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFunctional {
    pub l: Rat,
    pub n: (Rat, Rat),
}

impl AffineFunctional {
    pub fn zero() -> Self {
        Self {
            l: Rat::zero(),
            n: (Rat::zero(), Rat::zero()),
        }
    }

    pub fn eval(&self, m: LatticePoint) -> Rat {
        &self.l + &self.n.0 * rat_int(m.x) + &self.n.1 * rat_int(m.y)
    }

    pub fn neg(&self) -> Self {
        Self {
            l: -self.l.clone(),
            n: (-self.n.0.clone(), -self.n.1.clone()),
        }
    }
}

/// A rational weight on every lattice point of a fixed Newton polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    polygon: LatticePolygon,
    points: Vec<LatticePoint>,
    values: Vec<Rat>,
}

impl WeightFunction {
    /// Builds a weight from a closure evaluated on every lattice point.
    pub fn new(polygon: &LatticePolygon, f: impl Fn(LatticePoint) -> Rat) -> Self {
        let points = polygon.enumerate_points();
        let values = points.iter().map(|&m| f(m)).collect();
        Self {
            polygon: polygon.clone(),
            points,
            values,
        }
    }

    pub fn zero(polygon: &LatticePolygon) -> Self {
        Self::new(polygon, |_| Rat::zero())
    }

    /// The standard positive quadratic `w_m = m1² + m1·m2 + m2²`. Generic on
    /// every polygon used here; induces the standard simplicial decomposition.
    pub fn quadratic(polygon: &LatticePolygon) -> Self {
        Self::new(polygon, |m| rat_int(m.x * m.x + m.x * m.y + m.y * m.y))
    }

    /// Builds a weight from explicit pairs. The set of points must be exactly
    /// the lattice points of the polygon.
    pub fn from_pairs(
        polygon: &LatticePolygon,
        pairs: &[(LatticePoint, Rat)],
    ) -> Result<Self, SubdivError> {
        let domain = polygon.enumerate_points();
        let mut map: BTreeMap<LatticePoint, Rat> = BTreeMap::new();
        let mut extra = Vec::new();
        for (p, v) in pairs {
            if map.insert(*p, v.clone()).is_some() {
                return Err(SubdivError::BadComplex(format!(
                    "point {p} listed twice in the weight table"
                )));
            }
            if !domain.binary_search(p).is_ok() {
                extra.push(*p);
            }
        }
        let missing: Vec<LatticePoint> = domain
            .iter()
            .copied()
            .filter(|p| !map.contains_key(p))
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(SubdivError::DomainMismatch { missing, extra });
        }
        let values = domain.iter().map(|p| map[p].clone()).collect();
        Ok(Self {
            polygon: polygon.clone(),
            points: domain,
            values,
        })
    }

    pub fn polygon(&self) -> &LatticePolygon {
        &self.polygon
    }

    /// Domain points, sorted lexicographically.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn value(&self, m: LatticePoint) -> Option<&Rat> {
        self.points.binary_search(&m).ok().map(|i| &self.values[i])
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Returns a copy with one weight replaced. Panics if `m` is outside Δ.
    pub fn with_value(&self, m: LatticePoint, v: Rat) -> Self {
        let mut out = self.clone();
        let i = out
            .points
            .binary_search(&m)
            .unwrap_or_else(|_| panic!("{m} is not a lattice point of the polygon"));
        out.values[i] = v;
        out
    }

    /// `w + f`, the action of the affine lattice on weights.
    pub fn add_affine(&self, f: &AffineFunctional) -> Self {
        let mut out = self.clone();
        for (p, v) in out.points.iter().zip(out.values.iter_mut()) {
            *v += f.eval(*p);
        }
        out
    }

    /// Symbolic lexicographic perturbation with a concrete epsilon: point
    /// number k (in lex order) gains `ε^(k+1)`, with ε small enough that
    /// every hull predicate keeps its sign when nonzero and ties resolve by
    /// the lowest-index nonzero coefficient. The result is always generic,
    /// and its subdivision uses every lattice point.
    pub fn lex_perturbed(&self) -> Self {
        let r = self
            .points
            .iter()
            .map(|p| p.x.abs().max(p.y.abs()))
            .max()
            .unwrap_or(1)
            .max(1);
        // Hull predicates are integer combinations of weights whose
        // coefficients are doubled lattice areas, bounded by 8r².
        let b = BigInt::from(8 * r * r + 1);
        let n = BigInt::from(self.points.len() as i64);
        let d = self
            .values
            .iter()
            .fold(BigInt::from(1), |acc, v| lcm(&acc, v.denom()));
        let denom = BigInt::from(2) * &n * &b * &d + &n * &b + BigInt::from(2);
        let eps = Rat::new(BigInt::from(1), denom);
        let mut out = self.clone();
        let mut power = eps.clone();
        for v in out.values.iter_mut() {
            *v += &power;
            power *= &eps;
        }
        out
    }
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b / num::Integer::gcd(a, b)).abs()
}

/// A top cell of a subdivision: a lattice triangle, plus the lattice points
/// of the closed triangle that are not its vertices (these appear in no cell
/// and witness membership in the secondary, not partial secondary, fan).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    vertices: [LatticePoint; 3],
    unimodular: bool,
    skipped: Vec<LatticePoint>,
}

impl Cell {
    fn build(vertices: [LatticePoint; 3], domain: &[LatticePoint]) -> Self {
        let v = canonical_triangle(vertices);
        let skipped: Vec<LatticePoint> = domain
            .iter()
            .copied()
            .filter(|&p| p != v[0] && p != v[1] && p != v[2] && triangle_contains(&v, p))
            .collect();
        let area2 = orient(v[0], v[1], v[2]);
        let unimodular = area2 == 1;
        debug_assert_eq!(unimodular, skipped.is_empty());
        Self {
            vertices: v,
            unimodular,
            skipped,
        }
    }

    /// Counterclockwise, lexicographically smallest vertex first.
    pub fn vertices(&self) -> &[LatticePoint; 3] {
        &self.vertices
    }

    pub fn unimodular(&self) -> bool {
        self.unimodular
    }

    /// Lattice points of the closed cell that are not vertices.
    pub fn skipped(&self) -> &[LatticePoint] {
        &self.skipped
    }

    /// Twice the Euclidean area.
    pub fn area2(&self) -> i64 {
        i64::try_from(orient(self.vertices[0], self.vertices[1], self.vertices[2]))
            .expect("cell area fits in i64")
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        triangle_contains(&self.vertices, p)
    }

    /// Directed edges of the counterclockwise triangle.
    pub fn directed_edges(&self) -> [(LatticePoint, LatticePoint); 3] {
        let v = &self.vertices;
        [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]
    }
}

/// CCW triangle with the lexicographically smallest vertex first.
fn canonical_triangle(mut v: [LatticePoint; 3]) -> [LatticePoint; 3] {
    if orient(v[0], v[1], v[2]) < 0 {
        v.swap(1, 2);
    }
    let k = (0..3).min_by_key(|&i| v[i]).expect("three vertices");
    [v[k], v[(k + 1) % 3], v[(k + 2) % 3]]
}

fn triangle_contains(v: &[LatticePoint; 3], p: LatticePoint) -> bool {
    orient(v[0], v[1], p) >= 0 && orient(v[1], v[2], p) >= 0 && orient(v[2], v[0], p) >= 0
}

/// Whether `Z ∈ Z̃` (partial secondary fan: unimodular triangulation on all
/// lattice points) or only `Z ∈ Ẑ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    PartialSecondary,
    SecondaryOnly,
}

/// Position of a weight class relative to the closed secondary cone τ_Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeMembership {
    /// `Z_w = Z` exactly.
    Interior,
    /// On the boundary of τ_Z: some lifted point off a cell is coplanar with
    /// that cell, so the hull degenerates but no inequality fails.
    Boundary,
    Outside,
}

impl ConeMembership {
    pub fn is_interior(self) -> bool {
        matches!(self, ConeMembership::Interior)
    }
}

/// A regular subdivision of a Newton polygon into lattice triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    polygon: LatticePolygon,
    cells: Vec<Cell>,
    all_unimodular: bool,
    uses_all_points: bool,
    is_triangulation: bool,
}

impl Subdivision {
    /// Assembles a subdivision from explicit triangles and checks the complex
    /// combinatorially: cells tile the polygon's area, every edge is shared
    /// by two cells or lies on the boundary, and no cell vertex sits inside
    /// another cell or on the interior of its edge.
    pub fn from_cells(
        polygon: &LatticePolygon,
        triangles: &[[LatticePoint; 3]],
    ) -> Result<Self, SubdivError> {
        let domain = polygon.enumerate_points();
        let mut triples: Vec<[LatticePoint; 3]> = Vec::with_capacity(triangles.len());
        for t in triangles {
            if orient(t[0], t[1], t[2]) == 0 {
                return Err(SubdivError::DegenerateCell(*t));
            }
            let c = canonical_triangle(*t);
            for v in c {
                if domain.binary_search(&v).is_err() {
                    return Err(SubdivError::BadComplex(format!(
                        "cell vertex {v} is not a lattice point of the polygon"
                    )));
                }
            }
            triples.push(c);
        }
        triples.sort();
        for pair in triples.windows(2) {
            if pair[0] == pair[1] {
                return Err(SubdivError::BadComplex(format!(
                    "cell [{}] listed twice",
                    format_points(&pair[0])
                )));
            }
        }
        if triples.is_empty() {
            return Err(SubdivError::BadComplex("no cells".into()));
        }
        let cells: Vec<Cell> = triples.iter().map(|t| Cell::build(*t, &domain)).collect();

        let total: i64 = cells.iter().map(|c| c.area2()).sum();
        if total != polygon.area2() {
            return Err(SubdivError::BadComplex(format!(
                "cells cover twice-area {total}, polygon has {}",
                polygon.area2()
            )));
        }

        // Every directed edge at most once; undirected edges twice (interior)
        // or once lying on the polygon boundary.
        let mut directed: HashSet<(LatticePoint, LatticePoint)> = HashSet::new();
        let mut undirected: HashMap<(LatticePoint, LatticePoint), usize> = HashMap::new();
        for c in &cells {
            for (a, b) in c.directed_edges() {
                if !directed.insert((a, b)) {
                    return Err(SubdivError::BadComplex(format!(
                        "edge {a} -> {b} appears in two cells with the same orientation"
                    )));
                }
                *undirected.entry(undirected_key(a, b)).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &undirected {
            match count {
                1 => {
                    if !on_polygon_boundary(polygon, a, b) {
                        return Err(SubdivError::BadComplex(format!(
                            "interior edge {a} -- {b} bounds only one cell"
                        )));
                    }
                }
                2 => {}
                k => {
                    return Err(SubdivError::BadComplex(format!(
                        "edge {a} -- {b} bounds {k} cells"
                    )));
                }
            }
        }

        // No cell vertex inside another cell or strictly inside its edge.
        let vertex_set: BTreeSet<LatticePoint> =
            cells.iter().flat_map(|c| c.vertices.iter().copied()).collect();
        for c in &cells {
            for &p in &vertex_set {
                if c.vertices.contains(&p) {
                    continue;
                }
                if c.contains(p) {
                    return Err(SubdivError::BadComplex(format!(
                        "vertex {p} lies inside cell [{}]",
                        format_points(&c.vertices)
                    )));
                }
            }
        }

        let all_unimodular = cells.iter().all(|c| c.unimodular);
        let uses_all_points = domain.iter().all(|p| vertex_set.contains(p));
        Ok(Self {
            polygon: polygon.clone(),
            cells,
            all_unimodular,
            uses_all_points,
            is_triangulation: true,
        })
    }

    pub fn polygon(&self) -> &LatticePolygon {
        &self.polygon
    }

    /// Cells sorted by their canonical vertex triple.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn all_unimodular(&self) -> bool {
        self.all_unimodular
    }

    /// Whether every lattice point of the polygon is a vertex of some cell.
    pub fn uses_all_points(&self) -> bool {
        self.uses_all_points
    }

    pub fn is_triangulation(&self) -> bool {
        self.is_triangulation
    }

    pub fn classify(&self) -> Classification {
        if self.all_unimodular && self.uses_all_points {
            Classification::PartialSecondary
        } else {
            Classification::SecondaryOnly
        }
    }

    pub fn find_cell(&self, vertices: [LatticePoint; 3]) -> Option<usize> {
        let c = canonical_triangle(vertices);
        self.cells.binary_search_by(|cell| cell.vertices.cmp(&c)).ok()
    }

    /// Undirected edge incidence: canonical vertex pair to sorted cell indices.
    pub fn edge_incidence(&self) -> BTreeMap<(LatticePoint, LatticePoint), Vec<usize>> {
        let mut map: BTreeMap<(LatticePoint, LatticePoint), Vec<usize>> = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            for (a, b) in c.directed_edges() {
                map.entry(undirected_key(a, b)).or_default().push(i);
            }
        }
        map
    }
}

fn undirected_key(a: LatticePoint, b: LatticePoint) -> (LatticePoint, LatticePoint) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Whether the segment `a b` lies inside one boundary edge of the polygon.
fn on_polygon_boundary(polygon: &LatticePolygon, a: LatticePoint, b: LatticePoint) -> bool {
    polygon.edges().iter().any(|&(u, v)| {
        orient(u, v, a) == 0
            && orient(u, v, b) == 0
            && a.sub(u).dot(v.sub(u)) >= 0
            && a.sub(v).dot(u.sub(v)) >= 0
            && b.sub(u).dot(v.sub(u)) >= 0
            && b.sub(v).dot(u.sub(v)) >= 0
    })
}

struct Lift<'a> {
    points: &'a [LatticePoint],
    values: &'a [Rat],
    index: HashMap<LatticePoint, usize>,
}

impl<'a> Lift<'a> {
    fn new(w: &'a WeightFunction) -> Self {
        let index = w
            .points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        Self {
            points: &w.points,
            values: &w.values,
            index,
        }
    }

    /// Normal of the plane through lifted points a, b, c, scaled so the last
    /// coordinate is the (positive) doubled projected area.
    fn normal(&self, a: usize, b: usize, c: usize) -> (Rat, Rat, Rat) {
        let (pa, pb, pc) = (self.points[a], self.points[b], self.points[c]);
        let d1 = (
            rat_int(pb.x - pa.x),
            rat_int(pb.y - pa.y),
            &self.values[b] - &self.values[a],
        );
        let d2 = (
            rat_int(pc.x - pa.x),
            rat_int(pc.y - pa.y),
            &self.values[c] - &self.values[a],
        );
        (
            &d1.1 * &d2.2 - &d1.2 * &d2.1,
            &d1.2 * &d2.0 - &d1.0 * &d2.2,
            &d1.0 * &d2.1 - &d1.1 * &d2.0,
        )
    }

    /// Signed height of lifted point p against the plane of (a, normal n):
    /// negative means strictly below.
    fn height(&self, n: &(Rat, Rat, Rat), a: usize, p: usize) -> Rat {
        let (pa, pp) = (self.points[a], self.points[p]);
        &n.0 * rat_int(pp.x - pa.x)
            + &n.1 * rat_int(pp.y - pa.y)
            + &n.2 * (&self.values[p] - &self.values[a])
    }
}

/// Computes the regular subdivision induced by `w`: lower-hull facets of the
/// lifted point set, gift-wrapped from the polygon boundary inwards.
pub fn subdivide(
    polygon: &LatticePolygon,
    w: &WeightFunction,
) -> Result<Subdivision, SubdivError> {
    check_domain(polygon, w)?;
    let lift = Lift::new(w);
    let mut done: HashSet<(LatticePoint, LatticePoint)> = HashSet::new();
    let mut queue: VecDeque<(LatticePoint, LatticePoint)> = VecDeque::new();

    // Boundary seeds: the 2D lower hull of the lifted points along each
    // polygon edge consists of genuine hull edges; the facet to find lies on
    // the interior side (left of the CCW direction).
    for (a, b) in polygon.edges() {
        let dir = b.sub(a).primitive();
        let len = b.sub(a).content();
        let mut hull: Vec<(i64, usize)> = Vec::new();
        for j in 0..=len {
            let p = LatticePoint::new(a.x + j * dir.x, a.y + j * dir.y);
            let ip = lift.index[&p];
            while hull.len() >= 2 {
                let (j0, i0) = hull[hull.len() - 2];
                let (j1, i1) = hull[hull.len() - 1];
                // Strict cup: keep only extreme vertices of the 2D hull.
                let turn = rat_int(j1 - j0) * (&lift.values[ip] - &lift.values[i0])
                    - (&lift.values[i1] - &lift.values[i0]) * rat_int(j - j0);
                if turn <= Rat::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((j, ip));
        }
        for seg in hull.windows(2) {
            let (p, q) = (lift.points[seg[0].1], lift.points[seg[1].1]);
            done.insert((q, p));
            queue.push_back((p, q));
        }
    }

    let mut triples: BTreeSet<[LatticePoint; 3]> = BTreeSet::new();
    while let Some((a, b)) = queue.pop_front() {
        if done.contains(&(a, b)) {
            continue;
        }
        let (ia, ib) = (lift.index[&a], lift.index[&b]);
        let ab = b.sub(a);
        // Pivot: among points strictly left of a -> b, find the lowest plane.
        let mut best: Option<usize> = None;
        let mut best_normal: Option<(Rat, Rat, Rat)> = None;
        for ic in 0..lift.points.len() {
            if ab.cross(lift.points[ic].sub(a)) <= 0 {
                continue;
            }
            match (&best, &best_normal) {
                (None, _) => {
                    best = Some(ic);
                    best_normal = Some(lift.normal(ia, ib, ic));
                }
                (Some(_), Some(n)) => {
                    if lift.height(n, ia, ic) < Rat::zero() {
                        best = Some(ic);
                        best_normal = Some(lift.normal(ia, ib, ic));
                    }
                }
                _ => unreachable!(),
            }
        }
        let n = best_normal.expect("frontier edge has interior points on its left");
        debug_assert!(best.is_some());
        let support: Vec<LatticePoint> = (0..lift.points.len())
            .filter(|&ip| lift.height(&n, ia, ip).is_zero())
            .map(|ip| lift.points[ip])
            .collect();
        let extreme = convex_hull(&support);
        if extreme.len() != 3 {
            return Err(SubdivError::NonGenericWeight {
                extreme,
                support,
            });
        }
        let tri = [extreme[0], extreme[1], extreme[2]];
        triples.insert(tri);
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            done.insert((u, v));
            if !done.contains(&(v, u)) {
                queue.push_back((v, u));
            }
        }
        debug_assert!(
            (0..3).any(|k| (tri[k], tri[(k + 1) % 3]) == (a, b)),
            "frontier edge must bound its facet"
        );
    }

    let cells: Vec<[LatticePoint; 3]> = triples.into_iter().collect();
    let sub = Subdivision::from_cells(polygon, &cells)
        .expect("lower-hull facets form a valid subdivision");
    Ok(sub)
}

fn check_domain(polygon: &LatticePolygon, w: &WeightFunction) -> Result<(), SubdivError> {
    let domain = polygon.enumerate_points();
    if w.points == domain {
        return Ok(());
    }
    let have: BTreeSet<LatticePoint> = w.points.iter().copied().collect();
    let want: BTreeSet<LatticePoint> = domain.iter().copied().collect();
    Err(SubdivError::DomainMismatch {
        missing: want.difference(&have).copied().collect(),
        extra: have.difference(&want).copied().collect(),
    })
}

/// The affine function agreeing with `w` on the three cell vertices.
pub fn interpolant(vertices: &[LatticePoint; 3], w: &WeightFunction) -> AffineFunctional {
    let v = vertices;
    let get = |p: LatticePoint| -> Rat {
        w.value(p)
            .unwrap_or_else(|| panic!("{p} is not in the weight domain"))
            .clone()
    };
    let (w0, w1, w2) = (get(v[0]), get(v[1]), get(v[2]));
    let det = rat_int(i64::try_from(orient(v[0], v[1], v[2])).expect("small determinant"));
    assert!(!det.is_zero(), "interpolant of a degenerate triangle");
    let d1 = &w1 - &w0;
    let d2 = &w2 - &w0;
    let a = (&d1 * rat_int(v[2].y - v[0].y) - &d2 * rat_int(v[1].y - v[0].y)) / &det;
    let b = (rat_int(v[1].x - v[0].x) * &d2 - rat_int(v[2].x - v[0].x) * &d1) / &det;
    let l = &w0 - &a * rat_int(v[0].x) - &b * rat_int(v[0].y);
    AffineFunctional { l, n: (a, b) }
}

/// Normalizes `w` by the affine function of one of its own cells: the result
/// vanishes on the cell and is nonnegative everywhere (positive off the
/// cell's supporting plane), so `δ^w` leaves exactly the cell's monomials at
/// unit scale as δ → 0.
pub fn affine_normalize(
    w: &WeightFunction,
    cell: [LatticePoint; 3],
) -> Result<WeightFunction, SubdivError> {
    let sub = subdivide(&w.polygon, w)?;
    if sub.find_cell(cell).is_none() {
        return Err(SubdivError::NotACell(canonical_triangle(cell)));
    }
    let ell = interpolant(&canonical_triangle(cell), w);
    Ok(w.add_affine(&ell.neg()))
}

/// Tri-state membership of `[w]` in the secondary cone τ_Z.
///
/// For each cell with interpolant ℓ: a point with `w_m < ℓ(m)` puts the lift
/// below the cell's plane (outside the closed cone); `w_m = ℓ(m)` at a point
/// off the closed cell flattens the hull (boundary of the cone); otherwise
/// the subdivision of `w` is exactly `Z`. Equality at a skipped point inside
/// the closed cell is how non-triangulating cells arise and stays interior.
pub fn cone_contains(z: &Subdivision, w: &WeightFunction) -> ConeMembership {
    assert_eq!(
        z.polygon, w.polygon,
        "subdivision and weight refer to different polygons"
    );
    let mut boundary = false;
    for cell in z.cells() {
        let ell = interpolant(cell.vertices(), w);
        for (p, wp) in w.points.iter().zip(w.values.iter()) {
            if cell.vertices().contains(p) {
                continue;
            }
            let diff = wp - ell.eval(*p);
            if diff.is_negative() {
                return ConeMembership::Outside;
            }
            if diff.is_zero() && !cell.contains(*p) {
                boundary = true;
            }
        }
    }
    if boundary {
        ConeMembership::Boundary
    } else {
        ConeMembership::Interior
    }
}
