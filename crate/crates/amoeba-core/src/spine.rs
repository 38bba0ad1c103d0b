//! The limiting spine graph of a subdivision.
//!
//! Each top cell contributes the barycentric "Y": its barycenter joined to
//! the midpoints of its three 1-faces. Midpoints shared between adjacent
//! cells are merged, so the union is the spine Γ_Z whose bounded faces
//! predict the amoeba's holes and whose degree-1 ends predict its legs.
//! Positions are exact rationals; floats appear only at rasterization.

use crate::lattice::{LatticePoint, LatticePolygon};
use crate::rat::{rat, rat_int, Rat};
use crate::subdivision::Subdivision;
use num::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    /// Barycenter of a 2-cell; degree 3.
    TrivalentCenter,
    /// Midpoint of a 1-simplex shared by two cells; degree 2.
    EdgeBarycenter,
    /// Midpoint of a 1-simplex on the polygon boundary; degree 1. These are
    /// the ends of the amoeba's legs.
    BoundaryEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpineVertex {
    pub position: (Rat, Rat),
    pub kind: VertexKind,
}

/// A planar embedded graph: the spine Γ_Z.
#[derive(Debug, Clone, PartialEq)]
pub struct SpineGraph {
    vertices: Vec<SpineVertex>,
    edges: Vec<(usize, usize)>,
}

impl SpineGraph {
    pub fn new(vertices: Vec<SpineVertex>, edges: Vec<(usize, usize)>) -> Self {
        Self { vertices, edges }
    }

    pub fn vertices(&self) -> &[SpineVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Indices of the 3-valent vertices v(Γ).
    pub fn trivalent_vertices(&self) -> Vec<usize> {
        self.of_kind(VertexKind::TrivalentCenter)
    }

    /// Indices of interior 1-simplex barycenters s(Γ).
    pub fn interior_barycenters(&self) -> Vec<usize> {
        self.of_kind(VertexKind::EdgeBarycenter)
    }

    /// Indices of boundary 1-simplex barycenters e(Γ), the leg ends.
    pub fn boundary_ends(&self) -> Vec<usize> {
        self.of_kind(VertexKind::BoundaryEnd)
    }

    fn of_kind(&self, kind: VertexKind) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn connected_components(&self) -> usize {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }

    /// First Betti number E − V + C: the number of bounded faces of the
    /// planar embedding, hence the expected hole count of the amoeba.
    pub fn bounded_faces(&self) -> usize {
        self.edges.len() + self.connected_components() - self.vertices.len()
    }

    /// Checks the degree conditions of the three vertex kinds.
    pub fn validate(&self) -> Result<(), String> {
        for (i, v) in self.vertices.iter().enumerate() {
            let want = match v.kind {
                VertexKind::TrivalentCenter => 3,
                VertexKind::EdgeBarycenter => 2,
                VertexKind::BoundaryEnd => 1,
            };
            let got = self.degree(i);
            if got != want {
                return Err(format!(
                    "vertex {i} ({:?}) has degree {got}, expected {want}",
                    v.kind
                ));
            }
        }
        for &(a, b) in &self.edges {
            if a >= self.vertices.len() || b >= self.vertices.len() {
                return Err(format!("edge ({a}, {b}) out of range"));
            }
        }
        Ok(())
    }
}

fn midpoint(a: LatticePoint, b: LatticePoint) -> (Rat, Rat) {
    (rat(a.x + b.x, 2), rat(a.y + b.y, 2))
}

fn barycenter(v: &[LatticePoint; 3]) -> (Rat, Rat) {
    (
        rat(v[0].x + v[1].x + v[2].x, 3),
        rat(v[0].y + v[1].y + v[2].y, 3),
    )
}

/// Builds Γ_Z: 1-simplex barycenters first (in sorted vertex-pair order),
/// then one trivalent center per cell (in cell order), each joined to its
/// three 1-face barycenters. Non-unimodular cells get the same rule applied
/// to their vertex triangle.
pub fn build_spine(z: &Subdivision) -> SpineGraph {
    let incidence = z.edge_incidence();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut simplex_vertex: BTreeMap<(LatticePoint, LatticePoint), usize> = BTreeMap::new();
    for (&(a, b), cells) in &incidence {
        let kind = if cells.len() == 1 {
            VertexKind::BoundaryEnd
        } else {
            VertexKind::EdgeBarycenter
        };
        simplex_vertex.insert((a, b), vertices.len());
        vertices.push(SpineVertex {
            position: midpoint(a, b),
            kind,
        });
    }
    for cell in z.cells() {
        let center = vertices.len();
        vertices.push(SpineVertex {
            position: barycenter(cell.vertices()),
            kind: VertexKind::TrivalentCenter,
        });
        for (a, b) in cell.directed_edges() {
            let key = if a <= b { (a, b) } else { (b, a) };
            edges.push((center, simplex_vertex[&key]));
        }
    }
    let g = SpineGraph { vertices, edges };
    debug_assert!(g.validate().is_ok());
    g
}

/// Counts the leg ends on each boundary edge of the polygon, indexed like
/// `polygon.edges()`. Every BoundaryEnd lies in the relative interior of
/// exactly one polygon edge.
pub fn legs_per_polygon_edge(g: &SpineGraph, polygon: &LatticePolygon) -> Vec<usize> {
    let edges = polygon.edges();
    let mut counts = vec![0usize; edges.len()];
    for i in g.boundary_ends() {
        let (px, py) = &g.vertices()[i].position;
        let on = edges.iter().position(|&(u, v)| {
            let ex = rat_int(v.x - u.x);
            let ey = rat_int(v.y - u.y);
            let dx = px - rat_int(u.x);
            let dy = py - rat_int(u.y);
            let cross = &ex * &dy - &ey * &dx;
            if !cross.is_zero() {
                return false;
            }
            let t = &ex * &dx + &ey * &dy;
            !t.is_negative() && t <= &ex * &ex + &ey * &ey
        });
        let on = on.expect("boundary end lies on a polygon edge");
        counts[on] += 1;
    }
    counts
}
