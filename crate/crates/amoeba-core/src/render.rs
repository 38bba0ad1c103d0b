//! Deterministic SVG rendering of polygons, subdivisions, spines, and
//! amoeba rasters.
//!
//! One fixed scale (120 SVG units per lattice unit) and a half-unit margin
//! derive the viewBox from the polygon bounds alone, so overlays of the same
//! polygon share a frame. The vertical axis is flipped so lattice
//! coordinates read the usual way. Layers stack in a fixed z-order: shaded
//! raster, thin subdivision segments, the polygon outline, thick spine
//! edges. Identical inputs produce byte-identical output: every coordinate
//! prints with three decimals and every collection is emitted in sorted or
//! stored order, never hash order.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::lattice::{LatticePoint, LatticePolygon};
use crate::rat::rat_to_f64;
use crate::sampler::AmoebaRaster;
use crate::spine::SpineGraph;
use crate::subdivision::Subdivision;

/// SVG units per lattice unit.
const SCALE: f64 = 120.0;
/// Margin around the polygon bounds, in lattice units.
const MARGIN: f64 = 0.5;

/// World-to-SVG frame: x shifts, y flips.
struct Frame {
    x0: f64,
    y1: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * SCALE, (self.y1 - y) * SCALE)
    }
}

fn fmt(v: f64) -> String {
    // Three decimals resolve one part in 10^3 of a lattice-unit pixel cell;
    // raster cells at practical resolutions stay two orders coarser.
    let s = format!("{:.3}", v);
    // "-0.000" and "0.000" are the same coordinate; pick one spelling.
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn push_line(out: &mut String, frame: &Frame, a: (f64, f64), b: (f64, f64)) {
    let (x1, y1) = frame.map(a.0, a.1);
    let (x2, y2) = frame.map(b.0, b.1);
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        fmt(x1),
        fmt(y1),
        fmt(x2),
        fmt(y2)
    );
}

/// Renders the polygon outline plus any of the three overlay layers into a
/// standalone SVG document.
///
/// The viewBox depends on the polygon bounds only. Layer z-order, bottom to
/// top: raster (shaded runs, one rect per maximal occupied row run),
/// subdivision (thin gray segments, each 1-simplex once), polygon outline,
/// spine (thick dark edges in stored order). Output is byte-identical for
/// equal inputs.
pub fn render_svg(
    polygon: &LatticePolygon,
    subdivision: Option<&Subdivision>,
    spine: Option<&SpineGraph>,
    raster: Option<&AmoebaRaster>,
) -> String {
    let (lo, hi) = polygon.bounding_box();
    let frame = Frame {
        x0: lo.x as f64 - MARGIN,
        y1: hi.y as f64 + MARGIN,
    };
    let w = ((hi.x - lo.x) as f64 + 2.0 * MARGIN) * SCALE;
    let h = ((hi.y - lo.y) as f64 + 2.0 * MARGIN) * SCALE;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}">"#,
        fmt(w),
        fmt(h)
    );

    if let Some(r) = raster {
        let _ = writeln!(out, r##"<g fill="#9db2d8">"##);
        for j in 0..r.ny {
            let mut i = 0;
            while i < r.nx {
                if !r.get(i, j) {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < r.nx && r.get(i, j) {
                    i += 1;
                }
                let x = r.origin.0 + start as f64 * r.cell.0;
                let y_top = r.origin.1 + (j + 1) as f64 * r.cell.1;
                let (sx, sy) = frame.map(x, y_top);
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                    fmt(sx),
                    fmt(sy),
                    fmt((i - start) as f64 * r.cell.0 * SCALE),
                    fmt(r.cell.1 * SCALE)
                );
            }
        }
        out.push_str("</g>\n");
    }

    if let Some(z) = subdivision {
        let mut segments: BTreeSet<(LatticePoint, LatticePoint)> = BTreeSet::new();
        for cell in z.cells() {
            for (a, b) in cell.directed_edges() {
                let (p, q) = if a <= b { (a, b) } else { (b, a) };
                segments.insert((p, q));
            }
        }
        let _ = writeln!(out, r##"<g stroke="#9a9a9a" stroke-width="1.5" fill="none">"##);
        for (a, b) in segments {
            push_line(
                &mut out,
                &frame,
                (a.x as f64, a.y as f64),
                (b.x as f64, b.y as f64),
            );
        }
        out.push_str("</g>\n");
    }

    let _ = writeln!(out, r##"<g stroke="#000000" stroke-width="3" fill="none">"##);
    let mut d = String::new();
    for (k, v) in polygon.vertices().iter().enumerate() {
        let (sx, sy) = frame.map(v.x as f64, v.y as f64);
        let _ = write!(
            d,
            "{}{} {} ",
            if k == 0 { "M" } else { "L" },
            fmt(sx),
            fmt(sy)
        );
    }
    d.push('Z');
    let _ = writeln!(out, r#"<path d="{}"/>"#, d);
    out.push_str("</g>\n");

    if let Some(g) = spine {
        let _ = writeln!(
            out,
            r##"<g stroke="#16308a" stroke-width="5" stroke-linecap="round" fill="none">"##
        );
        for &(u, v) in g.edges() {
            let pu = &g.vertices()[u].position;
            let pv = &g.vertices()[v].position;
            push_line(
                &mut out,
                &frame,
                (rat_to_f64(&pu.0), rat_to_f64(&pu.1)),
                (rat_to_f64(&pv.0), rat_to_f64(&pv.1)),
            );
        }
        out.push_str("</g>\n");
    }

    out.push_str("</svg>\n");
    out
}
