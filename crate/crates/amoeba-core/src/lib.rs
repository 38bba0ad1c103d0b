//! Amoebas of algebraic curves in toric surfaces.
//!
//! A Laurent polynomial `s` with Newton polygon `Δ` cuts a curve in the toric
//! surface of `Δ`. Its image under a moment map is an amoeba; as the section
//! coefficients approach a large complex limit (governed by a weight function
//! on the lattice points of `Δ` and a parameter `δ → 0`), the amoeba collapses
//! onto the spine graph of the regular subdivision induced by the weights.
//!
//! The crate covers the whole pipeline:
//!
//! * [`lattice`]: exact lattice polygons, point enumeration, normal fans.
//! * [`subdivision`]: regular subdivisions from lower hulls of lifted weights,
//!   secondary-cone membership, affine normalization.
//! * [`spine`]: the limit graph built from cell and edge barycenters.
//! * [`moment`]: weighted moment maps evaluated through log-sum-exp, active
//!   simplices and localized maps.
//! * [`roots`], [`sampler`]: slice-wise curve sampling with a simultaneous
//!   root finder, occupancy rasters, hole/leg counting, Hausdorff distances,
//!   and fiber topology over spine points.
//! * [`local_models`]: the explicit symplectic isotopies of the line
//!   (piecewise, smoothed, optimally-smoothed, cutoff) and numeric
//!   certification of their pullback-form lower bounds.
//! * [`cutoff`]: density-driven coefficient cutoffs of a section and the
//!   subdivision neighborhoods they localize over.
//! * [`families`]: the degree-`d` curve families with edge polynomials and
//!   dominant interior rings, plus the 16-point hexagon example.
//! * [`render`]: deterministic SVG output.
//! * [`jsonio`]: versioned JSON schemas for every artifact.

pub mod cutoff;
pub mod families;
pub mod fiber;
pub mod jsonio;
pub mod lattice;
pub mod local_models;
pub mod moment;
pub mod rat;
pub mod render;
pub mod roots;
pub mod sampler;
pub mod spine;
pub mod subdivision;

pub use cutoff::{cutoff_section, delta_m_neighbors, CutoffSection};
pub use families::{
    build_pd, build_qd, find_amplification_ratio, fubini_study_params, fubini_study_section,
    hexagon_section, AmplificationSearch, EdgePolynomialSpec, FamilySpec,
};
pub use jsonio::{sweep_csv, JsonIoError, SweepRow};
pub use lattice::{LatticePoint, LatticePolygon, NormalFan};
pub use local_models::{
    CertificateReport, CutoffLine, CutoffProfile, IsotopyMap, ProfileKind, ScalingReport,
    YImageReport,
};
pub use moment::{LaurentSection, MomentParams, TorusPoint};
pub use fiber::{FiberKind, FiberModel, FiberReport};
pub use render::render_svg;
pub use sampler::{AmoebaRaster, HoleReport, SliceAxis, SliceSpec};
pub use spine::SpineGraph;
pub use subdivision::{Subdivision, WeightFunction};
