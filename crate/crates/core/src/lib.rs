//! Hyperbolic geometry of a two-block slice of universal Teichmüller space.
//!
//! Points are pairs of real block coefficients `(c1, c2)` standing for the
//! Beltrami coefficient `(c1·χ1 + c2·χ2)·μ` with `|μ| = k`. Distances,
//! geodesic segments, chord-ratio angles and geodesic triangles with
//! prescribed angles are built on top of that model.

pub mod angles;
pub mod block;
pub mod error;
pub mod geodesics;
pub mod hyp;
pub mod triangles;

pub use angles::{
    angle_at_mu1_closed, angle_at_mu1_standard, angle_at_mu1_with_third_side, angle_at_mu_closed,
    angle_base_standard, angle_numeric, derivative_probe, AngleResult, DerivativeProbe, Schedule, SigmaEnd,
    Tolerances, Verdict,
};
pub use block::{allowable_chart, distance, h_functional, variation_slope, BlockPoint, SlopeEstimate, TangentBlock};
pub use error::{Error, Result};
pub use geodesics::{
    alpha_mu, alpha_mu1, pulled_back_segment, segments_distinct, sigma_segment, standard_segment, End,
    GeodesicSegment, SegmentKind, SigmaFunction,
};
pub use hyp::{arclength_from_param, hyp_dist, mobius_diff, modulus_from_length, param_from_arclength, Modulus};
pub use triangles::{curvature_probe, synthesize, synthesize_family, CurvatureProbe, TriangleReport, TriangleSpec};
