//! Geodesic triangles on `[0]`, `[μ]`, `[μ1]` with prescribed angles, and the
//! midpoint curvature probe.
//!
//! Sides: `α_μ` from `[0]` to `[μ]`, `β_σ` from `[μ]` to `[μ1]`, and the
//! pulled-back `γ̃` from `[0]` to `[μ1]`. Each has length `l = artanh k`.
//! The angle at `[μ]` is set by `σ'(0)`, the angle at `[0]` by `σ̃'(0)` and
//! the angle at `[μ1]` by `σ'(k)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::angles::{
    angle_at_mu1_with_third_side, angle_at_mu_closed, angle_numeric, derivative_at_k_for_angle,
    derivative_at_zero_for_angle, AngleResult, Schedule, Tolerances, Verdict,
};
use crate::block::{distance_unchecked, BlockPoint};
use crate::error::{Error, Result};
use crate::geodesics::{
    alpha_mu, alpha_mu1, germ_at_zero, max_aligned_gap, midpoint_param, midpoint_sigma_value, pulled_back_segment,
    sigma_from_germs, sigma_midpoint_pinned, sigma_prescribed, sigma_segment, BlendParams, End, GeodesicSegment,
    Germ, SegmentKind, SigmaFamily, SigmaFunction,
};
use crate::hyp::Modulus;

/// Numeric angles must land this close to the closed form.
pub const ANGLE_TOL: f64 = 1e-3;

/// Targets within this of 0 or π are flagged as boundary cases.
pub const BOUNDARY_EPS: f64 = 0.02;

/// Fraction of `[0, k]` next to `k` on which σ̃ follows its terminal germ.
pub const TILDE_TERMINAL_EXTENT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub l: f64,
    /// Targets at `[0]`, `[μ]`, `[μ1]`, in radians.
    pub theta: [f64; 3],
    #[serde(default)]
    pub family_seed: u64,
}

impl TriangleSpec {
    pub fn validate(&self) -> Result<Modulus> {
        for (i, t) in self.theta.iter().enumerate() {
            if !(0.0..=PI).contains(t) {
                return Err(Error::invalid(format!("theta[{i}] = {t} outside [0, pi]")));
            }
        }
        Modulus::from_length(self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexName {
    Base,
    Mu,
    Mu1,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideSummary {
    pub name: &'static str,
    pub kind: SegmentKind,
    pub start: BlockPoint,
    pub end: BlockPoint,
    /// `τ(start, end)`.
    pub length: f64,
    pub sigma_family: Option<SigmaFamily>,
    pub sigma_d0: Option<f64>,
    pub sigma_dk: Option<f64>,
}

impl SideSummary {
    fn of(name: &'static str, seg: &GeodesicSegment) -> Self {
        let sigma = seg.sigma();
        SideSummary {
            name,
            kind: seg.kind(),
            start: seg.start(),
            end: seg.end(),
            length: distance_unchecked(seg.start(), seg.end(), seg.modulus().k()),
            sigma_family: sigma.map(SigmaFunction::family),
            sigma_d0: sigma.and_then(SigmaFunction::declared_d0),
            sigma_dk: sigma.and_then(SigmaFunction::declared_dk),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexAngle {
    pub vertex: VertexName,
    pub point: BlockPoint,
    /// The two sides meeting here.
    pub sides: [&'static str; 2],
    pub target: f64,
    pub predicted: f64,
    pub verdict: Verdict,
    pub measured: Option<f64>,
    pub raw_ratio: f64,
    pub clamped: bool,
    /// `|measured - predicted| ≤ ANGLE_TOL`.
    pub within_tol: bool,
    pub boundary: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleReport {
    pub l: f64,
    pub k: f64,
    pub family_seed: u64,
    pub sides: [SideSummary; 3],
    pub vertices: [VertexAngle; 3],
    pub predicted_angle_sum: f64,
    /// Sum of numeric angles; absent if any angle failed to converge.
    pub measured_angle_sum: Option<f64>,
    pub all_within_tol: bool,
    #[serde(skip)]
    pub segments: [GeodesicSegment; 3],
}

impl TriangleReport {
    /// `α_μ`.
    pub fn alpha(&self) -> &GeodesicSegment {
        &self.segments[0]
    }

    /// `β_σ`.
    pub fn beta(&self) -> &GeodesicSegment {
        &self.segments[1]
    }

    /// `γ̃`.
    pub fn gamma(&self) -> &GeodesicSegment {
        &self.segments[2]
    }
}

fn clamp_derivative(d: f64, max: f64) -> f64 {
    // sin(θ/2) roundoff can push boundary targets a few ulps outside the range
    d.clamp(-max, max)
}

/// Terminal germ of σ̃ given `σ'(k) = dk`.
///
/// For `dk ≤ 0` σ̃ is `≡ 1` near `k`, so `γ̃` runs along `α_{μ1}` there. For
/// `dk > 0` the angle between `β_σ` and `α_{μ1}` would stay at `π/3`, so σ̃
/// leaves `k` with the same slope and the angle at `[μ1]` becomes
/// `2 arcsin((1 - k·dk)/2)`. At `dk = 1/k` both sides would share a tangent
/// on the lower envelope; the curvature term keeps `γ̃` off `β_σ`.
fn tilde_terminal_germ(dk: f64, k: f64) -> Germ {
    if dk <= 0.0 {
        Germ::Linear { slope: 0.0 }
    } else if dk >= (1.0 / k) * (1.0 - 1e-12) {
        Germ::Quadratic { slope: 1.0 / k, curvature: 2.0 / (1.0 - k * k) }
    } else {
        Germ::Linear { slope: dk }
    }
}

fn build_sides(spec: &TriangleSpec, k: Modulus, beta_seed: u64) -> Result<(SigmaFunction, SigmaFunction, [GeodesicSegment; 3])> {
    let kk = k.k();
    let max0 = (1.0 - kk * kk) / kk;
    let d0 = clamp_derivative(derivative_at_zero_for_angle(spec.theta[1], k), max0);
    let dk = clamp_derivative(derivative_at_k_for_angle(spec.theta[2], k), 1.0 / kk);
    let d0_tilde = clamp_derivative(derivative_at_zero_for_angle(spec.theta[0], k), max0);

    let beta_params = BlendParams { seed: beta_seed, ..BlendParams::default() };
    let sigma = sigma_prescribed(d0, dk, k, &beta_params)?;
    let tilde_params = BlendParams { k_extent: TILDE_TERMINAL_EXTENT, ..BlendParams::default() };
    let sigma_tilde = sigma_from_germs(k, germ_at_zero(d0_tilde, k), tilde_terminal_germ(dk, kk), &tilde_params)?;

    let sides = [alpha_mu(k), sigma_segment(&sigma, k)?, pulled_back_segment(&sigma_tilde, k)?];
    Ok((sigma, sigma_tilde, sides))
}

fn vertex_angle(
    vertex: VertexName,
    point: BlockPoint,
    sides: [&'static str; 2],
    target: f64,
    predicted: f64,
    measured: AngleResult,
) -> VertexAngle {
    let within_tol = measured.theta.is_some_and(|m| (m - predicted).abs() <= ANGLE_TOL);
    VertexAngle {
        vertex,
        point,
        sides,
        target,
        predicted,
        verdict: measured.verdict,
        measured: measured.theta,
        raw_ratio: measured.raw_limit,
        clamped: measured.clamped,
        within_tol,
        boundary: target <= BOUNDARY_EPS || target >= PI - BOUNDARY_EPS,
    }
}

fn synthesize_with_seed(spec: &TriangleSpec, beta_seed: u64, schedule: &Schedule, tol: &Tolerances) -> Result<TriangleReport> {
    let k = spec.validate()?;
    let (sigma, sigma_tilde, segments) = build_sides(spec, k, beta_seed)?;
    let [alpha, beta, gamma] = &segments;

    // the angle at [0] is the chart image of the angle at [μ] for σ̃
    let predicted = [
        angle_at_mu_closed(&sigma_tilde, k)?,
        angle_at_mu_closed(&sigma, k)?,
        angle_at_mu1_with_third_side(&sigma, &sigma_tilde, k)?,
    ];
    let vertices = [
        vertex_angle(
            VertexName::Base,
            BlockPoint::BASE,
            ["alpha", "gamma"],
            spec.theta[0],
            predicted[0],
            angle_numeric(alpha, gamma, BlockPoint::BASE, schedule, tol)?,
        ),
        vertex_angle(
            VertexName::Mu,
            BlockPoint::MU,
            ["alpha", "beta"],
            spec.theta[1],
            predicted[1],
            angle_numeric(alpha, beta, BlockPoint::MU, schedule, tol)?,
        ),
        vertex_angle(
            VertexName::Mu1,
            BlockPoint::MU1,
            ["beta", "gamma"],
            spec.theta[2],
            predicted[2],
            angle_numeric(beta, gamma, BlockPoint::MU1, schedule, tol)?,
        ),
    ];
    let measured_angle_sum = vertices.iter().map(|v| v.measured).sum::<Option<f64>>();
    Ok(TriangleReport {
        l: spec.l,
        k: k.k(),
        family_seed: beta_seed,
        sides: [SideSummary::of("alpha", alpha), SideSummary::of("beta", beta), SideSummary::of("gamma", gamma)],
        predicted_angle_sum: predicted.iter().sum(),
        measured_angle_sum,
        all_within_tol: vertices.iter().all(|v| v.within_tol),
        vertices,
        segments,
    })
}

/// Builds the triangle for `spec` and measures its angles.
pub fn synthesize(spec: &TriangleSpec) -> Result<TriangleReport> {
    synthesize_with(spec, &Schedule::default(), &Tolerances::default())
}

pub fn synthesize_with(spec: &TriangleSpec, schedule: &Schedule, tol: &Tolerances) -> Result<TriangleReport> {
    synthesize_with_seed(spec, spec.family_seed, schedule, tol)
}

/// `n` triangles on the same vertices sharing `α_μ`; `β_σ` uses seeds
/// `family_seed, family_seed + 1, …`. Fails if two `β` sides coincide.
pub fn synthesize_family(spec: &TriangleSpec, n: usize) -> Result<Vec<TriangleReport>> {
    synthesize_family_with(spec, n, &Schedule::default(), &Tolerances::default())
}

pub fn synthesize_family_with(spec: &TriangleSpec, n: usize, schedule: &Schedule, tol: &Tolerances) -> Result<Vec<TriangleReport>> {
    if n == 0 {
        return Err(Error::invalid("family size must be positive"));
    }
    let reports = (0..n as u64)
        .map(|i| synthesize_with_seed(spec, spec.family_seed.wrapping_add(i), schedule, tol))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..n {
        for j in i + 1..n {
            let (_, gap) = max_aligned_gap(reports[i].beta(), reports[j].beta(), 2001);
            if gap <= 1e-6 {
                return Err(Error::Construction {
                    message: format!(
                        "beta sides for seeds {} and {} coincide (gap {gap:e})",
                        reports[i].family_seed, reports[j].family_seed
                    ),
                    suggestion: "use a different family seed or widen the germ-free interior".into(),
                });
            }
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureProbe {
    pub k: f64,
    pub l: f64,
    pub t0: f64,
    pub sigma_t0: f64,
    /// Midpoint of `β_σ`.
    pub beta_midpoint: BlockPoint,
    /// Midpoint of `α_μ`.
    pub alpha_midpoint: BlockPoint,
    /// `τ([μ], ·)` to each midpoint; both should be `l/2`.
    pub beta_midpoint_arclength: f64,
    pub alpha_midpoint_arclength: f64,
    /// Distance between the two midpoints.
    pub m: f64,
    /// `τ([μ1], [0])`.
    pub base: f64,
    pub ratio_base_over_m: f64,
    pub ratio_base_over_2m: f64,
    /// `base > 2m`.
    pub negative_curvature_holds: bool,
}

/// Midpoint test on the triangle `α_μ ∪ α_{μ1} ∪ β_σ` with σ pinned through
/// the upper-envelope apex.
pub fn curvature_probe(k: Modulus) -> Result<CurvatureProbe> {
    let kk = k.k();
    let l = k.length();
    let sigma = sigma_midpoint_pinned(k);
    let beta = sigma_segment(&sigma, k)?;
    let alpha = alpha_mu(k);
    let t0 = midpoint_param(k);
    let beta_mid = beta.point_at(t0);
    let alpha_mid = alpha.point_at_arclength(End::End, l / 2.0)?;
    let m = distance_unchecked(beta_mid, alpha_mid, kk);
    let base_side = alpha_mu1(k);
    let base = distance_unchecked(base_side.start(), base_side.end(), kk);
    Ok(CurvatureProbe {
        k: kk,
        l,
        t0,
        sigma_t0: midpoint_sigma_value(k),
        beta_midpoint: beta_mid,
        alpha_midpoint: alpha_mid,
        beta_midpoint_arclength: distance_unchecked(BlockPoint::MU, beta_mid, kk),
        alpha_midpoint_arclength: distance_unchecked(BlockPoint::MU, alpha_mid, kk),
        m,
        base,
        ratio_base_over_m: base / m,
        ratio_base_over_2m: base / (2.0 * m),
        negative_curvature_holds: base > 2.0 * m,
    })
}
