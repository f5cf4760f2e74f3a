//! Chord-ratio angles.
//!
//! The angle `θ` at a common endpoint `p` of two curves `x`, `y` satisfies
//! `2 sin(θ/2) = lim_{r→0} τ(x(r), y(r)) / r`, where `x(r)`, `y(r)` are the
//! points at distance `r` from `p`. [`angle_numeric`] samples that ratio on a
//! geometric schedule and classifies the tail; the `*_closed` functions give
//! the predicted values at `[0]`, `[μ]` and `[μ1]` from declared derivatives.

use serde::{Deserialize, Serialize};

use crate::block::{h_functional, BlockPoint, TangentBlock};
use crate::error::{Error, Result};
use crate::geodesics::{GeodesicSegment, SigmaFunction};
use crate::hyp::{mobius_diff_unchecked, Modulus};

/// Tolerance for matching a vertex with segment endpoints.
pub const VERTEX_TOL: f64 = 1e-12;

/// Clamping of the ratio into `[0, 2]` beyond this is flagged.
pub const CLAMP_FLAG_TOL: f64 = 1e-9;

/// Geometric sampling `r_j = r0·ratio^j`, `j = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schedule {
    pub r0: f64,
    pub ratio: f64,
    pub steps: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { r0: 1e-2, ratio: 0.5, steps: 30 }
    }
}

impl Schedule {
    fn validate(&self) -> Result<()> {
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(Error::invalid(format!("schedule r0 = {} must be positive", self.r0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::invalid(format!("schedule ratio = {} must lie in (0, 1)", self.ratio)));
        }
        if self.steps == 0 {
            return Err(Error::invalid("schedule needs at least one step"));
        }
        Ok(())
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(move |j| self.r0 * self.ratio.powi(j as i32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Trailing-window spread at or below which the limit is accepted.
    pub conv_tol: f64,
    /// Spread that, sustained over the last two windows, signals oscillation.
    pub osc_tol: f64,
    pub window: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { conv_tol: 1e-5, osc_tol: 1e-2, window: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exists,
    DoesNotExist,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSample {
    pub r: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleResult {
    pub verdict: Verdict,
    /// Present only when the limit exists.
    pub theta: Option<f64>,
    /// Chord-ratio limit clamped to `[0, 2]`; equals `2 sin(θ/2)`.
    pub limit_value: Option<f64>,
    /// Last sampled ratio before clamping.
    pub raw_limit: f64,
    /// Set when clamping moved the ratio by more than [`CLAMP_FLAG_TOL`].
    pub clamped: bool,
    /// `(min, max)` of the ratios in the trailing window.
    pub oscillation_band: (f64, f64),
    /// Samples in order of decreasing `r`.
    pub diagnostics: Vec<RatioSample>,
}

fn spread(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Convergence/oscillation classification of a sequence's tail.
pub(crate) fn classify(values: &[f64], tol: &Tolerances) -> (Verdict, (f64, f64)) {
    let w = tol.window.max(2);
    let n = values.len();
    if n < w {
        let band = spread(values);
        return (Verdict::Inconclusive, band);
    }
    let band = spread(&values[n - w..]);
    let last = band.1 - band.0;
    if last <= tol.conv_tol {
        return (Verdict::Exists, band);
    }
    if n >= 2 * w {
        let prev = spread(&values[n - 2 * w..n - w]);
        if last >= tol.osc_tol && prev.1 - prev.0 >= tol.osc_tol {
            return (Verdict::DoesNotExist, band);
        }
    }
    (Verdict::Inconclusive, band)
}

/// `2 arcsin(q/2)` with `q` clamped to `[0, 2]`.
pub fn theta_from_ratio(q: f64) -> f64 {
    2.0 * (q.clamp(0.0, 2.0) / 2.0).asin()
}

/// Measures the angle at `vertex` between two segments that both end there.
pub fn angle_numeric(
    a: &GeodesicSegment,
    b: &GeodesicSegment,
    vertex: BlockPoint,
    schedule: &Schedule,
    tol: &Tolerances,
) -> Result<AngleResult> {
    schedule.validate()?;
    if a.modulus() != b.modulus() {
        return Err(Error::invalid("segments are built on different moduli"));
    }
    let ea = a
        .end_at(vertex, VERTEX_TOL)
        .ok_or_else(|| Error::invalid(format!("vertex {vertex:?} is not an endpoint of the first segment")))?;
    let eb = b
        .end_at(vertex, VERTEX_TOL)
        .ok_or_else(|| Error::invalid(format!("vertex {vertex:?} is not an endpoint of the second segment")))?;
    let shortest = a.total_length().min(b.total_length());
    if schedule.r0 >= shortest {
        return Err(Error::invalid(format!("r0 = {} is not below the segment length {shortest}", schedule.r0)));
    }

    let diagnostics: Vec<RatioSample> = schedule
        .radii()
        .map(|r| {
            let u = a.local_offsets(ea, r)?;
            let w = b.local_offsets(eb, r)?;
            let d = mobius_diff_unchecked(u[0], w[0]).abs().max(mobius_diff_unchecked(u[1], w[1]).abs()).atanh();
            Ok(RatioSample { r, ratio: d / r })
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = diagnostics.iter().map(|s| s.ratio).collect();
    let (verdict, oscillation_band) = classify(&ratios, tol);
    let raw_limit = *ratios.last().expect("at least one step");
    let clamped_value = raw_limit.clamp(0.0, 2.0);
    let (theta, limit_value) = match verdict {
        Verdict::Exists => (Some(theta_from_ratio(clamped_value)), Some(clamped_value)),
        _ => (None, None),
    };
    Ok(AngleResult {
        verdict,
        theta,
        limit_value,
        raw_limit,
        clamped: (raw_limit - clamped_value).abs() > CLAMP_FLAG_TOL,
        oscillation_band,
        diagnostics,
    })
}

/// Angle at `[μ]` between `α_μ` and `β_σ`: `2 sin(θ/2) = 1 + kσ'(0)/(1-k²)`.
pub fn angle_at_mu_closed(sigma: &SigmaFunction, k: Modulus) -> Result<f64> {
    let d0 = sigma.declared_d0().ok_or(Error::ExistenceUnknown("sigma has no declared derivative at 0"))?;
    Ok(angle_at_mu_from_derivative(d0, k))
}

pub fn angle_at_mu_from_derivative(d0: f64, k: Modulus) -> f64 {
    let kk = k.k();
    theta_from_ratio(1.0 + kk * d0 / (1.0 - kk * kk))
}

/// `σ'(0)` giving the angle `theta` at `[μ]`.
pub fn derivative_at_zero_for_angle(theta: f64, k: Modulus) -> f64 {
    let kk = k.k();
    (1.0 - kk * kk) / kk * (2.0 * (theta / 2.0).sin() - 1.0)
}

/// `2 sin(θ/2) = 1 - kσ'(k)` at `[μ1]`.
///
/// This is the angle between `β_σ` and a third side whose second block leaves
/// `[μ1]` at least as fast as `β_σ`'s first block comes back (see
/// [`angle_at_mu1_with_third_side`]). Against `α_{μ1}` itself it holds only
/// for `σ'(k) ≤ 0`; use [`angle_at_mu1_standard`] there.
pub fn angle_at_mu1_closed(sigma: &SigmaFunction, k: Modulus) -> Result<f64> {
    let dk = sigma.declared_dk().ok_or(Error::ExistenceUnknown("sigma has no declared derivative at k"))?;
    Ok(angle_at_mu1_from_derivative(dk, k))
}

pub fn angle_at_mu1_from_derivative(dk: f64, k: Modulus) -> f64 {
    theta_from_ratio(1.0 - k.k() * dk)
}

/// `σ'(k)` giving `2 sin(θ/2) = 1 - kσ'(k)` at `[μ1]`.
pub fn derivative_at_k_for_angle(theta: f64, k: Modulus) -> f64 {
    (1.0 - 2.0 * (theta / 2.0).sin()) / k.k()
}

/// Angle at `[μ1]` between `β_σ` and the pulled-back side `γ̃` built from `σ̃`.
///
/// Leaving `[μ1]` at unit speed, `β_σ` has direction `(-kσ'(k), 1)` and `γ̃`
/// has `(-1, kσ̃'(k))` in the blockwise `artanh(k·c)` coordinates, so the
/// sup-norm of the difference is `max(1 - kσ'(k), 1 - kσ̃'(k))`.
pub fn angle_at_mu1_with_third_side(sigma: &SigmaFunction, sigma_tilde: &SigmaFunction, k: Modulus) -> Result<f64> {
    let dk = sigma.declared_dk().ok_or(Error::ExistenceUnknown("sigma has no declared derivative at k"))?;
    let dkt = sigma_tilde
        .declared_dk()
        .ok_or(Error::ExistenceUnknown("sigma-tilde has no declared derivative at k"))?;
    let kk = k.k();
    Ok(theta_from_ratio((1.0 - kk * dk).max(1.0 - kk * dkt)))
}

/// Angle at `[μ1]` between `α_{μ1}` and `β_σ`: `2 sin(θ/2) = max(1 - kσ'(k), 1)`.
pub fn angle_at_mu1_standard(sigma: &SigmaFunction, k: Modulus) -> Result<f64> {
    let dk = sigma.declared_dk().ok_or(Error::ExistenceUnknown("sigma has no declared derivative at k"))?;
    Ok(theta_from_ratio((1.0 - k.k() * dk).max(1.0)))
}

/// Angle at `[0]` between the standard segments towards `v·μ` and `w·μ`:
/// `2 sin(θ/2) = H(v/‖v‖ - w/‖w‖)` with both directions normalized to unit
/// sup norm as Beltrami coefficients.
pub fn angle_base_standard(v: TangentBlock, w: TangentBlock, k: Modulus) -> Result<f64> {
    let (nv, nw) = (v.sup_norm(), w.sup_norm());
    if !(nv > 0.0 && nw > 0.0) || !nv.is_finite() || !nw.is_finite() {
        return Err(Error::invalid("directions must be nonzero and finite"));
    }
    let kk = k.k();
    let diff = v.scale(1.0 / (kk * nv)) - w.scale(1.0 / (kk * nw));
    Ok(theta_from_ratio(h_functional(diff, k)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaEnd {
    Zero,
    K,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeProbe {
    pub endpoint: SigmaEnd,
    pub verdict: Verdict,
    /// Last difference quotient, when it converged.
    pub estimate: Option<f64>,
    pub oscillation_band: (f64, f64),
    /// `(h, quotient)` with `h` the offset from the endpoint.
    pub quotients: Vec<(f64, f64)>,
}

/// One-sided difference quotients of σ at an endpoint, classified like the
/// chord ratios of [`angle_numeric`].
pub fn derivative_probe(sigma: &SigmaFunction, endpoint: SigmaEnd, schedule: &Schedule, tol: &Tolerances) -> Result<DerivativeProbe> {
    schedule.validate()?;
    let k = sigma.k().k();
    if schedule.r0 > k {
        return Err(Error::invalid(format!("offset {} exceeds k = {k}", schedule.r0)));
    }
    let quotients: Vec<(f64, f64)> = schedule
        .radii()
        .map(|h| {
            let q = match endpoint {
                SigmaEnd::Zero => (sigma.eval(h) - sigma.eval(0.0)) / h,
                SigmaEnd::K => (sigma.eval(k) - sigma.eval(k - h)) / h,
            };
            (h, q)
        })
        .collect();
    let values: Vec<f64> = quotients.iter().map(|q| q.1).collect();
    let (verdict, oscillation_band) = classify(&values, tol);
    let estimate = (verdict == Verdict::Exists).then(|| *values.last().expect("nonempty"));
    Ok(DerivativeProbe { endpoint, verdict, estimate, oscillation_band, quotients })
}
