//! The σ functions that drive the family of geodesics joining `[μ]` to `[μ1]`.
//!
//! A σ lives on `[0, k]` with `σ(0) = σ(k) = 1` and must stay between the
//! envelopes returned by [`lower_bound`] and [`upper_bound`]. Near the two
//! ends it follows a short polynomial germ that fixes the one-sided
//! derivative; in between it is a monotone cubic blend carried out in the
//! hyperbolic coordinate `g(u) = artanh(kσ) - artanh(k)`, `u = artanh t`.
//! In that coordinate the curve is a geodesic on every subarc exactly when
//! `g` is 1-Lipschitz, and the envelopes become `|g(u)| ≤ min(u, l - u)`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pchip::Pchip;
use crate::error::{Error, Result};
use crate::hyp::Modulus;

/// Default density of the validation grid.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Required gap below the upper envelope on the punctured end neighbourhoods.
pub const STRICT_MARGIN: f64 = 1e-9;

const VALUE_TOL: f64 = 1e-12;
const LIPSCHITZ_REL_TOL: f64 = 1e-9;
const LIPSCHITZ_ABS_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaFamily {
    ConstantOne,
    PrescribedGerm,
    Oscillatory,
    MidpointPinned,
    Custom,
}

impl fmt::Display for SigmaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SigmaFamily::ConstantOne => "constant-one",
            SigmaFamily::PrescribedGerm => "prescribed-germ",
            SigmaFamily::Oscillatory => "oscillatory",
            SigmaFamily::MidpointPinned => "midpoint-pinned",
            SigmaFamily::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Local form of σ next to an endpoint, in terms of the offset `h` from that
/// endpoint (`h = t` at 0, `h = t - k` at k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Germ {
    /// `1 + slope·h`
    Linear { slope: f64 },
    /// `1 + slope·h + curvature·h²`
    Quadratic { slope: f64, curvature: f64 },
    /// `1 + amplitude·h·sin²(1/h)`; only meaningful at `t = 0`.
    Oscillatory { amplitude: f64 },
}

impl Germ {
    pub fn value(&self, h: f64) -> f64 {
        1.0 + self.excess(h)
    }

    /// `value(h) - 1`, without the cancellation.
    pub fn excess(&self, h: f64) -> f64 {
        match *self {
            Germ::Linear { slope } => slope * h,
            Germ::Quadratic { slope, curvature } => (slope + curvature * h) * h,
            Germ::Oscillatory { amplitude } => {
                if h == 0.0 {
                    0.0
                } else {
                    amplitude * h * (1.0 / h).sin().powi(2)
                }
            }
        }
    }

    pub fn derivative(&self, h: f64) -> f64 {
        match *self {
            Germ::Linear { slope } => slope,
            Germ::Quadratic { slope, curvature } => slope + 2.0 * curvature * h,
            Germ::Oscillatory { amplitude } => {
                let inv = 1.0 / h;
                amplitude * (inv.sin().powi(2) - inv * (2.0 * inv).sin())
            }
        }
    }

    /// Derivative at the endpoint itself, if the germ has one.
    pub fn endpoint_derivative(&self) -> Option<f64> {
        match *self {
            Germ::Linear { slope } | Germ::Quadratic { slope, .. } => Some(slope),
            Germ::Oscillatory { .. } => None,
        }
    }
}

/// Lower envelope `max{(k-t)/(k(1-kt)), t/k}`.
pub fn lower_bound(t: f64, k: f64) -> f64 {
    ((k - t) / (k * (1.0 - k * t))).max(t / k)
}

/// Upper envelope `min{(k+t)/(k(1+kt)), (2k-(1+k²)t)/(k(1+k²-2kt))}`.
pub fn upper_bound(t: f64, k: f64) -> f64 {
    upper_near_zero(t, k).min(upper_near_k(t, k))
}

/// The branch of the upper envelope that governs `t → 0+`; `σ` touching it
/// there makes the union with `α_μ` geodesic at `[μ]`.
pub fn upper_near_zero(t: f64, k: f64) -> f64 {
    (k + t) / (k * (1.0 + k * t))
}

/// The branch that governs `t → k-`.
pub fn upper_near_k(t: f64, k: f64) -> f64 {
    (2.0 * k - (1.0 + k * k) * t) / (k * (1.0 + k * k - 2.0 * k * t))
}

#[derive(Clone)]
enum Shape {
    One,
    Blend(Box<Blend>),
    UpperEnvelope,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

#[derive(Debug, Clone)]
struct Blend {
    k: f64,
    length: f64,
    t_a: f64,
    t_b: f64,
    germ0: Germ,
    germk: Germ,
    spline: Pchip,
}

impl Blend {
    fn eval(&self, t: f64) -> f64 {
        if t <= self.t_a {
            self.germ0.value(t)
        } else if t >= self.t_b {
            self.germk.value(t - self.k)
        } else {
            (self.length + self.spline.eval(t.atanh())).tanh() / self.k
        }
    }
}

/// A continuous σ on `[0, k]` with optional declared endpoint derivatives.
///
/// The declared derivatives feed the closed-form angle formulas only; numeric
/// measurements never read them.
#[derive(Clone)]
pub struct SigmaFunction {
    k: Modulus,
    family: SigmaFamily,
    shape: Shape,
    d0: Option<f64>,
    dk: Option<f64>,
}

impl fmt::Debug for SigmaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigmaFunction")
            .field("k", &self.k.k())
            .field("family", &self.family)
            .field("d0", &self.d0)
            .field("dk", &self.dk)
            .field("germ_extents", &self.germ_extents())
            .finish()
    }
}

impl SigmaFunction {
    /// `σ ≡ 1`, which turns the family into the standard segment from `[μ]` to `[μ1]`.
    pub fn constant_one(k: Modulus) -> Self {
        SigmaFunction { k, family: SigmaFamily::ConstantOne, shape: Shape::One, d0: Some(0.0), dk: Some(0.0) }
    }

    /// Wraps an arbitrary function; rejected unless it passes [`validate_sigma`].
    pub fn custom<F>(k: Modulus, f: F, d0: Option<f64>, dk: Option<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let sigma = SigmaFunction { k, family: SigmaFamily::Custom, shape: Shape::Custom(Arc::new(f)), d0, dk };
        let report = validate_sigma(&sigma, k, DEFAULT_SAMPLES);
        report.into_result()?;
        Ok(sigma)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.k.k();
        let t = t.clamp(0.0, k);
        match &self.shape {
            Shape::One => 1.0,
            Shape::Blend(b) => b.eval(t),
            Shape::UpperEnvelope => upper_bound(t, k),
            Shape::Custom(f) => f(t),
        }
    }

    pub fn k(&self) -> Modulus {
        self.k
    }

    /// `σ(h) - 1` for small `h ≥ 0`, exact to rounding where σ has a closed
    /// form near 0.
    pub fn excess_at_zero(&self, h: f64) -> f64 {
        let k = self.k.k();
        let h = h.clamp(0.0, k);
        match &self.shape {
            Shape::One => 0.0,
            Shape::Blend(b) if h <= b.t_a => b.germ0.excess(h),
            Shape::UpperEnvelope if h <= midpoint_param(self.k) => h * (1.0 - k * k) / (k * (1.0 + k * h)),
            _ => self.eval(h) - 1.0,
        }
    }

    /// `σ(k + h) - 1` for small `h ≤ 0`.
    pub fn excess_at_k(&self, h: f64) -> f64 {
        let k = self.k.k();
        let h = h.clamp(-k, 0.0);
        let t = k + h;
        match &self.shape {
            Shape::One => 0.0,
            Shape::Blend(b) if t >= b.t_b => b.germk.excess(h),
            Shape::UpperEnvelope if t >= midpoint_param(self.k) => {
                -(1.0 - k * k) * h / (k * (1.0 + k * k - 2.0 * k * t))
            }
            _ => self.eval(t) - 1.0,
        }
    }

    pub fn family(&self) -> SigmaFamily {
        self.family
    }

    /// Declared `σ'(0)`.
    pub fn declared_d0(&self) -> Option<f64> {
        self.d0
    }

    /// Declared `σ'(k)`.
    pub fn declared_dk(&self) -> Option<f64> {
        self.dk
    }

    /// `(t_a, t_b)`: σ follows its germs on `[0, t_a]` and `[t_b, k]`.
    pub fn germ_extents(&self) -> Option<(f64, f64)> {
        match &self.shape {
            Shape::Blend(b) => Some((b.t_a, b.t_b)),
            _ => None,
        }
    }

    /// Germs at 0 and k, for blended σ.
    pub fn germs(&self) -> Option<(Germ, Germ)> {
        match &self.shape {
            Shape::Blend(b) => Some((b.germ0, b.germk)),
            _ => None,
        }
    }
}

/// Knobs for the germ-plus-blend construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlendParams {
    /// Initial germ interval at 0, as a fraction of k.
    pub zero_extent: f64,
    /// Initial germ interval at k, as a fraction of k.
    pub k_extent: f64,
    /// 0 keeps the plain blend; any other value inserts one interior control
    /// point whose height is drawn from this seed.
    pub seed: u64,
    /// Each retry halves both germ intervals.
    pub max_shrinks: u32,
    pub samples: usize,
}

impl Default for BlendParams {
    fn default() -> Self {
        BlendParams { zero_extent: 0.25, k_extent: 0.25, seed: 0, max_shrinks: 12, samples: DEFAULT_SAMPLES }
    }
}

/// Germ at 0 realizing `σ'(0) = d0`; the boundary value `(1-k²)/k` needs the
/// quadratic correction to stay under the upper envelope.
pub fn germ_at_zero(d0: f64, k: Modulus) -> Germ {
    let kk = k.k();
    let max = (1.0 - kk * kk) / kk;
    if d0 >= max * (1.0 - 1e-12) {
        Germ::Quadratic { slope: max, curvature: -(1.0 - kk * kk) }
    } else {
        Germ::Linear { slope: d0 }
    }
}

/// Germ at k realizing `σ'(k) = dk`; `dk = -1/k` gets the quadratic correction.
pub fn germ_at_k(dk: f64, k: Modulus) -> Germ {
    let kk = k.k();
    if dk <= -(1.0 / kk) * (1.0 - 1e-12) {
        Germ::Quadratic { slope: -1.0 / kk, curvature: -2.0 / (1.0 - kk * kk) }
    } else {
        Germ::Linear { slope: dk }
    }
}

fn check_derivatives(d0: f64, dk: f64, k: Modulus) -> Result<()> {
    let kk = k.k();
    let max0 = (1.0 - kk * kk) / kk;
    if !d0.is_finite() || d0.abs() > max0 * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("sigma'(0) = {d0} outside [-{max0}, {max0}]")));
    }
    let maxk = 1.0 / kk;
    if !dk.is_finite() || dk.abs() > maxk * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("sigma'(k) = {dk} outside [-{maxk}, {maxk}]")));
    }
    Ok(())
}

/// σ with prescribed one-sided derivatives at both ends.
pub fn sigma_prescribed(d0: f64, dk: f64, k: Modulus, params: &BlendParams) -> Result<SigmaFunction> {
    check_derivatives(d0, dk, k)?;
    let max0 = (1.0 - k.k() * k.k()) / k.k();
    let d0 = d0.clamp(-max0, max0);
    let dk = dk.clamp(-1.0 / k.k(), 1.0 / k.k());
    sigma_from_germs(k, germ_at_zero(d0, k), germ_at_k(dk, k), params)
}

/// σ assembled from explicit germs; the result is checked to give a geodesic.
pub fn sigma_from_germs(k: Modulus, germ0: Germ, germk: Germ, params: &BlendParams) -> Result<SigmaFunction> {
    if matches!(germk, Germ::Oscillatory { .. }) {
        return Err(Error::invalid("oscillatory germ is only supported at t = 0"));
    }
    let d0 = germ0.endpoint_derivative();
    let dk = germk.endpoint_derivative();
    if let (Some(a), Some(b)) = (d0, dk) {
        check_derivatives(a, b, k)?;
    }
    build_blend(k, SigmaFamily::PrescribedGerm, germ0, germk, params, true, d0, dk)
}

/// A σ that meets every bound but is not differentiable at 0:
/// `1 + ((1-k²)/(2k))·t·sin²(1/t)` near 0, `≡ 1` near k.
pub fn sigma_oscillatory(k: Modulus) -> SigmaFunction {
    let kk = k.k();
    let germ0 = Germ::Oscillatory { amplitude: (1.0 - kk * kk) / (2.0 * kk) };
    let germk = Germ::Linear { slope: 0.0 };
    // The germ lies strictly inside the envelopes on all of [0, k], so the
    // bounds-only blend cannot fail.
    build_blend(k, SigmaFamily::Oscillatory, germ0, germk, &BlendParams::default(), false, None, Some(0.0))
        .expect("oscillatory sigma stays inside the envelopes")
}

/// Parameter of the midpoint of `β_σ`: `t0 = k / (1 + √(1-k²))`, i.e. `artanh t0 = l/2`.
pub fn midpoint_param(k: Modulus) -> f64 {
    let kk = k.k();
    kk / (1.0 + (1.0 - kk * kk).sqrt())
}

/// `σ(t0) = (2 + √(1-k²)) / (1 + k² + √(1-k²))`.
pub fn midpoint_sigma_value(k: Modulus) -> f64 {
    let kk = k.k();
    let s = (1.0 - kk * kk).sqrt();
    (2.0 + s) / (1.0 + kk * kk + s)
}

/// σ passing through `(t0, σ(t0))` at the apex of the upper envelope.
///
/// `σ(t0)` equals the upper envelope at `t0 = tanh(l/2)`, and the only
/// 1-Lipschitz `g` reaching `g(l/2) = l/2` is the envelope itself, so this σ
/// is the upper envelope on all of `[0, k]`.
pub fn sigma_midpoint_pinned(k: Modulus) -> SigmaFunction {
    let kk = k.k();
    SigmaFunction {
        k,
        family: SigmaFamily::MidpointPinned,
        shape: Shape::UpperEnvelope,
        d0: Some((1.0 - kk * kk) / kk),
        dk: Some(-1.0 / kk),
    }
}

/// `dg/du` of a germ at offset `h`, where `t` is the absolute parameter.
fn hyperbolic_slope(germ: &Germ, h: f64, t: f64, k: f64) -> f64 {
    let sigma = germ.value(h);
    k * germ.derivative(h) * (1.0 - t * t) / (1.0 - (k * sigma).powi(2))
}

#[allow(clippy::too_many_arguments)]
fn build_blend(
    k: Modulus,
    family: SigmaFamily,
    germ0: Germ,
    germk: Germ,
    params: &BlendParams,
    require_geodesic: bool,
    d0: Option<f64>,
    dk: Option<f64>,
) -> Result<SigmaFunction> {
    let kk = k.k();
    let length = k.length();
    if !(params.zero_extent > 0.0 && params.k_extent > 0.0 && params.zero_extent + params.k_extent < 1.0) {
        return Err(Error::invalid("germ extents must be positive fractions summing below 1"));
    }
    let weight = (params.seed != 0).then(|| ChaCha8Rng::seed_from_u64(params.seed).gen_range(0.15..0.85));
    let mut last_failure = None;
    for attempt in 0..=params.max_shrinks {
        let scale = 0.5f64.powi(attempt as i32);
        let t_a = kk * params.zero_extent * scale;
        let t_b = kk - kk * params.k_extent * scale;
        let (u_a, u_b) = (t_a.atanh(), t_b.atanh());
        let g_a = (kk * germ0.value(t_a)).atanh() - length;
        let g_b = (kk * germk.value(t_b - kk)).atanh() - length;
        let slope_a = hyperbolic_slope(&germ0, t_a, t_a, kk);
        let slope_b = hyperbolic_slope(&germk, t_b - kk, t_b, kk);

        let mut xs = vec![u_a];
        let mut ys = vec![g_a];
        if let Some(w) = weight {
            let u_m = 0.5 * (u_a + u_b);
            let tent = u_m.min(length - u_m);
            let cone = 0.25;
            let lo = (g_a - cone * (u_m - u_a)).max(g_b - cone * (u_b - u_m)).max(-0.9 * tent);
            let hi = (g_a + cone * (u_m - u_a)).min(g_b + cone * (u_b - u_m)).min(0.9 * tent);
            if hi - lo > 1e-6 {
                xs.push(u_m);
                ys.push(lo + w * (hi - lo));
            }
        }
        xs.push(u_b);
        ys.push(g_b);
        let spline = Pchip::new(xs, ys, slope_a, slope_b);
        let blend = Blend { k: kk, length, t_a, t_b, germ0, germk, spline };
        let sigma = SigmaFunction { k, family, shape: Shape::Blend(Box::new(blend)), d0, dk };
        let report = validate_sigma(&sigma, k, params.samples);
        let geodesic_ok = !require_geodesic || report.geodesic_ok;
        if report.endpoints_ok && report.bounds_ok && geodesic_ok {
            return Ok(sigma);
        }
        last_failure = report
            .first_bound_violation
            .map(|v| v.t)
            .or(report.first_geodesic_violation);
    }
    Err(Error::Construction {
        message: format!(
            "blend is not admissible after {} shrinks (last failure at t = {:?})",
            params.max_shrinks, last_failure
        ),
        suggestion: "shrink the germ intervals or drop the interior control point".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundViolation {
    pub t: f64,
    pub sigma: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Outcome of checking a σ against the admissibility conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaReport {
    pub family: SigmaFamily,
    pub k: f64,
    pub samples: usize,
    pub sigma_at_zero: f64,
    pub sigma_at_k: f64,
    pub endpoints_ok: bool,
    /// Lower and upper envelopes hold on the whole grid.
    pub bounds_ok: bool,
    pub first_bound_violation: Option<BoundViolation>,
    /// Strictly below `upper_near_zero` on the punctured neighbourhood of 0.
    pub strict_near_zero: bool,
    /// Strictly below `upper_near_k` on the punctured neighbourhood of k.
    pub strict_near_k: bool,
    /// Every subarc of the resulting curve is a geodesic.
    pub geodesic_ok: bool,
    pub first_geodesic_violation: Option<f64>,
    /// Declared derivatives (if any) respect `|σ'(0)| ≤ (1-k²)/k` and `|σ'(k)| ≤ 1/k`.
    pub derivative_bounds_ok: bool,
    /// Endpoints, envelopes and derivative bounds all hold.
    pub passes: bool,
}

impl SigmaReport {
    pub(crate) fn into_result(self) -> Result<Self> {
        if !self.endpoints_ok {
            let t = if (self.sigma_at_zero - 1.0).abs() > VALUE_TOL { 0.0 } else { self.k };
            return Err(Error::InvalidSigma { t, reason: "sigma must equal 1 at both endpoints".into() });
        }
        if let Some(v) = self.first_bound_violation {
            return Err(Error::InvalidSigma {
                t: v.t,
                reason: format!("sigma = {} outside [{}, {}]", v.sigma, v.lower, v.upper),
            });
        }
        if !self.derivative_bounds_ok {
            return Err(Error::InvalidSigma { t: 0.0, reason: "declared derivative out of range".into() });
        }
        Ok(self)
    }
}

fn validation_grid(k: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    let mut ts: Vec<f64> = (0..n).map(|j| k * j as f64 / (n - 1) as f64).collect();
    for m in 4..=40 {
        let h = k * 0.5f64.powi(m);
        ts.push(h);
        ts.push(k - h);
    }
    ts.retain(|t| (0.0..=k).contains(t));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Checks a σ on a dense grid against the envelopes, the end strictness
/// conditions, the subarc-geodesic condition and its endpoint values.
pub fn validate_sigma(sigma: &SigmaFunction, k: Modulus, samples: usize) -> SigmaReport {
    let kk = k.k();
    let sigma_at_zero = sigma.eval(0.0);
    let sigma_at_k = sigma.eval(kk);
    let endpoints_ok = (sigma_at_zero - 1.0).abs() <= VALUE_TOL && (sigma_at_k - 1.0).abs() <= VALUE_TOL;

    let grid = validation_grid(kk, samples);
    let mut first_bound_violation = None;
    let mut first_geodesic_violation = None;
    let mut prev: Option<(f64, f64)> = None;
    for &t in &grid {
        let s = sigma.eval(t);
        let (lo, hi) = (lower_bound(t, kk), upper_bound(t, kk));
        if first_bound_violation.is_none() && (!s.is_finite() || s < lo - VALUE_TOL || s > hi + VALUE_TOL) {
            first_bound_violation = Some(BoundViolation { t, sigma: s, lower: lo, upper: hi });
        }
        let big = (kk * s).clamp(-1.0, 1.0).atanh();
        let u = t.atanh();
        if let Some((pu, pbig)) = prev {
            let du = u - pu;
            if first_geodesic_violation.is_none()
                && (big - pbig).abs() > du * (1.0 + LIPSCHITZ_REL_TOL) + LIPSCHITZ_ABS_TOL
            {
                first_geodesic_violation = Some(t);
            }
        }
        prev = Some((u, big));
    }

    let band = |lo: f64, hi: f64| (0..16).map(move |j| lo + (hi - lo) * j as f64 / 15.0);
    let strict_near_zero = band(kk / 10.0, kk / 5.0).all(|t| sigma.eval(t) < upper_near_zero(t, kk) - STRICT_MARGIN);
    let strict_near_k =
        band(kk - kk / 5.0, kk - kk / 10.0).all(|t| sigma.eval(t) < upper_near_k(t, kk) - STRICT_MARGIN);

    let max0 = (1.0 - kk * kk) / kk;
    let derivative_bounds_ok = sigma.declared_d0().is_none_or(|d| d.abs() <= max0 * (1.0 + 1e-12))
        && sigma.declared_dk().is_none_or(|d| d.abs() <= (1.0 / kk) * (1.0 + 1e-12));

    let bounds_ok = first_bound_violation.is_none();
    SigmaReport {
        family: sigma.family(),
        k: kk,
        samples: grid.len(),
        sigma_at_zero,
        sigma_at_k,
        endpoints_ok,
        bounds_ok,
        first_bound_violation,
        strict_near_zero,
        strict_near_k,
        geodesic_ok: first_geodesic_violation.is_none(),
        first_geodesic_violation,
        derivative_bounds_ok,
        passes: endpoints_ok && bounds_ok && derivative_bounds_ok,
    }
}
