//! Geodesic segments of the model with exact arclength addressing.
//!
//! All constructed segments share one parametrization: `t ∈ [0, T]` with the
//! distance from the start point equal to `artanh t`, so the total length is
//! `artanh T` and a point at arclength `r` from either end is found in closed
//! form.

mod pchip;
pub mod sigma;

use serde::Serialize;

pub use sigma::{
    germ_at_k, germ_at_zero, lower_bound, midpoint_param, midpoint_sigma_value, sigma_from_germs,
    sigma_midpoint_pinned, sigma_oscillatory, sigma_prescribed, upper_bound, upper_near_k, upper_near_zero,
    validate_sigma, BlendParams, BoundViolation, Germ, SigmaFamily, SigmaFunction, SigmaReport, DEFAULT_SAMPLES,
};

use crate::block::{chart_block, chart_unchecked, distance_unchecked, BlockPoint};
use crate::error::{Error, Result};
use crate::hyp::{mobius_diff_unchecked, Modulus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKind {
    Standard,
    Sigma,
    PulledBack,
    /// Image of another segment under the allowable chart.
    Charted,
}

/// Which end of a segment an arclength is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum End {
    Start,
    End,
}

#[derive(Debug, Clone)]
enum Curve {
    Standard { p: BlockPoint, q: BlockPoint, delta: f64 },
    Sigma(SigmaFunction),
    PulledBack(SigmaFunction),
    Charted(Box<GeodesicSegment>),
}

/// An arclength-addressable geodesic segment.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    k: Modulus,
    kind: SegmentKind,
    start: BlockPoint,
    end: BlockPoint,
    param_max: f64,
    curve: Curve,
}

/// Standard segment block: the blockwise real form of `α_{p,q}(t)`.
fn standard_block(p: f64, q: f64, k: f64, delta: f64, t: f64) -> f64 {
    let den0 = 1.0 - k * k * p * q;
    (delta * p * den0 + t * (q - p)) / (delta * den0 + t * k * k * p * (q - p))
}

impl GeodesicSegment {
    pub fn kind(&self) -> SegmentKind {
        self.kind
    }

    pub fn modulus(&self) -> Modulus {
        self.k
    }

    pub fn start(&self) -> BlockPoint {
        self.start
    }

    pub fn end(&self) -> BlockPoint {
        self.end
    }

    pub fn endpoint(&self, which: End) -> BlockPoint {
        match which {
            End::Start => self.start,
            End::End => self.end,
        }
    }

    /// Upper end `T` of the parameter range `[0, T]`.
    pub fn param_max(&self) -> f64 {
        self.param_max
    }

    pub fn total_length(&self) -> f64 {
        self.param_max.atanh()
    }

    /// The σ driving a σ-segment or a pulled-back segment.
    pub fn sigma(&self) -> Option<&SigmaFunction> {
        match &self.curve {
            Curve::Sigma(s) | Curve::PulledBack(s) => Some(s),
            Curve::Charted(inner) => inner.sigma(),
            Curve::Standard { .. } => None,
        }
    }

    /// Point at parameter `t ∈ [0, T]` (clamped).
    pub fn point_at(&self, t: f64) -> BlockPoint {
        let t = t.clamp(0.0, self.param_max);
        let k = self.k.k();
        match &self.curve {
            Curve::Standard { p, q, delta } => {
                if t == 0.0 {
                    return *p;
                }
                if t == *delta {
                    return *q;
                }
                BlockPoint::new(standard_block(p.c1, q.c1, k, *delta, t), standard_block(p.c2, q.c2, k, *delta, t))
            }
            Curve::Sigma(sigma) => BlockPoint::new(sigma.eval(t), (k - t) / (k * (1.0 - k * t))),
            Curve::PulledBack(sigma) => BlockPoint::new(t / k, chart_block(sigma.eval(t), k)),
            Curve::Charted(inner) => chart_unchecked(inner.point_at(t), k),
        }
    }

    /// Parameter of the point at distance `r` from the chosen end.
    pub fn param_at_arclength(&self, from: End, r: f64) -> Result<f64> {
        let total = self.total_length();
        if !r.is_finite() || r < 0.0 || r > total * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("arclength r = {r} outside [0, {total}]")));
        }
        let s = r.tanh();
        Ok(match from {
            End::Start => s.min(self.param_max),
            // tanh(artanh T - r), written to avoid cancellation near the end
            End::End => ((self.param_max - s) / (1.0 - self.param_max * s)).max(0.0),
        })
    }

    pub fn point_at_arclength(&self, from: End, r: f64) -> Result<BlockPoint> {
        Ok(self.point_at(self.param_at_arclength(from, r)?))
    }

    /// Blockwise Möbius offsets `k·c_i ⊖ k·v_i` of the point at arclength `r`
    /// from the end `v`.
    ///
    /// These are the coordinates of the point in a chart centred at `v`, so
    /// `τ(x, y) = max_i artanh|u_i ⊖ w_i|` for two points seen from the same
    /// vertex. Each curve supplies them in closed form; subtracting absolute
    /// coordinates instead would lose about `ε/r` relative accuracy.
    pub fn local_offsets(&self, from: End, r: f64) -> Result<[f64; 2]> {
        let total = self.total_length();
        if !r.is_finite() || r < 0.0 || r > total * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("arclength r = {r} outside [0, {total}]")));
        }
        let cap = self.param_max;
        let s = r.tanh().min(cap);
        // h: parameter distance from the chosen end, t: absolute parameter
        let (h, t) = match from {
            End::Start => (s, s),
            End::End => {
                let h = (s * (1.0 - cap * cap) / (1.0 - cap * s)).min(cap);
                (h, ((cap - s) / (1.0 - cap * s)).max(0.0))
            }
        };
        let k = self.k.k();
        // k·e / (1 - k²(1 + e)) = k(1+e) ⊖ k
        let lift = |e: f64| k * e / (1.0 - k * k * (1.0 + e));
        Ok(match &self.curve {
            Curve::Standard { p, q, delta } => {
                let m = [
                    mobius_diff_unchecked(k * q.c1, k * p.c1),
                    mobius_diff_unchecked(k * q.c2, k * p.c2),
                ];
                match from {
                    End::Start => m.map(|mi| t * mi / delta),
                    End::End => m.map(|mi| -mi * (h / delta) / (1.0 - t * mi * mi / delta)),
                }
            }
            Curve::Sigma(sigma) => match from {
                End::Start => [lift(sigma.excess_at_zero(h)), -h],
                End::End => [lift(sigma.excess_at_k(-h)), h / (1.0 - k * t)],
            },
            Curve::PulledBack(sigma) => match from {
                End::Start => [h, -lift(sigma.excess_at_zero(h))],
                End::End => [-h / (1.0 - k * t), -lift(sigma.excess_at_k(-h))],
            },
            // the chart reverses each block's orientation
            Curve::Charted(inner) => inner.local_offsets(from, r)?.map(|u| -u),
        })
    }

    /// Which end (if any) lies within `tol` of `p`, componentwise.
    pub fn end_at(&self, p: BlockPoint, tol: f64) -> Option<End> {
        if self.start.max_abs_diff(p) <= tol {
            Some(End::Start)
        } else if self.end.max_abs_diff(p) <= tol {
            Some(End::End)
        } else {
            None
        }
    }

    /// The image of this segment under the allowable chart based at `[μ]`.
    pub fn charted(&self) -> GeodesicSegment {
        let k = self.k.k();
        GeodesicSegment {
            k: self.k,
            kind: SegmentKind::Charted,
            start: chart_unchecked(self.start, k),
            end: chart_unchecked(self.end, k),
            param_max: self.param_max,
            curve: Curve::Charted(Box::new(self.clone())),
        }
    }
}

/// Standard segment `α_{p,q}` from `p` to `q`.
pub fn standard_segment(p: BlockPoint, q: BlockPoint, k: Modulus) -> Result<GeodesicSegment> {
    p.validate(k)?;
    q.validate(k)?;
    let kk = k.k();
    let delta = crate::block::kernel(p, q, kk);
    if delta == 0.0 {
        return Err(Error::DegenerateSegment);
    }
    Ok(GeodesicSegment { k, kind: SegmentKind::Standard, start: p, end: q, param_max: delta, curve: Curve::Standard { p, q, delta } })
}

fn check_sigma_modulus(sigma: &SigmaFunction, k: Modulus) -> Result<()> {
    if sigma.k() != k {
        return Err(Error::invalid(format!("sigma built for k = {} used with k = {}", sigma.k().k(), k.k())));
    }
    Ok(())
}

/// `β_σ`: blocks `(σ(t), (k-t)/(k(1-kt)))`, `t ∈ [0, k]`, from `[μ]` to `[μ1]`.
pub fn sigma_segment(sigma: &SigmaFunction, k: Modulus) -> Result<GeodesicSegment> {
    check_sigma_modulus(sigma, k)?;
    validate_sigma(sigma, k, DEFAULT_SAMPLES).into_result()?;
    let seg = GeodesicSegment {
        k,
        kind: SegmentKind::Sigma,
        start: BlockPoint::MU,
        end: BlockPoint::MU1,
        param_max: k.k(),
        curve: Curve::Sigma(sigma.clone()),
    };
    Ok(GeodesicSegment { start: seg.point_at(0.0), end: seg.point_at(k.k()), ..seg })
}

/// `γ̃`: blocks `(t/k, (1-σ̃)/(1-k²σ̃))`, `t ∈ [0, k]`, from `[0]` to `[μ1]`.
///
/// In the chart based at `[μ]` this is `((k-t)/(k(1-kt)), σ̃(t))`, a σ-curve
/// with the roles of the two blocks exchanged.
pub fn pulled_back_segment(sigma_tilde: &SigmaFunction, k: Modulus) -> Result<GeodesicSegment> {
    check_sigma_modulus(sigma_tilde, k)?;
    validate_sigma(sigma_tilde, k, DEFAULT_SAMPLES).into_result()?;
    let seg = GeodesicSegment {
        k,
        kind: SegmentKind::PulledBack,
        start: BlockPoint::BASE,
        end: BlockPoint::MU1,
        param_max: k.k(),
        curve: Curve::PulledBack(sigma_tilde.clone()),
    };
    Ok(GeodesicSegment { start: seg.point_at(0.0), end: seg.point_at(k.k()), ..seg })
}

/// `α_μ`, from `[0]` to `[μ]`.
pub fn alpha_mu(k: Modulus) -> GeodesicSegment {
    standard_segment(BlockPoint::BASE, BlockPoint::MU, k).expect("[0] and [μ] are valid and distinct")
}

/// `α_{μ1}`, from `[0]` to `[μ1]`.
pub fn alpha_mu1(k: Modulus) -> GeodesicSegment {
    standard_segment(BlockPoint::BASE, BlockPoint::MU1, k).expect("[0] and [μ1] are valid and distinct")
}

/// Largest gap between two segments at equal arclength from their starts,
/// sampled on `samples` points of the shorter one. Returns `(r, gap)`.
pub fn max_aligned_gap(a: &GeodesicSegment, b: &GeodesicSegment, samples: usize) -> (f64, f64) {
    let total = a.total_length().min(b.total_length());
    let n = samples.max(2);
    let k = a.modulus().k();
    (0..n)
        .map(|j| {
            let r = total * j as f64 / (n - 1) as f64;
            let pa = a.point_at_arclength(End::Start, r).expect("r within length");
            let pb = b.point_at_arclength(End::Start, r).expect("r within length");
            (r, distance_unchecked(pa, pb, k))
        })
        .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Two segments with a common start count as distinct when some pair of
/// equal-arclength points is farther apart than `1e-6`.
pub fn segments_distinct(a: &GeodesicSegment, b: &GeodesicSegment) -> bool {
    max_aligned_gap(a, b, 2001).1 > 1e-6
}
