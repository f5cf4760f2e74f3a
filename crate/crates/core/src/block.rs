//! The two-block model slice.
//!
//! A [`BlockPoint`] `(c1, c2)` stands for the class of
//! `(c1·χ_{R1} + c2·χ_{R2})·μ`, where `μ` is a fixed extremal coefficient with
//! `|μ| ≡ k`. Every such composition is taken to be extremal, which makes the
//! Teichmüller distance exact: it is the larger of the two blockwise
//! hyperbolic distances between `k·p_i` and `k·q_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{hyp_dist_unchecked, mobius_diff_unchecked, Modulus, BOUNDARY_MARGIN};

/// Real block coefficients of a model point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockPoint {
    pub c1: f64,
    pub c2: f64,
}

impl BlockPoint {
    /// The base point `[0]`.
    pub const BASE: BlockPoint = BlockPoint { c1: 0.0, c2: 0.0 };
    /// `[μ]`.
    pub const MU: BlockPoint = BlockPoint { c1: 1.0, c2: 1.0 };
    /// `[μ1] = [χ_{R1} μ]`.
    pub const MU1: BlockPoint = BlockPoint { c1: 1.0, c2: 0.0 };

    pub const fn new(c1: f64, c2: f64) -> Self {
        BlockPoint { c1, c2 }
    }

    pub fn blocks(self) -> [f64; 2] {
        [self.c1, self.c2]
    }

    /// Checks `|c_i|·k < 1` for both blocks.
    pub fn validate(self, k: Modulus) -> Result<()> {
        for (i, c) in self.blocks().into_iter().enumerate() {
            if !c.is_finite() || (c * k.k()).abs() >= 1.0 - BOUNDARY_MARGIN {
                return Err(Error::invalid(format!(
                    "block coefficient c{} = {c} violates |c|·k < 1 at k = {}",
                    i + 1,
                    k.k()
                )));
            }
        }
        Ok(())
    }

    /// Largest componentwise gap, used for endpoint matching.
    pub fn max_abs_diff(self, other: BlockPoint) -> f64 {
        (self.c1 - other.c1).abs().max((self.c2 - other.c2).abs())
    }
}

/// A direction `(v1·χ_{R1} + v2·χ_{R2})·μ` in the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentBlock {
    pub v1: f64,
    pub v2: f64,
}

impl std::ops::Sub for TangentBlock {
    type Output = TangentBlock;

    fn sub(self, other: TangentBlock) -> TangentBlock {
        TangentBlock::new(self.v1 - other.v1, self.v2 - other.v2)
    }
}

impl TangentBlock {
    pub const fn new(v1: f64, v2: f64) -> Self {
        TangentBlock { v1, v2 }
    }

    pub fn scale(self, s: f64) -> TangentBlock {
        TangentBlock::new(s * self.v1, s * self.v2)
    }

    pub fn sup_norm(self) -> f64 {
        self.v1.abs().max(self.v2.abs())
    }

    fn check_finite(self) -> Result<()> {
        if self.v1.is_finite() && self.v2.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("direction ({}, {}) is not finite", self.v1, self.v2)))
        }
    }
}

/// The blockwise kernel `max_i k|p_i - q_i| / (1 - k² p_i q_i)`, i.e. the sup
/// norm of the coefficient of the composition between the two points.
pub(crate) fn kernel(p: BlockPoint, q: BlockPoint, k: f64) -> f64 {
    let m1 = mobius_diff_unchecked(k * p.c1, k * q.c1).abs();
    let m2 = mobius_diff_unchecked(k * p.c2, k * q.c2).abs();
    m1.max(m2)
}

/// Teichmüller distance between two model points.
pub fn distance(p: BlockPoint, q: BlockPoint, k: Modulus) -> Result<f64> {
    p.validate(k)?;
    q.validate(k)?;
    Ok(distance_unchecked(p, q, k.k()))
}

#[inline]
pub(crate) fn distance_unchecked(p: BlockPoint, q: BlockPoint, k: f64) -> f64 {
    hyp_dist_unchecked(k * p.c1, k * q.c1).max(hyp_dist_unchecked(k * p.c2, k * q.c2))
}

/// `H((v1 χ_{R1} + v2 χ_{R2}) μ) = k·max(|v1|, |v2|)`.
pub fn h_functional(v: TangentBlock, k: Modulus) -> Result<f64> {
    v.check_finite()?;
    Ok(k.k() * v.sup_norm())
}

/// Coordinates of a point in the chart based at `[μ]`.
///
/// Blockwise `c ↦ (1 - c) / (1 - k² c)`; on `k·c` this is the disk
/// automorphism `x ↦ (k - x) / (1 - kx)`, so the chart is an isometric
/// involution sending `[μ]` to `[0]`.
pub fn allowable_chart(p: BlockPoint, k: Modulus) -> Result<BlockPoint> {
    p.validate(k)?;
    Ok(chart_unchecked(p, k.k()))
}

#[inline]
pub(crate) fn chart_block(c: f64, k: f64) -> f64 {
    (1.0 - c) / (1.0 - k * k * c)
}

#[inline]
pub(crate) fn chart_unchecked(p: BlockPoint, k: f64) -> BlockPoint {
    BlockPoint::new(chart_block(p.c1, k), chart_block(p.c2, k))
}

/// Finite-difference quotients of `τ(t·v, t·w) / t` and their extrapolation to `t → 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEstimate {
    /// `(t, τ(t·v, t·w) / t)` in schedule order.
    pub quotients: Vec<(f64, f64)>,
    /// Polynomial (Richardson/Neville) extrapolation of the quotients to `t = 0`.
    pub limit: f64,
}

/// First-order variation of the distance along two rays from the base point.
///
/// The limit should equal `h_functional(v - w, k)`.
pub fn variation_slope(
    v: TangentBlock,
    w: TangentBlock,
    k: Modulus,
    t_schedule: &[f64],
) -> Result<SlopeEstimate> {
    v.check_finite()?;
    w.check_finite()?;
    if t_schedule.is_empty() {
        return Err(Error::invalid("empty t schedule"));
    }
    let mut quotients = Vec::with_capacity(t_schedule.len());
    for &t in t_schedule {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("schedule value t = {t} must be positive")));
        }
        let p = BlockPoint::new(t * v.v1, t * v.v2);
        let q = BlockPoint::new(t * w.v1, t * w.v2);
        quotients.push((t, distance(p, q, k)? / t));
    }
    // Neville extrapolation on the smallest few steps.
    let mut tail: Vec<(f64, f64)> = quotients.clone();
    tail.sort_by(|a, b| b.0.total_cmp(&a.0));
    let take = tail.len().min(4);
    let tail = &tail[tail.len() - take..];
    let limit = neville_at_zero(tail);
    Ok(SlopeEstimate { quotients, limit })
}

/// Value at `x = 0` of the interpolating polynomial through `points`.
pub(crate) fn neville_at_zero(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut p: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}
