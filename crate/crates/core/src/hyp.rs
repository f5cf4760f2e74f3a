//! Scalar hyperbolic calculus on the open interval (-1, 1).
//!
//! Every block of the two-block model is a copy of this interval with the
//! metric `artanh |(a - b) / (1 - ab)|`, so the rest of the crate reduces to
//! the handful of functions here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arguments closer than this to the unit circle are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// The base modulus `k = |μ|` of the fixed extremal coefficient, `0 < k < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 || k >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::invalid(format!("modulus k = {k} must lie in (0, 1)")));
        }
        Ok(Modulus(k))
    }

    /// The modulus whose base geodesic has length `l`, i.e. `k = tanh l`.
    pub fn from_length(l: f64) -> Result<Self> {
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::invalid(format!("length l = {l} must be positive and finite")));
        }
        Modulus::new(l.tanh())
    }

    #[inline]
    pub fn k(self) -> f64 {
        self.0
    }

    /// `l = artanh k`, the Teichmüller length of every side built on this modulus.
    pub fn length(self) -> f64 {
        self.0.atanh()
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Modulus::new(k)
    }
}

impl From<Modulus> for f64 {
    fn from(m: Modulus) -> f64 {
        m.0
    }
}

fn check_open_unit(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x.abs() >= 1.0 - BOUNDARY_MARGIN {
        return Err(Error::invalid(format!("{name} = {x} must lie in (-1, 1)")));
    }
    Ok(())
}

/// `(a - b) / (1 - ab)`.
pub fn mobius_diff(a: f64, b: f64) -> Result<f64> {
    check_open_unit(a, "a")?;
    check_open_unit(b, "b")?;
    Ok(mobius_diff_unchecked(a, b))
}

#[inline]
pub(crate) fn mobius_diff_unchecked(a: f64, b: f64) -> f64 {
    (a - b) / (1.0 - a * b)
}

/// Hyperbolic distance `artanh |mobius_diff(a, b)|`.
pub fn hyp_dist(a: f64, b: f64) -> Result<f64> {
    check_open_unit(a, "a")?;
    check_open_unit(b, "b")?;
    Ok(hyp_dist_unchecked(a, b))
}

pub(crate) fn hyp_dist_unchecked(a: f64, b: f64) -> f64 {
    let d = mobius_diff_unchecked(a, b).abs();
    if d < 0.5 {
        return d.atanh();
    }
    // 1 ± |δ| factor as (1 ± hi)(1 ∓ lo) / (1 - ab); forming 1 - |δ| directly
    // costs ε/(1 - |δ|) near the boundary
    let (hi, lo) = (a.max(b), a.min(b));
    0.5 * ((1.0 + hi) * (1.0 - lo) / ((1.0 - hi) * (1.0 + lo))).ln()
}

/// Same as [`Modulus::from_length`], as a free function.
pub fn modulus_from_length(l: f64) -> Result<Modulus> {
    Modulus::from_length(l)
}

/// Inverts `r = artanh t`.
pub fn param_from_arclength(r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::invalid(format!("arclength r = {r} must be finite and >= 0")));
    }
    Ok(r.tanh())
}

/// `artanh t`, the distance from the start of a unit-speed segment at parameter `t`.
pub fn arclength_from_param(t: f64) -> Result<f64> {
    if !t.is_finite() || !(0.0..1.0).contains(&t) {
        return Err(Error::invalid(format!("parameter t = {t} must lie in [0, 1)")));
    }
    Ok(t.atanh())
}
