//! Text descriptors for points, σ functions and segments.
//!
//! ```text
//! point    := c1,c2
//! vertex   := base | mu | mu1 | point
//! sigma    := constant-one | oscillatory | midpoint-pinned
//!           | prescribed:d0=X,dk=Y[,seed=N]
//!           | custom:t=v;t=v;...          (σ(0) = σ(k) = 1 are implied)
//! segment  := alpha-mu | alpha-mu1 | standard:point:point
//!           | beta:sigma | gamma:sigma | chart:segment
//! angle    := number | pi | Npi | pi/D | Npi/D
//! ```

use std::f64::consts::PI;
use std::fmt;

use teichlab_core::angles::Tolerances;
use teichlab_core::geodesics::{
    alpha_mu, alpha_mu1, pulled_back_segment, sigma_midpoint_pinned, sigma_oscillatory, sigma_prescribed,
    sigma_segment, standard_segment, BlendParams, GeodesicSegment,
};
use teichlab_core::{BlockPoint, Modulus, Schedule, SigmaFunction};

use crate::error::{usage, CliError};

pub fn number(s: &str, what: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| usage(format!("{what}: cannot parse '{s}' as a number")))?;
    if !v.is_finite() {
        return Err(usage(format!("{what}: '{s}' is not finite")));
    }
    Ok(v)
}

pub fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|x| number(x, what)).collect()
}

/// A number, optionally written as a rational multiple of π.
pub fn angle(s: &str, what: &str) -> Result<f64, CliError> {
    let t = s.trim();
    let Some(pos) = t.find("pi") else { return number(t, what) };
    let coef = match &t[..pos] {
        "" => 1.0,
        "-" => -1.0,
        c => number(c.trim_end_matches('*'), what)?,
    };
    let div = match t[pos + 2..].strip_prefix('/') {
        Some(d) => number(d, what)?,
        None if t[pos + 2..].is_empty() => 1.0,
        None => return Err(usage(format!("{what}: cannot parse '{s}'"))),
    };
    Ok(coef * PI / div)
}

pub fn angles(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|x| angle(x, what)).collect()
}

pub fn point(s: &str) -> Result<BlockPoint, CliError> {
    match numbers(s, "point")?.as_slice() {
        [c1, c2] => Ok(BlockPoint::new(*c1, *c2)),
        _ => Err(usage(format!("point '{s}' must be c1,c2"))),
    }
}

pub fn vertex(s: &str) -> Result<BlockPoint, CliError> {
    match s.trim() {
        "base" | "0" => Ok(BlockPoint::BASE),
        "mu" => Ok(BlockPoint::MU),
        "mu1" => Ok(BlockPoint::MU1),
        other => point(other),
    }
}

pub fn schedule(s: &str) -> Result<Schedule, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let [r0, ratio, steps] = parts.as_slice() else {
        return Err(usage(format!("schedule '{s}' must be r0,ratio,steps")));
    };
    let steps = steps.trim().parse().map_err(|_| usage(format!("schedule steps '{steps}' is not a positive integer")))?;
    Ok(Schedule { r0: number(r0, "schedule r0")?, ratio: number(ratio, "schedule ratio")?, steps })
}

/// `conv,osc` or `conv,osc,window`.
pub fn tolerances(s: &str) -> Result<Tolerances, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let (conv, osc, window) = match parts.as_slice() {
        [c, o] => (c, o, None),
        [c, o, w] => (c, o, Some(w)),
        _ => return Err(usage(format!("tolerances '{s}' must be conv,osc[,window]"))),
    };
    let window = match window {
        Some(w) => w.trim().parse().map_err(|_| usage(format!("window '{w}' is not a positive integer")))?,
        None => Tolerances::default().window,
    };
    let tol = Tolerances { conv_tol: number(conv, "conv tolerance")?, osc_tol: number(osc, "osc tolerance")?, window };
    if !(tol.conv_tol > 0.0 && tol.osc_tol > 0.0 && tol.window >= 2) {
        return Err(usage("tolerances must be positive and the window at least 2"));
    }
    Ok(tol)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    ConstantOne,
    Oscillatory,
    MidpointPinned,
    Prescribed { d0: f64, dk: f64, seed: Option<u64> },
    Custom(Vec<(f64, f64)>),
}

impl SigmaSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let (tag, args) = match s.trim().split_once(':') {
            Some((t, a)) => (t, Some(a)),
            None => (s.trim(), None),
        };
        match (tag, args) {
            ("constant-one", None) => Ok(SigmaSpec::ConstantOne),
            ("oscillatory", None) => Ok(SigmaSpec::Oscillatory),
            ("midpoint-pinned", None) => Ok(SigmaSpec::MidpointPinned),
            ("prescribed", Some(a)) => {
                let (mut d0, mut dk, mut seed) = (None, None, None);
                for kv in a.split(',') {
                    let (key, val) =
                        kv.split_once('=').ok_or_else(|| usage(format!("prescribed sigma: expected key=value, got '{kv}'")))?;
                    match key.trim() {
                        "d0" => d0 = Some(number(val, "d0")?),
                        "dk" => dk = Some(number(val, "dk")?),
                        "seed" => {
                            seed = Some(val.trim().parse().map_err(|_| usage(format!("seed '{val}' is not an integer")))?)
                        }
                        other => return Err(usage(format!("prescribed sigma: unknown key '{other}'"))),
                    }
                }
                match (d0, dk) {
                    (Some(d0), Some(dk)) => Ok(SigmaSpec::Prescribed { d0, dk, seed }),
                    _ => Err(usage("prescribed sigma needs both d0 and dk")),
                }
            }
            ("custom", Some(a)) => {
                let knots = a
                    .split(';')
                    .map(|kv| {
                        let (t, v) =
                            kv.split_once('=').ok_or_else(|| usage(format!("custom sigma: expected t=value, got '{kv}'")))?;
                        Ok((number(t, "custom knot t")?, number(v, "custom knot value")?))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(SigmaSpec::Custom(knots))
            }
            _ => Err(usage(format!("unknown sigma family '{s}'"))),
        }
    }

    pub fn build(&self, k: Modulus, default_seed: u64) -> Result<SigmaFunction, CliError> {
        Ok(match self {
            SigmaSpec::ConstantOne => SigmaFunction::constant_one(k),
            SigmaSpec::Oscillatory => sigma_oscillatory(k),
            SigmaSpec::MidpointPinned => sigma_midpoint_pinned(k),
            SigmaSpec::Prescribed { d0, dk, seed } => {
                let params = BlendParams { seed: seed.unwrap_or(default_seed), ..BlendParams::default() };
                sigma_prescribed(*d0, *dk, k, &params)?
            }
            SigmaSpec::Custom(knots) => custom_sigma(knots, k)?,
        })
    }
}

impl fmt::Display for SigmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaSpec::ConstantOne => write!(f, "constant-one"),
            SigmaSpec::Oscillatory => write!(f, "oscillatory"),
            SigmaSpec::MidpointPinned => write!(f, "midpoint-pinned"),
            SigmaSpec::Prescribed { d0, dk, seed } => {
                write!(f, "prescribed:d0={d0},dk={dk}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            SigmaSpec::Custom(knots) => {
                let parts: Vec<String> = knots.iter().map(|(t, v)| format!("{t}={v}")).collect();
                write!(f, "custom:{}", parts.join(";"))
            }
        }
    }
}

/// Piecewise-linear σ through `(0, 1)`, the given knots and `(k, 1)`.
fn custom_sigma(knots: &[(f64, f64)], k: Modulus) -> Result<SigmaFunction, CliError> {
    let kk = k.k();
    let mut pts = vec![(0.0, 1.0)];
    pts.extend_from_slice(knots);
    pts.push((kk, 1.0));
    if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(usage("custom sigma knots must be strictly increasing inside (0, k)"));
    }
    let slope = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
    let n = pts.len();
    let (d0, dk) = (slope(pts[0], pts[1]), slope(pts[n - 2], pts[n - 1]));
    let f = move |t: f64| {
        let i = pts.partition_point(|p| p.0 <= t).clamp(1, pts.len() - 1);
        let (a, b) = (pts[i - 1], pts[i]);
        a.1 + (t - a.0) * (b.1 - a.1) / (b.0 - a.0)
    };
    Ok(SigmaFunction::custom(k, f, Some(d0), Some(dk))?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentSpec {
    AlphaMu,
    AlphaMu1,
    Standard(BlockPoint, BlockPoint),
    Beta(SigmaSpec),
    Gamma(SigmaSpec),
    Chart(Box<SegmentSpec>),
}

impl SegmentSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        match s.split_once(':') {
            None => match s {
                "alpha-mu" => Ok(SegmentSpec::AlphaMu),
                "alpha-mu1" => Ok(SegmentSpec::AlphaMu1),
                _ => Err(usage(format!("unknown segment '{s}'"))),
            },
            Some(("standard", rest)) => {
                let (p, q) = rest.split_once(':').ok_or_else(|| usage("standard segment must be standard:c1,c2:c1,c2"))?;
                Ok(SegmentSpec::Standard(point(p)?, point(q)?))
            }
            Some(("beta", rest)) => Ok(SegmentSpec::Beta(SigmaSpec::parse(rest)?)),
            Some(("gamma", rest)) => Ok(SegmentSpec::Gamma(SigmaSpec::parse(rest)?)),
            Some(("chart", rest)) => Ok(SegmentSpec::Chart(Box::new(SegmentSpec::parse(rest)?))),
            Some((tag, _)) => Err(usage(format!("unknown segment kind '{tag}'"))),
        }
    }

    pub fn build(&self, k: Modulus, default_seed: u64) -> Result<GeodesicSegment, CliError> {
        Ok(match self {
            SegmentSpec::AlphaMu => alpha_mu(k),
            SegmentSpec::AlphaMu1 => alpha_mu1(k),
            SegmentSpec::Standard(p, q) => {
                p.validate(k)?;
                q.validate(k)?;
                standard_segment(*p, *q, k)?
            }
            SegmentSpec::Beta(s) => sigma_segment(&s.build(k, default_seed)?, k)?,
            SegmentSpec::Gamma(s) => pulled_back_segment(&s.build(k, default_seed)?, k)?,
            SegmentSpec::Chart(inner) => inner.build(k, default_seed)?.charted(),
        })
    }
}

impl fmt::Display for SegmentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentSpec::AlphaMu => write!(f, "alpha-mu"),
            SegmentSpec::AlphaMu1 => write!(f, "alpha-mu1"),
            SegmentSpec::Standard(p, q) => write!(f, "standard:{},{}:{},{}", p.c1, p.c2, q.c1, q.c2),
            SegmentSpec::Beta(s) => write!(f, "beta:{s}"),
            SegmentSpec::Gamma(s) => write!(f, "gamma:{s}"),
            SegmentSpec::Chart(inner) => write!(f, "chart:{inner}"),
        }
    }
}
