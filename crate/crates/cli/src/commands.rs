use std::f64::consts::FRAC_PI_3;

use serde::Serialize;
use teichlab_core::angles::{
    angle_at_mu1_standard, angle_at_mu1_with_third_side, angle_at_mu_closed, angle_base_standard, derivative_probe,
    AngleResult, DerivativeProbe, SigmaEnd, Verdict,
};
use teichlab_core::geodesics::{validate_sigma, GeodesicSegment, SigmaReport, DEFAULT_SAMPLES};
use teichlab_core::triangles::{curvature_probe, synthesize_family_with, CurvatureProbe, TriangleReport, TriangleSpec};
use teichlab_core::{angle_numeric, distance, BlockPoint, Error, Modulus, Schedule, TangentBlock};

use crate::config::{Command, FileConfig, Format, Resolved};
use crate::error::{usage, CliError};
use crate::output::{csv_field, emit, to_csv, to_json};
use crate::parse::{self, SegmentSpec, SigmaSpec};

pub fn run(cmd: &Command, file: &FileConfig, cfg: &Resolved) -> Result<(), CliError> {
    if cfg.format == Format::Csv && !matches!(cmd, Command::Angle { .. } | Command::Sweep { .. }) {
        return Err(usage(format!("csv output is only available for angle and sweep, not {}", cmd.name())));
    }
    let text = match cmd {
        Command::Distance { p, q } => distance_cmd(p, q, file, cfg)?,
        Command::Angle { a, b, vertex } => angle_cmd(a, b, vertex, file, cfg)?,
        Command::Triangle { theta, family } => triangle_cmd(theta, *family, file, cfg)?,
        Command::Probe => probe_cmd(cfg)?,
        Command::Sweep { vertex, thetas, ks } => sweep_cmd(vertex, thetas, ks, file, cfg)?,
        Command::SigmaValidate { sigma, samples } => sigma_validate_cmd(sigma, *samples, file, cfg)?,
    };
    emit(&text, cfg.output.as_deref())
}

fn required<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing --{name}")))
}

fn point_arg(flag: &Option<String>, file: Option<[f64; 2]>, name: &str) -> Result<BlockPoint, CliError> {
    match (flag, file) {
        (Some(s), _) => parse::point(s),
        (None, Some([c1, c2])) => Ok(BlockPoint::new(c1, c2)),
        (None, None) => Err(usage(format!("missing --{name}"))),
    }
}

#[derive(Serialize)]
struct DistanceRecord {
    command: &'static str,
    k: f64,
    p: BlockPoint,
    q: BlockPoint,
    tau: f64,
}

fn distance_cmd(p: &Option<String>, q: &Option<String>, file: &FileConfig, cfg: &Resolved) -> Result<String, CliError> {
    let k = cfg.modulus()?;
    let p = point_arg(p, file.p, "p")?;
    let q = point_arg(q, file.q, "q")?;
    let tau = distance(p, q, k)?;
    to_json(&DistanceRecord { command: "distance", k: k.k(), p, q, tau })
}

#[derive(Serialize)]
struct AngleRecord {
    command: &'static str,
    k: f64,
    a: String,
    b: String,
    vertex: BlockPoint,
    result: AngleResult,
    /// Closed-form value when the pair is one the model predicts.
    predicted: Option<f64>,
}

/// Direction from `[0]` of a standard segment starting there.
fn base_direction(spec: &SegmentSpec, seg: &GeodesicSegment) -> Option<TangentBlock> {
    match spec {
        SegmentSpec::AlphaMu | SegmentSpec::AlphaMu1 | SegmentSpec::Standard(..) if seg.start() == BlockPoint::BASE => {
            Some(TangentBlock::new(seg.end().c1, seg.end().c2))
        }
        _ => None,
    }
}

fn predicted_angle(
    (sa, a): (&SegmentSpec, &GeodesicSegment),
    (sb, b): (&SegmentSpec, &GeodesicSegment),
    vertex: BlockPoint,
    k: Modulus,
) -> Result<Option<f64>, CliError> {
    use SegmentSpec::*;
    let value = match (sa, sb) {
        (AlphaMu, Beta(_)) | (Beta(_), AlphaMu) if vertex == BlockPoint::MU => {
            let s = if matches!(sa, Beta(_)) { a } else { b };
            angle_at_mu_closed(s.sigma().expect("beta has sigma"), k)
        }
        (AlphaMu1, Beta(_)) | (Beta(_), AlphaMu1) if vertex == BlockPoint::MU1 => {
            let s = if matches!(sa, Beta(_)) { a } else { b };
            angle_at_mu1_standard(s.sigma().expect("beta has sigma"), k)
        }
        (Beta(_), Gamma(_)) | (Gamma(_), Beta(_)) if vertex == BlockPoint::MU1 => {
            let (beta, gamma) = if matches!(sa, Beta(_)) { (a, b) } else { (b, a) };
            angle_at_mu1_with_third_side(beta.sigma().expect("sigma"), gamma.sigma().expect("sigma"), k)
        }
        (AlphaMu, Gamma(_)) | (Gamma(_), AlphaMu) if vertex == BlockPoint::BASE => {
            let g = if matches!(sa, Gamma(_)) { a } else { b };
            angle_at_mu_closed(g.sigma().expect("gamma has sigma"), k)
        }
        _ if vertex == BlockPoint::BASE => match (base_direction(sa, a), base_direction(sb, b)) {
            (Some(v), Some(w)) => angle_base_standard(v, w, k),
            _ => return Ok(None),
        },
        _ => return Ok(None),
    };
    match value {
        Ok(v) => Ok(Some(v)),
        Err(Error::ExistenceUnknown(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn angle_cmd(
    a: &Option<String>,
    b: &Option<String>,
    vertex: &Option<String>,
    file: &FileConfig,
    cfg: &Resolved,
) -> Result<String, CliError> {
    let k = cfg.modulus()?;
    let sa = SegmentSpec::parse(&required(a.clone().or_else(|| file.a.clone()), "a")?)?;
    let sb = SegmentSpec::parse(&required(b.clone().or_else(|| file.b.clone()), "b")?)?;
    let v = parse::vertex(&required(vertex.clone().or_else(|| file.vertex.clone()), "vertex")?)?;
    let (a, b) = (sa.build(k, cfg.seed)?, sb.build(k, cfg.seed)?);
    let result = angle_numeric(&a, &b, v, &cfg.schedule, &cfg.tol)?;
    if cfg.format == Format::Csv {
        let rows: Vec<Vec<String>> =
            result.diagnostics.iter().map(|s| vec![csv_field(s.r), csv_field(s.ratio)]).collect();
        return to_csv(&["r", "ratio"], &rows);
    }
    let predicted = predicted_angle((&sa, &a), (&sb, &b), v, k)?;
    to_json(&AngleRecord { command: "angle", k: k.k(), a: sa.to_string(), b: sb.to_string(), vertex: v, result, predicted })
}

#[derive(Serialize)]
struct TriangleRecord {
    command: &'static str,
    spec: TriangleSpec,
    reports: Vec<TriangleReport>,
}

fn triangle_cmd(theta: &Option<String>, family: Option<usize>, file: &FileConfig, cfg: &Resolved) -> Result<String, CliError> {
    let k = cfg.modulus()?;
    let raw = match theta {
        Some(s) => parse::angles(s, "theta")?,
        None => required(file.theta.clone(), "theta")?,
    };
    let [t0, t1, t2] = raw.as_slice() else {
        return Err(usage("theta needs three angles: [0], [mu], [mu1]"));
    };
    let spec = TriangleSpec {
        l: k.length(),
        theta: [cfg.angle_in(*t0), cfg.angle_in(*t1), cfg.angle_in(*t2)],
        family_seed: cfg.seed,
    };
    let n = family.or(file.family).unwrap_or(1);
    let reports = synthesize_family_with(&spec, n, &cfg.schedule, &cfg.tol)?;
    to_json(&TriangleRecord { command: "triangle", spec, reports })
}

#[derive(Serialize)]
struct ProbeRecord {
    command: &'static str,
    probe: CurvatureProbe,
}

fn probe_cmd(cfg: &Resolved) -> Result<String, CliError> {
    to_json(&ProbeRecord { command: "probe", probe: curvature_probe(cfg.modulus()?)? })
}

#[derive(Serialize)]
struct SweepRow {
    k: f64,
    vertex: &'static str,
    target: f64,
    predicted: f64,
    measured: Option<f64>,
    verdict: Verdict,
    error: Option<f64>,
}

#[derive(Serialize)]
struct SweepRecord {
    command: &'static str,
    rows: Vec<SweepRow>,
}

fn sweep_cmd(
    vertex: &Option<String>,
    thetas: &Option<String>,
    ks: &Option<String>,
    file: &FileConfig,
    cfg: &Resolved,
) -> Result<String, CliError> {
    let name = vertex.clone().or_else(|| file.vertex.clone()).unwrap_or_else(|| "mu".into());
    let (idx, label) = match name.as_str() {
        "base" => (0, "base"),
        "mu" => (1, "mu"),
        "mu1" => (2, "mu1"),
        other => return Err(usage(format!("sweep vertex '{other}' must be base, mu or mu1"))),
    };
    let targets: Vec<f64> = match (thetas, &file.thetas) {
        (Some(s), _) => parse::angles(s, "thetas")?.into_iter().map(|t| cfg.angle_in(t)).collect(),
        (None, Some(v)) => v.iter().map(|&t| cfg.angle_in(t)).collect(),
        (None, None) => (0..5).map(|i| i as f64 * std::f64::consts::FRAC_PI_4).collect(),
    };
    let moduli: Vec<Modulus> = match (ks, &file.ks) {
        (Some(s), _) => parse::numbers(s, "ks")?.into_iter().map(Modulus::new).collect::<Result<_, _>>()?,
        (None, Some(v)) => v.iter().map(|&x| Modulus::new(x)).collect::<Result<_, _>>()?,
        (None, None) => vec![cfg.modulus()?],
    };
    let mut rows = Vec::new();
    for k in &moduli {
        for &target in &targets {
            let mut theta = [FRAC_PI_3; 3];
            theta[idx] = target;
            let spec = TriangleSpec { l: k.length(), theta, family_seed: cfg.seed };
            let report = synthesize_family_with(&spec, 1, &cfg.schedule, &cfg.tol)?.remove(0);
            let v = &report.vertices[idx];
            rows.push(SweepRow {
                k: k.k(),
                vertex: label,
                target,
                predicted: v.predicted,
                measured: v.measured,
                verdict: v.verdict,
                error: v.measured.map(|m| (m - v.predicted).abs()),
            });
        }
    }
    if cfg.format == Format::Csv {
        let opt = |x: Option<f64>| x.map(csv_field).unwrap_or_default();
        let verdict = |v: Verdict| match v {
            Verdict::Exists => "exists",
            Verdict::DoesNotExist => "does-not-exist",
            Verdict::Inconclusive => "inconclusive",
        };
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    csv_field(r.k),
                    r.vertex.to_string(),
                    csv_field(r.target),
                    csv_field(r.predicted),
                    opt(r.measured),
                    verdict(r.verdict).to_string(),
                    opt(r.error),
                ]
            })
            .collect();
        return to_csv(&["k", "vertex", "target", "predicted", "measured", "verdict", "error"], &table);
    }
    to_json(&SweepRecord { command: "sweep", rows })
}

#[derive(Serialize)]
struct SigmaRecord {
    command: &'static str,
    k: f64,
    sigma: String,
    report: SigmaReport,
    derivative_at_zero: DerivativeProbe,
    derivative_at_k: DerivativeProbe,
}

fn sigma_validate_cmd(sigma: &Option<String>, samples: Option<usize>, file: &FileConfig, cfg: &Resolved) -> Result<String, CliError> {
    let k = cfg.modulus()?;
    let spec = SigmaSpec::parse(&required(sigma.clone().or_else(|| file.sigma.clone()), "sigma")?)?;
    let samples = samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        return Err(usage("samples must be at least 2"));
    }
    let s = spec.build(k, cfg.seed)?;
    let report = validate_sigma(&s, k, samples);
    let probe_schedule = Schedule { r0: cfg.schedule.r0.min(k.k() / 2.0), ..cfg.schedule };
    to_json(&SigmaRecord {
        command: "sigma-validate",
        k: k.k(),
        sigma: spec.to_string(),
        report,
        derivative_at_zero: derivative_probe(&s, SigmaEnd::Zero, &probe_schedule, &cfg.tol)?,
        derivative_at_k: derivative_probe(&s, SigmaEnd::K, &probe_schedule, &cfg.tol)?,
    })
}
