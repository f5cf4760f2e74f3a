//! Run configuration: command-line flags layered over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use teichlab_core::{Modulus, Schedule, Tolerances};

use crate::error::{usage, CliError};
use crate::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "teichlab", version, about = "Geodesics, angles and triangles in the two-block Teichmüller model")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// JSON file with any of the options below; flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Base modulus k in (0, 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Side length l = artanh k (alternative to --k)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l: Option<f64>,
    /// Seed for interior blend control points
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Chord-ratio radii: r0,ratio,steps
    #[arg(long, global = true, value_name = "R0,RATIO,STEPS")]
    pub schedule: Option<String>,
    /// Convergence and oscillation tolerances: conv,osc[,window]
    #[arg(long, global = true, value_name = "CONV,OSC")]
    pub tol: Option<String>,
    /// Read angle inputs in degrees
    #[arg(long, global = true)]
    pub degrees: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Teichmüller distance between two points
    Distance {
        #[arg(long, value_name = "C1,C2", allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, value_name = "C1,C2", allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// Chord-ratio angle between two segments at a shared endpoint
    Angle {
        #[arg(long, value_name = "SEGMENT", allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, value_name = "SEGMENT", allow_hyphen_values = true)]
        b: Option<String>,
        /// base, mu, mu1 or c1,c2
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
    },
    /// Synthesize a triangle on [0], [μ], [μ1] with prescribed angles
    Triangle {
        /// Angles at [0], [μ], [μ1]
        #[arg(long, value_name = "T0,TMU,TMU1", allow_hyphen_values = true)]
        theta: Option<String>,
        /// Number of triangles in the family
        #[arg(long)]
        family: Option<usize>,
    },
    /// Midpoint curvature probe
    Probe,
    /// Measured vs predicted angles over a grid of targets and moduli
    Sweep {
        /// Vertex whose angle is swept: base, mu or mu1
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        thetas: Option<String>,
        /// Moduli to sweep; defaults to the single --k / --l
        #[arg(long, value_name = "LIST")]
        ks: Option<String>,
    },
    /// Check a σ function against the admissibility conditions
    SigmaValidate {
        #[arg(long, value_name = "SIGMA", allow_hyphen_values = true)]
        sigma: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Distance { .. } => "distance",
            Command::Angle { .. } => "angle",
            Command::Triangle { .. } => "triangle",
            Command::Probe => "probe",
            Command::Sweep { .. } => "sweep",
            Command::SigmaValidate { .. } => "sigma-validate",
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub seed: Option<u64>,
    pub schedule: Option<Schedule>,
    pub tol: Option<Tolerances>,
    pub degrees: Option<bool>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub p: Option<[f64; 2]>,
    pub q: Option<[f64; 2]>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub vertex: Option<String>,
    pub theta: Option<Vec<f64>>,
    pub family: Option<usize>,
    pub thetas: Option<Vec<f64>>,
    pub ks: Option<Vec<f64>>,
    pub sigma: Option<String>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Options shared by every command after merging flags and file.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub k: Option<Modulus>,
    pub seed: u64,
    pub schedule: Schedule,
    pub tol: Tolerances,
    pub degrees: bool,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Resolved {
    pub fn new(common: &Common, file: &FileConfig) -> Result<Self, CliError> {
        let k = match (common.k.or(file.k), common.l.or(file.l)) {
            (Some(_), Some(_)) => return Err(usage("give exactly one of k and l")),
            (Some(k), None) => Some(Modulus::new(k)?),
            (None, Some(l)) => Some(Modulus::from_length(l)?),
            (None, None) => None,
        };
        let schedule = match &common.schedule {
            Some(s) => parse::schedule(s)?,
            None => file.schedule.unwrap_or_default(),
        };
        let tol = match &common.tol {
            Some(s) => parse::tolerances(s)?,
            None => file.tol.unwrap_or_default(),
        };
        Ok(Resolved {
            k,
            seed: common.seed.or(file.seed).unwrap_or(0),
            schedule,
            tol,
            degrees: common.degrees || file.degrees.unwrap_or(false),
            format: common.format.or(file.format).unwrap_or(Format::Json),
            output: common.output.clone().or_else(|| file.output.clone()),
        })
    }

    pub fn modulus(&self) -> Result<Modulus, CliError> {
        self.k.ok_or_else(|| usage("give exactly one of k and l"))
    }

    /// Converts an input angle to radians.
    pub fn angle_in(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_radians()
        } else {
            x
        }
    }
}

/// Builds the subcommand from a file's `command` field when none was given.
pub fn command_from_file(file: &FileConfig) -> Result<Command, CliError> {
    let name = file.command.as_deref().ok_or_else(|| usage("no subcommand given and the config has no 'command'"))?;
    Ok(match name {
        "distance" => Command::Distance { p: None, q: None },
        "angle" => Command::Angle { a: None, b: None, vertex: None },
        "triangle" => Command::Triangle { theta: None, family: None },
        "probe" => Command::Probe,
        "sweep" => Command::Sweep { vertex: None, thetas: None, ks: None },
        "sigma-validate" => Command::SigmaValidate { sigma: None, samples: None },
        other => return Err(CliError::Config(format!("unknown command '{other}'"))),
    })
}
