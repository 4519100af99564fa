//! Experiment configuration: TOML file, per-experiment defaults, CLI overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{ExperimentError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PhasePortrait,
    Fidelity,
    QfiMap,
    JzSeries,
    Sweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PhasePortrait => "phase-portrait",
            ExperimentKind::Fidelity => "fidelity",
            ExperimentKind::QfiMap => "qfi-map",
            ExperimentKind::JzSeries => "jz-series",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scalar output evaluated by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FBarMax,
    Fidelity,
    Jz,
    LambdaC,
}

impl Metric {
    pub fn column(self) -> &'static str {
        match self {
            Metric::FBarMax => "f_bar_max",
            Metric::Fidelity => "fidelity",
            Metric::Jz => "jz_expectation",
            Metric::LambdaC => "lambda_c",
        }
    }
}

/// A single value, an explicit list, or an inclusive evenly spaced range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Scalar(f64),
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Scalar(v) => vec![*v],
            GridSpec::List(v) => v.clone(),
            GridSpec::Range(r) => linspace(r.min, r.max, r.count),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if let GridSpec::Range(r) = self {
            if r.count == 0 {
                return Err(config_error(format!(
                    "{name}: grid count must be at least 1"
                )));
            }
            if !(r.min <= r.max) {
                return Err(config_error(format!(
                    "{name}: range min {} exceeds max {}",
                    r.min, r.max
                )));
            }
        }
        let values = self.values();
        if values.is_empty() {
            return Err(config_error(format!("{name}: grid is empty")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(config_error(format!("{name}: non-finite value {v}")));
        }
        Ok(())
    }
}

/// Parses `2`, `1,4` or `0.2:4:60` (min:max:count).
impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {t:?}"))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("expected min:max:count, got {s:?}"));
            }
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("bad count: {:?}", parts[2]))?;
            Ok(GridSpec::Range(RangeSpec {
                min: number(parts[0])?,
                max: number(parts[1])?,
                count,
            }))
        } else if s.contains(',') {
            Ok(GridSpec::List(
                s.split(',').map(number).collect::<Result<_, _>>()?,
            ))
        } else {
            Ok(GridSpec::Scalar(number(s)?))
        }
    }
}

/// `count` evenly spaced points on `[min, max]`, endpoints exact.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        max
                    } else {
                        min + (max - min) * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    /// Largest `κt` (classical time `τ` for the phase portrait).
    pub max: f64,
    pub samples: usize,
}

impl TimeSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(0.0, self.max, self.samples)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub theta: f64,
    pub phi: f64,
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n_particles: u32,
    pub lambda: GridSpec,
    pub time: TimeSpec,
    pub initial_state: InitialState,
    pub output: PathBuf,
    pub seed: u64,
    pub workers: usize,
    /// `κt` values written as separate slice files (qfi-map).
    pub slices: Vec<f64>,
    /// Also write the qfi-map as a Λ × κt matrix (qfi-map).
    pub matrix: bool,
    /// Initial conditions per axis of the phase-portrait lattice.
    pub lattice: usize,
    pub metric: Metric,
    /// Sweep axes for `metric = "lambda_c"`.
    pub theta0: GridSpec,
    pub phi0: GridSpec,
}

/// On-disk form: every field optional, unknown keys rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: Option<ExperimentKind>,
    n_particles: Option<u32>,
    lambda: Option<GridSpec>,
    time: Option<TimeSpec>,
    initial_state: Option<InitialState>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
    slices: Option<Vec<f64>>,
    matrix: Option<bool>,
    lattice: Option<usize>,
    metric: Option<Metric>,
    theta0: Option<GridSpec>,
    phi0: Option<GridSpec>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub lambda: Option<GridSpec>,
    pub n_particles: Option<u32>,
    pub time_max: Option<f64>,
    pub samples: Option<usize>,
}

fn config_error(msg: String) -> ExperimentError {
    ExperimentError::Config(msg)
}

impl ExperimentConfig {
    /// Defaults mirror the figure set: N = 100 for fidelity and ⟨J_z⟩,
    /// N = 500 for QFI maps.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            n_particles: 100,
            lambda: GridSpec::List(vec![1.0, 4.0]),
            time: TimeSpec {
                max: 30.0,
                samples: 600,
            },
            initial_state: InitialState {
                theta: PI / 2.0,
                phi: 0.0,
            },
            output: PathBuf::from("doublewell-out").join(kind.name()),
            seed: 0,
            workers: 1,
            slices: Vec::new(),
            matrix: false,
            lattice: 12,
            metric: Metric::FBarMax,
            theta0: GridSpec::List(vec![0.0, PI / 6.0]),
            phi0: GridSpec::List(vec![0.0, PI]),
        };
        match kind {
            ExperimentKind::PhasePortrait => Self {
                lambda: GridSpec::List(vec![4.0, 1.0]),
                time: TimeSpec {
                    max: 20.0,
                    samples: 401,
                },
                ..base
            },
            ExperimentKind::Fidelity => base,
            ExperimentKind::QfiMap => Self {
                n_particles: 500,
                lambda: GridSpec::Range(RangeSpec {
                    min: 0.2,
                    max: 4.0,
                    count: 60,
                }),
                time: TimeSpec {
                    max: 30.0,
                    samples: 240,
                },
                ..base
            },
            ExperimentKind::JzSeries => Self {
                lambda: GridSpec::List(vec![3.0, 2.0 / 3.0]),
                time: TimeSpec {
                    max: 2.0,
                    samples: 400,
                },
                initial_state: InitialState {
                    theta: 0.0,
                    phi: 0.0,
                },
                ..base
            },
            ExperimentKind::Sweep => Self {
                lambda: GridSpec::Range(RangeSpec {
                    min: 0.2,
                    max: 4.0,
                    count: 20,
                }),
                time: TimeSpec {
                    max: 30.0,
                    samples: 240,
                },
                ..base
            },
        }
    }

    /// Resolves a configuration from optional TOML text and overrides.
    ///
    /// `kind` comes from the command line; a file naming a different
    /// experiment is rejected.
    pub fn resolve(
        kind: Option<ExperimentKind>,
        toml_text: Option<&str>,
        overrides: &Overrides,
    ) -> Result<Self> {
        let file: ConfigFile = match toml_text {
            Some(text) => toml::from_str(text)?,
            None => ConfigFile::default(),
        };
        let kind = match (kind, file.experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(config_error(format!(
                    "experiment mismatch: command line says {a}, config says {b}"
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(config_error("no experiment given".into())),
        };
        let mut cfg = Self::defaults(kind);
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = file.$field { cfg.$field = v; }
            )*};
        }
        take!(
            n_particles,
            lambda,
            time,
            initial_state,
            output,
            seed,
            workers,
            matrix,
            lattice,
            metric,
            theta0,
            phi0
        );
        match file.slices {
            Some(s) => cfg.slices = s,
            None if kind == ExperimentKind::QfiMap => {
                cfg.slices = if cfg.initial_state.theta == 0.0 {
                    vec![6.0, 25.0]
                } else {
                    vec![6.0, 24.0]
                };
            }
            None => {}
        }
        if let Some(v) = &overrides.output {
            cfg.output = v.clone();
        }
        if let Some(v) = overrides.workers {
            cfg.workers = v;
        }
        if let Some(v) = &overrides.lambda {
            cfg.lambda = v.clone();
        }
        if let Some(v) = overrides.n_particles {
            cfg.n_particles = v;
        }
        if let Some(v) = overrides.time_max {
            cfg.time.max = v;
        }
        if let Some(v) = overrides.samples {
            cfg.time.samples = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(
        kind: Option<ExperimentKind>,
        path: &Path,
        overrides: &Overrides,
    ) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::resolve(kind, Some(&text), overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(config_error(format!(
                "n_particles must be at least 2, got {}",
                self.n_particles
            )));
        }
        if !(self.time.max > 0.0 && self.time.max.is_finite()) {
            return Err(config_error(format!(
                "time.max must be positive and finite, got {}",
                self.time.max
            )));
        }
        if self.time.samples == 0 {
            return Err(config_error("time.samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(config_error("workers must be at least 1".into()));
        }
        if self.lattice == 0 {
            return Err(config_error("lattice must be at least 1".into()));
        }
        self.lambda.validate("lambda")?;
        if let Some(v) = self.lambda.values().iter().find(|v| **v < 0.0) {
            return Err(config_error(format!(
                "lambda must be non-negative, got {v}"
            )));
        }
        self.theta0.validate("theta0")?;
        self.phi0.validate("phi0")?;
        let InitialState { theta, phi } = self.initial_state;
        if !((0.0..=PI).contains(&theta) && (0.0..2.0 * PI).contains(&phi)) {
            return Err(config_error(format!(
                "initial_state needs theta in [0, pi] and phi in [0, 2pi), got ({theta}, {phi})"
            )));
        }
        if let Some(v) = self.slices.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(config_error(format!(
                "slice kappa_t must be finite and >= 0, got {v}"
            )));
        }
        let sweep_metric_ok = match self.experiment {
            ExperimentKind::Sweep => true,
            _ => self.metric == Metric::FBarMax,
        };
        if !sweep_metric_ok {
            return Err(config_error(format!(
                "metric is only meaningful for sweep runs, not {}",
                self.experiment
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, excluding `output` and `workers`
    /// (neither affects the data).
    pub fn content_hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output");
            map.remove("workers");
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}
