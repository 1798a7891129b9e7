//! Run configuration: a JSON file, then command-line overrides, then
//! range checks.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use phase_metrology::estimators::{Domain, Prior};
use phase_metrology::probes::ProbeSpec;
use phase_metrology::spinspace::SpinAxis;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: &str = "phasemetro/1";

const MAX_PARTICLES: u32 = 400;
const MAX_M: u64 = 10_000_000;
const MAX_TRIALS: usize = 1_000_000;
const MAX_GRID: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PovmKind {
    /// Projectors on the Dicke states.
    Counting,
    /// Projection on the probe and its complement.
    Projection,
}

/// Probe families selectable from the command line with default parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    /// `|j, +j⟩`, all particles in mode a.
    Fock,
    /// Coherent spin state on the equator, along x.
    Css,
    Noon,
    TwinFock,
    /// GHZ state along the configured axis.
    Ghz,
    /// The mixture given in the config file.
    MixSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ThetaGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for ThetaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected START:STOP:POINTS, got {s:?}"));
        };
        Ok(Self {
            start: a.trim().parse().map_err(|_| format!("bad START in {s:?}"))?,
            stop: b.trim().parse().map_err(|_| format!("bad STOP in {s:?}"))?,
            points: c.trim().parse().map_err(|_| format!("bad POINTS in {s:?}"))?,
        })
    }
}

pub fn parse_domain(s: &str) -> Result<Domain, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad LO in {s:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad HI in {s:?}"))?;
    Domain::new(lo, hi).map_err(|e| e.to_string())
}

/// Everything a run needs. Angles are radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub command: Option<String>,
    pub n_particles: u32,
    pub probe: ProbeSpec,
    pub axis: SpinAxis,
    pub povm: PovmKind,
    pub theta: f64,
    pub theta_grid: Option<ThetaGrid>,
    pub m: u64,
    pub trials: usize,
    pub seed: u64,
    pub domain: Option<Domain>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Spread `h_max − h_min` of the single-particle generator.
    pub h_range: f64,
    pub prior: Prior,
    pub posterior_points: usize,
    pub credible_mass: f64,
    /// Observable for the method of moments.
    pub observable: SpinAxis,
    /// Fisher value fed to the depth witness; computed from the probe when absent.
    pub fisher_value: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command: None,
            n_particles: 10,
            probe: ProbeSpec::Css {
                polar: FRAC_PI_2,
                azimuth: 0.0,
            },
            axis: SpinAxis::Y,
            povm: PovmKind::Counting,
            theta: 0.5,
            theta_grid: None,
            m: 100,
            trials: 1000,
            seed: 0,
            domain: None,
            out: None,
            format: Format::Json,
            h_range: 1.0,
            prior: Prior::Flat,
            posterior_points: 2048,
            credible_mass: 0.6827,
            observable: SpinAxis::Z,
            fisher_value: None,
        }
    }
}

/// Command-line values that replace config-file entries when given.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub n: Option<u32>,
    pub m: Option<u64>,
    pub trials: Option<usize>,
    pub theta: Option<f64>,
    pub theta_grid: Option<ThetaGrid>,
    pub domain: Option<Domain>,
    pub probe: Option<ProbeKind>,
    pub axis: Option<SpinAxis>,
    pub povm: Option<PovmKind>,
    pub fisher_value: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), CliError> {
        macro_rules! set {
            ($($field:ident <- $src:ident),*) => {$(if let Some(v) = o.$src { self.$field = v; })*};
        }
        set!(seed <- seed, format <- format, n_particles <- n, m <- m, trials <- trials,
             theta <- theta, axis <- axis, povm <- povm);
        if o.out.is_some() {
            self.out = o.out;
        }
        if o.theta_grid.is_some() {
            self.theta_grid = o.theta_grid;
        }
        if o.domain.is_some() {
            self.domain = o.domain;
        }
        if o.fisher_value.is_some() {
            self.fisher_value = o.fisher_value;
        }
        if let Some(kind) = o.probe {
            self.probe = match kind {
                ProbeKind::Fock => ProbeSpec::Fock {
                    mu: self.n_particles as f64 / 2.0,
                },
                ProbeKind::Css => ProbeSpec::Css {
                    polar: FRAC_PI_2,
                    azimuth: 0.0,
                },
                ProbeKind::Noon => ProbeSpec::Noon,
                ProbeKind::TwinFock => ProbeSpec::TwinFock,
                ProbeKind::Ghz => ProbeSpec::Ghz { axis: self.axis },
                ProbeKind::MixSpec => {
                    if !matches!(self.probe, ProbeSpec::Mix { .. }) {
                        return Err(CliError::Config(
                            "--probe mix-spec needs a mixture under \"probe\" in the config file".into(),
                        ));
                    }
                    self.probe.clone()
                }
            };
        }
        Ok(())
    }

    pub fn validate(&self, allow_zero_m: bool) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n_particles == 0 || self.n_particles > MAX_PARTICLES {
            return bad(format!("n must be in 1..={MAX_PARTICLES}, got {}", self.n_particles));
        }
        if (!allow_zero_m && self.m == 0) || self.m > MAX_M {
            return bad(format!(
                "m must be in {}..={MAX_M}, got {}",
                u64::from(!allow_zero_m),
                self.m
            ));
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return bad(format!("trials must be in 1..={MAX_TRIALS}, got {}", self.trials));
        }
        if !self.theta.is_finite() {
            return bad("theta must be finite".into());
        }
        if let Some(g) = self.theta_grid {
            if g.points == 0 || g.points > MAX_GRID || !g.start.is_finite() || !g.stop.is_finite() {
                return bad(format!("invalid theta grid {}:{}:{}", g.start, g.stop, g.points));
            }
        }
        if let Some(d) = self.domain {
            Domain::new(d.lo, d.hi).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if !(self.h_range > 0.0 && self.h_range.is_finite()) {
            return bad(format!("h_range must be positive, got {}", self.h_range));
        }
        if self.posterior_points < 3 || self.posterior_points > MAX_GRID {
            return bad(format!("posterior_points must be in 3..={MAX_GRID}"));
        }
        if !(self.credible_mass > 0.0 && self.credible_mass < 1.0) {
            return bad(format!("credible_mass must be in (0, 1), got {}", self.credible_mass));
        }
        if let Some(f) = self.fisher_value {
            if !(f >= 0.0 && f.is_finite()) {
                return bad(format!("fisher_value must be non-negative, got {f}"));
            }
        }
        Ok(())
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.theta_grid.map_or_else(|| vec![self.theta], |g| g.values())
    }
}
