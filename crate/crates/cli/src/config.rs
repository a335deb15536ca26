//! Run configuration: a TOML or JSON file whose values are overridden by flags.

use std::path::{Path, PathBuf};

use mageo::chart::GfRecord;
use mageo::family::FamilySpecRecord;
use mageo::grid::AxisSpec;
use mageo::sg::Branch;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Which completion to keep when the null condition has two roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NullRoot {
    Min,
    #[default]
    Max,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub q: Option<[f64; 3]>,
    pub p: Option<[f64; 3]>,
    /// Replace `p[null_free]` by the value that makes the covector null.
    pub null_free: Option<usize>,
    pub null_root: Option<NullRoot>,
    pub step: Option<f64>,
    pub max_steps: Option<usize>,
    pub stop_tol: Option<f64>,
    pub domain: Option<[[f64; 2]; 3]>,
    pub null_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    /// Chart indices sampled on the axes; the third one is solved for.
    pub free: [usize; 2],
    pub axes: [AxisSpec; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    pub seeds: Option<Vec<[f64; 3]>>,
    pub newton_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub convex_tol: Option<f64>,
    pub degenerate_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionConfig {
    pub x: AxisSpec,
    pub z: AxisSpec,
    pub y: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgConfig {
    /// Rossby number as a rational literal.
    pub epsilon: Option<String>,
    pub branch: Option<Branch>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand this file is meant for; checked when present.
    pub command: Option<String>,
    /// Inline generating function. Defaults to the fold example.
    pub gf: Option<GfRecord>,
    /// File holding a generating-function record, relative to the config file.
    pub gf_file: Option<PathBuf>,
    pub point: Option<[f64; 3]>,
    pub grid: Option<[AxisSpec; 3]>,
    pub tol: Option<f64>,
    pub trace: Option<TraceConfig>,
    pub slice: Option<SliceConfig>,
    pub fiber: Option<FiberConfig>,
    pub family: Option<FamilySpecRecord>,
    pub section: Option<SectionConfig>,
    pub sg: Option<SgConfig>,
    pub perturb: Option<bool>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Parses TOML, or JSON when the path ends in `.json`.
pub fn parse_file<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = parse_file(path)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        if let Some(f) = &cfg.gf_file {
            if f.is_relative() {
                cfg.gf_file = Some(dir.join(f));
            }
        }
        Ok(cfg)
    }

    /// Checks the invariants that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.gf.is_some() && self.gf_file.is_some() {
            return Err(CliError::Config("give either `gf` or `gf_file`, not both".into()));
        }
        positive("tol", self.tol)?;
        if let Some(t) = &self.trace {
            positive("trace.step", t.step)?;
            positive("trace.stop_tol", t.stop_tol)?;
            positive("trace.null_tol", t.null_tol)?;
            if t.null_free.is_some_and(|i| i > 2) {
                return Err(CliError::Config("trace.null_free must be 0, 1 or 2".into()));
            }
            if let Some(d) = &t.domain {
                if d.iter().any(|[lo, hi]| lo.is_nan() || hi.is_nan() || lo >= hi) {
                    return Err(CliError::Config("trace.domain bounds must satisfy lo < hi".into()));
                }
            }
        }
        if let Some(f) = &self.fiber {
            positive("fiber.newton_tol", f.newton_tol)?;
            positive("fiber.convex_tol", f.convex_tol)?;
            positive("fiber.degenerate_tol", f.degenerate_tol)?;
        }
        Ok(())
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if x <= 0.0 || !x.is_finite() => Err(CliError::Config(format!("{name} must be a positive number, got {x}"))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("tol = 1e-9\nbogus = 1").unwrap_err();
        assert!(err.message().contains("bogus"));
        assert!(toml::from_str::<RunConfig>("[trace]\nstepp = 1").is_err());
    }

    #[test]
    fn full_file_parses() {
        let cfg: RunConfig = toml::from_str(
            r#"
            command = "wind"
            point = [0.0, 0.0, 1.0]
            tol = 1e-9
            format = "csv"
            [gf]
            chart = "T"
            potential = "y^2/2 - x^2*Z/2 + Z^3/6"
            eps_q = "1"
            [section]
            x = { start = "-3", stop = "3", count = 7 }
            z = { start = "-1", stop = "1", count = 3 }
            y = 0.0
            [sg]
            epsilon = "1/2"
            branch = { index = 1 }
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.sg.unwrap().branch, Some(Branch::Index(1)));
        assert_eq!(cfg.format, Some(Format::Csv));
    }

    #[test]
    fn non_positive_tolerance_is_rejected() {
        let cfg = RunConfig { tol: Some(0.0), ..Default::default() };
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let cfg = RunConfig {
            trace: Some(TraceConfig { domain: Some([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]), ..Default::default() }),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
