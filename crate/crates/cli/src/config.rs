//! Run settings merged from an optional TOML file and command-line flags.

use std::path::{Path, PathBuf};

use radhydro_core::{Error, Result, ScenarioId};
use serde::Deserialize;

/// Keys accepted in a config file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub points: Option<Vec<usize>>,
    pub cfl: Option<f64>,
    pub tfinal: Option<f64>,
    pub eps: Option<f64>,
    pub reference: Option<PathBuf>,
    pub self_reference: Option<bool>,
    pub out: Option<PathBuf>,
    pub dump_every: Option<usize>,
    pub check_idp: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Values of `flags` take precedence over the file.
    pub fn merge(self, flags: FileConfig) -> FileConfig {
        FileConfig {
            scenario: flags.scenario.or(self.scenario),
            points: flags.points.or(self.points),
            cfl: flags.cfl.or(self.cfl),
            tfinal: flags.tfinal.or(self.tfinal),
            eps: flags.eps.or(self.eps),
            reference: flags.reference.or(self.reference),
            self_reference: flags.self_reference.or(self.self_reference),
            out: flags.out.or(self.out),
            dump_every: flags.dump_every.or(self.dump_every),
            check_idp: flags.check_idp.or(self.check_idp),
        }
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub scenario: ScenarioId,
    pub points: Vec<usize>,
    pub cfl: Option<f64>,
    pub tfinal: Option<f64>,
    pub eps: Option<f64>,
    pub reference: Option<PathBuf>,
    pub self_reference: bool,
    pub out: PathBuf,
    pub dump_every: Option<usize>,
    pub check_idp: bool,
}

impl TryFrom<FileConfig> for Settings {
    type Error = Error;

    fn try_from(c: FileConfig) -> Result<Self> {
        let scenario = c
            .scenario
            .ok_or_else(|| Error::Config("no scenario given (use --scenario or the config file)".into()))?
            .parse()?;
        let points = c.points.ok_or_else(|| Error::Config("no mesh size given (use --points)".into()))?;
        if points.iter().any(|&n| n < 3) {
            return Err(Error::Config("every mesh needs at least 3 points".into()));
        }
        if c.dump_every == Some(0) {
            return Err(Error::Config("dump cadence must be positive".into()));
        }
        Ok(Settings {
            scenario,
            points,
            cfl: c.cfl,
            tfinal: c.tfinal,
            eps: c.eps,
            reference: c.reference,
            self_reference: c.self_reference.unwrap_or(false),
            out: c.out.unwrap_or_else(|| PathBuf::from("out")),
            dump_every: c.dump_every,
            check_idp: c.check_idp.unwrap_or(false),
        })
    }
}
