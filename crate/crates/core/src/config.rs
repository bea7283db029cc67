//! TOML configuration and scenario files.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::control::ControlConfig;
use crate::dynamics::ModelParams;
use crate::engine::{EngineConfig, GaitParams};
use crate::error::{Error, Result};
use crate::optimizer::GAConfig;
use crate::sim::{Scenario, SimConfig};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub model: ModelParams,
    pub engine: EngineConfig,
    pub control: ControlConfig,
    pub ga: GAConfig,
    /// Scenario file, relative to the config file.
    pub scenario: Option<PathBuf>,
    /// Output directory, relative to the working directory.
    pub output_dir: Option<PathBuf>,
}

impl AppConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let cfg: Self = parse_toml(text, origin)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate a config file. A relative scenario path is resolved
    /// against the file's directory and must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let mut cfg = Self::from_toml(&text, &path.display().to_string())?;
        if let Some(s) = &cfg.scenario {
            let resolved = if s.is_relative() { path.parent().unwrap_or(Path::new(".")).join(s) } else { s.clone() };
            if !resolved.is_file() {
                return Err(Error::Config(format!("scenario file {} does not exist", resolved.display())));
            }
            cfg.scenario = Some(resolved);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim().validate()?;
        self.ga.validate()
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig { model: self.model, engine: self.engine.clone(), control: self.control }
    }
}

pub fn scenario_from_toml(text: &str, origin: &str) -> Result<Scenario> {
    let s: Scenario = parse_toml(text, origin)?;
    s.validate()?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    scenario_from_toml(&read(path)?, &path.display().to_string())
}

#[derive(Serialize)]
struct GaitFile<'a> {
    engine: GaitSection<'a>,
}

#[derive(Serialize)]
struct GaitSection<'a> {
    gait: &'a GaitParams,
}

/// A config fragment holding only `[engine.gait]`, loadable as an `AppConfig`.
pub fn gait_to_toml(gait: &GaitParams, comment: &str) -> String {
    let body = toml::to_string(&GaitFile { engine: GaitSection { gait } }).expect("gait serializes");
    let mut out = String::new();
    for line in comment.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&body);
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_toml<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let place = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("{origin}:{line}:{col}")
            }
            None => origin.to_string(),
        };
        Error::Parse(format!("{place}: {}", e.message().trim()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(AppConfig::from_toml("", "x").unwrap(), AppConfig::default());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[model]\nm_c = 3.0\nl = \"long\"\n";
        match AppConfig::from_toml(text, "desk.toml") {
            Err(Error::Parse(m)) => assert!(m.starts_with("desk.toml:3:"), "{m}"),
            other => panic!("{other:?}"),
        }
        match AppConfig::from_toml("[engine]\nbogus = 1\n", "a.toml") {
            Err(Error::Parse(m)) => assert!(m.starts_with("a.toml:2:"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_config_errors() {
        assert!(matches!(AppConfig::from_toml("[model]\nz_c = -1.0\n", "x"), Err(Error::Config(_))));
        assert!(matches!(AppConfig::from_toml("[ga]\npopulation = 1\n", "x"), Err(Error::Config(_))));
    }

    #[test]
    fn gait_fragment_round_trips() {
        let g = GaitParams { step_x: 0.07, ti_to: -0.01, ..Default::default() };
        let text = gait_to_toml(&g, "best gait\nfitness = -1");
        assert!(text.starts_with("# best gait\n# fitness = -1\n"));
        assert_eq!(AppConfig::from_toml(&text, "g").unwrap().engine.gait, g);
    }

    #[test]
    fn scenario_parses() {
        let text = "duration = 4.0\nseed = 3\n[noise]\ncom = 0.01\n[[commands]]\ntime = 0.0\ngait = true\n[[commands]]\ntime = 3.0\nstop = true\n[[disturbances]]\ntime = 2.0\ndx = 0.1\n";
        let s = scenario_from_toml(text, "s").unwrap();
        assert_eq!(s.commands.len(), 2);
        assert_eq!(s.disturbances[0].dx, 0.1);
        assert_eq!(s.noise.com, 0.01);
        assert!(matches!(scenario_from_toml("duration = 0.0\n", "s"), Err(Error::Config(_))));
    }
}
