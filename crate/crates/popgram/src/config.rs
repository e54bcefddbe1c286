//! Run configuration: defaults, a flat `key=value` config file, and the
//! echo of every effective setting into output headers.

use std::path::Path;

use crate::corpus::IngestConfig;
use crate::emit::{OutputFormat, Record};
use crate::engine::EngineOptions;
use crate::error::{Error, Result};
use crate::families::Schedule;
use crate::similarity::{self, render_score, Score};

/// Parse a coverage requirement: the named presets or an explicit fraction.
pub fn parse_tau(text: &str) -> Result<Score> {
    let tau = match text {
        "all" => similarity::one(),
        "most" => similarity::score(3, 4),
        other => similarity::parse_score(other)?,
    };
    if tau <= similarity::zero() || tau > similarity::one() {
        return Err(Error::Config(format!(
            "tau must be in (0, 1], got {}",
            render_score(&tau)
        )));
    }
    Ok(tau)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub window: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub schedule: Schedule,
    pub tau: Score,
    pub format: OutputFormat,
    pub lowercase: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window: 2,
            ngram_min: 2,
            ngram_max: 5,
            schedule: Schedule::standard(),
            tau: similarity::one(),
            format: OutputFormat::Tsv,
            lowercase: true,
        }
    }
}

impl RunConfig {
    /// Read a flat `key=value` document; `#` lines and blanks are skipped.
    pub fn load_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut config = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {}: expected key=value", no + 1))
            })?;
            config.apply(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "window" => {
                self.window = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad window {value:?}")))?
            }
            "ngram_min" => {
                self.ngram_min = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad ngram_min {value:?}")))?
            }
            "ngram_max" => {
                self.ngram_max = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad ngram_max {value:?}")))?
            }
            "schedule" => self.schedule = Schedule::parse(value)?,
            "tau" => self.tau = parse_tau(value)?,
            "format" => self.format = OutputFormat::parse(value)?,
            "lowercase" => {
                self.lowercase = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(Error::Config(format!("bad lowercase {value:?}"))),
                }
            }
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.ingest_config().validate()?;
        self.engine_options().validate()
    }

    pub fn ingest_config(&self) -> IngestConfig {
        IngestConfig {
            lowercase: self.lowercase,
            ngram_min: self.ngram_min,
            ngram_max: self.ngram_max,
        }
    }

    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            window: self.window,
            schedule: self.schedule.clone(),
            tau: self.tau,
        }
    }

    /// Write every field into an output header record.
    pub fn echo_into(&self, record: &mut Record) {
        record.set("window", self.window as u64);
        record.set("ngram_min", self.ngram_min as u64);
        record.set("ngram_max", self.ngram_max as u64);
        record.set("schedule", self.schedule.render());
        record.set("tau", render_score(&self.tau));
        record.set("format", self.format.render());
        record.set("lowercase", self.lowercase);
    }
}
