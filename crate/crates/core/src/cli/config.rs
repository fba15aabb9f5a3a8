//! Problem configuration files.
//!
//! Two equivalent syntaxes are accepted. A JSON document:
//!
//! ```json
//! {
//!   "source_probs": [0.5, 0.5],
//!   "coding_probs": [0.5, 0.5],
//!   "distortion": [[0, 1], [1, 0]],
//!   "channel": { "transition": [[0.9, 0.1], [0.1, 0.9]], "input_probs": [0.5, 0.5] },
//!   "beta": 1
//! }
//! ```
//!
//! or flat `key = value` lines, where vectors are comma- or
//! space-separated and matrix rows are separated by `;`:
//!
//! ```text
//! # binary symmetric source
//! source_probs = 0.5, 0.5
//! coding_probs = 0.5 0.5
//! distortion = 0 1; 1 0
//! channel.transition = 0.9 0.1; 0.1 0.9
//! channel.input_probs = 0.5 0.5
//! ```
//!
//! A document whose first non-blank character is `{` is read as JSON.

use std::path::Path;

use serde::Deserialize;

use crate::capacity::Channel;
use crate::error::{Error, Result};
use crate::multi::RdProblem2;
use crate::rd::RdProblem;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub transition: Option<Vec<Vec<f64>>>,
    pub input_probs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub source_probs: Option<Vec<f64>>,
    /// Absent means the coding distribution is optimized by Blahut–Arimoto.
    pub coding_probs: Option<Vec<f64>>,
    pub distortion: Option<Vec<Vec<f64>>>,
    pub distortion_2: Option<Vec<Vec<f64>>>,
    pub observable: Option<Vec<Vec<f64>>>,
    pub channel: Option<ChannelConfig>,
    pub beta: Option<f64>,
    pub k: Option<f64>,
    pub temperature: Option<f64>,
}

fn missing(field: &str) -> Error {
    Error::invalid(field, "missing from the configuration")
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))
        } else {
            parse_flat(text)
        }
    }

    pub fn source_probs(&self) -> Result<Vec<f64>> {
        self.source_probs.clone().ok_or_else(|| missing("source_probs"))
    }

    pub fn distortion(&self) -> Result<Vec<Vec<f64>>> {
        self.distortion.clone().ok_or_else(|| missing("distortion"))
    }

    /// The fixed-`Q` problem; requires `coding_probs`.
    pub fn rd_problem(&self) -> Result<RdProblem> {
        let coding = self.coding_probs.clone().ok_or_else(|| missing("coding_probs"))?;
        RdProblem::new(self.source_probs()?, coding, self.distortion()?)
    }

    pub fn rd_problem2(&self) -> Result<RdProblem2> {
        let coding = self.coding_probs.clone().ok_or_else(|| missing("coding_probs"))?;
        let second = self.distortion_2.clone().ok_or_else(|| missing("distortion_2"))?;
        RdProblem2::new(self.source_probs()?, coding, self.distortion()?, second)
    }

    pub fn channel(&self) -> Result<Channel> {
        let ch = self.channel.as_ref().ok_or_else(|| missing("channel"))?;
        let transition = ch.transition.clone().ok_or_else(|| missing("channel.transition"))?;
        let input = ch.input_probs.clone().ok_or_else(|| missing("channel.input_probs"))?;
        Channel::new(transition, input).map_err(|e| e.in_field("channel"))
    }

    /// Boltzmann constant, default 1.
    pub fn boltzmann_k(&self) -> Result<f64> {
        let k = self.k.unwrap_or(1.0);
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid("k", format!("must be positive, got {k}")));
        }
        Ok(k)
    }

    /// `β`, taken from `beta` or else `1/(k·temperature)`; default 1.
    pub fn beta(&self) -> Result<f64> {
        let k = self.boltzmann_k()?;
        if let Some(t) = self.temperature {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid("temperature", format!("must be positive, got {t}")));
            }
        }
        let beta = match (self.beta, self.temperature) {
            (Some(b), Some(t)) => {
                if (b * k * t - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid("temperature", "inconsistent with beta and k (need beta*k*T = 1)"));
                }
                b
            }
            (Some(b), None) => b,
            (None, Some(t)) => 1.0 / (k * t),
            (None, None) => 1.0,
        };
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        Ok(beta)
    }
}

fn parse_vector(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::invalid(key, format!("cannot parse number '{t}'")))
        })
        .collect()
}

fn parse_matrix(key: &str, text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .filter(|row| !row.trim().is_empty())
        .map(|row| parse_vector(key, row))
        .collect()
}

fn parse_scalar(key: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| Error::invalid(key, format!("cannot parse number '{}'", text.trim())))
}

fn parse_flat(text: &str) -> Result<ProblemConfig> {
    let mut cfg = ProblemConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::invalid("config", format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        match key {
            "source_probs" => cfg.source_probs = Some(parse_vector(key, value)?),
            "coding_probs" => cfg.coding_probs = Some(parse_vector(key, value)?),
            "distortion" => cfg.distortion = Some(parse_matrix(key, value)?),
            "distortion_2" => cfg.distortion_2 = Some(parse_matrix(key, value)?),
            "observable" => cfg.observable = Some(parse_matrix(key, value)?),
            "channel.transition" => {
                cfg.channel.get_or_insert_with(Default::default).transition = Some(parse_matrix(key, value)?)
            }
            "channel.input_probs" => {
                cfg.channel.get_or_insert_with(Default::default).input_probs = Some(parse_vector(key, value)?)
            }
            "beta" => cfg.beta = Some(parse_scalar(key, value)?),
            "k" => cfg.k = Some(parse_scalar(key, value)?),
            "temperature" => cfg.temperature = Some(parse_scalar(key, value)?),
            other => return Err(Error::invalid(other, "unknown configuration key")),
        }
    }
    Ok(cfg)
}
