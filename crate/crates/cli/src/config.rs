//! Experiment configuration: a TOML file plus `key=value` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use ringcap::{FanoutPmf, FanoutPreset, StopRule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// A single value or a list to sweep over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// A named preset or explicit probabilities for fanouts `1..=N-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanoutSpec {
    Preset(String),
    Explicit(Vec<f64>),
}

impl FanoutSpec {
    pub fn label(&self) -> String {
        match self {
            FanoutSpec::Preset(name) => FanoutPreset::parse(name)
                .map(FanoutPreset::label)
                .unwrap_or_else(|| name.clone()),
            FanoutSpec::Explicit(_) => "custom".into(),
        }
    }

    pub fn build(&self, field: &str, n_nodes: usize) -> Result<FanoutPmf<f64>, ConfigError> {
        match self {
            FanoutSpec::Preset(name) => {
                let preset = FanoutPreset::parse(name).ok_or_else(|| {
                    field_err(
                        field,
                        format!("unknown preset {name:?} (UC, MI, MC, BC, fig2, d<k>, u<k>)"),
                    )
                })?;
                preset
                    .build(n_nodes)
                    .map_err(|e| field_err(field, format!("N = {n_nodes}: {e}")))
            }
            FanoutSpec::Explicit(probs) => FanoutPmf::new(n_nodes, probs.clone())
                .map_err(|e| field_err(field, format!("N = {n_nodes}: {e}"))),
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if let FanoutSpec::Preset(name) = self {
            if FanoutPreset::parse(name).is_none() {
                return Err(field_err(field, format!("unknown preset {name:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChoice {
    Sp,
    Oc,
    /// Pick per point from the γ thresholds.
    Auto,
    /// Emit rows for both strategies.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Simulate,
    Oracle,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Analytic => "analytic",
            Engine::Simulate => "simulate",
            Engine::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub nodes: OneOrMany<usize>,
    pub wavelengths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficConfig {
    /// Defaults to `1 - beta - gamma` at each sweep point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "zero")]
    pub beta: OneOrMany<f64>,
    #[serde(default = "zero")]
    pub gamma: OneOrMany<f64>,
}

fn zero() -> OneOrMany<f64> {
    OneOrMany::One(0.0)
}

/// Fanout distributions. `preset` applies to every class that has no entry
/// of its own; lists in any field are swept as a cartesian product.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanoutConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<OneOrMany<FanoutSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<OneOrMany<FanoutSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hotspot_dest: Option<OneOrMany<FanoutSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hotspot_src: Option<OneOrMany<FanoutSpec>>,
}

/// The fanout specs of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoutChoice {
    pub uniform: FanoutSpec,
    pub hotspot_dest: FanoutSpec,
    pub hotspot_src: FanoutSpec,
}

impl FanoutChoice {
    /// `UC`-style label when all classes agree, else `uniform/dest/src`.
    pub fn label(&self) -> String {
        let labels = [
            self.uniform.label(),
            self.hotspot_dest.label(),
            self.hotspot_src.label(),
        ];
        if labels[0] == labels[1] && labels[1] == labels[2] {
            labels[0].clone()
        } else {
            labels.join("/")
        }
    }

    /// Base pmfs `(μ, ν, κ)` for an `n_nodes` ring.
    pub fn build(
        &self,
        n_nodes: usize,
    ) -> Result<(FanoutPmf<f64>, FanoutPmf<f64>, FanoutPmf<f64>), ConfigError> {
        Ok((
            self.uniform.build("fanout.uniform", n_nodes)?,
            self.hotspot_dest.build("fanout.hotspot_dest", n_nodes)?,
            self.hotspot_src.build("fanout.hotspot_src", n_nodes)?,
        ))
    }
}

impl FanoutConfig {
    /// Every combination in sweep order: preset, then uniform, hotspot
    /// destination and hotspot source.
    pub fn choices(&self) -> Result<Vec<FanoutChoice>, ConfigError> {
        let presets: Vec<Option<FanoutSpec>> = match &self.preset {
            Some(p) => p.values().into_iter().map(Some).collect(),
            None => vec![None],
        };
        let class = |field: &Option<OneOrMany<FanoutSpec>>,
                     name: &str,
                     preset: &Option<FanoutSpec>|
         -> Result<Vec<FanoutSpec>, ConfigError> {
            match (field, preset) {
                (Some(v), _) => Ok(v.values()),
                (None, Some(p)) => Ok(vec![p.clone()]),
                (None, None) => Err(field_err(name, "missing (or set fanout.preset)")),
            }
        };
        let mut out = Vec::new();
        for preset in &presets {
            let us = class(&self.uniform, "fanout.uniform", preset)?;
            let ds = class(&self.hotspot_dest, "fanout.hotspot_dest", preset)?;
            let ss = class(&self.hotspot_src, "fanout.hotspot_src", preset)?;
            for u in &us {
                for d in &ds {
                    for s in &ss {
                        out.push(FanoutChoice {
                            uniform: u.clone(),
                            hotspot_dest: d.clone(),
                            hotspot_src: s.clone(),
                        });
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(field_err("fanout", "empty list"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_strategy")]
    pub strategy: StrategyChoice,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; also the number of random streams.
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub segments: SegmentSelection,
}

/// Segments reported per point and strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentSelection {
    /// The three critical segments plus the measured maximum, if elsewhere.
    #[default]
    Critical,
    /// One row at the segment of largest utilization.
    Max,
    /// Every segment in both directions.
    All,
}

fn default_strategy() -> StrategyChoice {
    StrategyChoice::Sp
}
fn default_engine() -> Engine {
    Engine::Analytic
}
fn default_seed() -> u64 {
    1
}
fn default_threads() -> usize {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: default_strategy(),
            engine: default_engine(),
            seed: default_seed(),
            threads: default_threads(),
            segments: SegmentSelection::Critical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopConfig {
    #[serde(default = "default_rel")]
    pub relative_halfwidth: f64,
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default = "default_min")]
    pub min_samples: u64,
    #[serde(default = "default_max")]
    pub max_samples: u64,
    #[serde(default = "default_batch")]
    pub batch_size: u64,
}

fn default_rel() -> f64 {
    0.01
}
fn default_floor() -> f64 {
    0.01
}
fn default_min() -> u64 {
    10_000
}
fn default_max() -> u64 {
    10_000_000
}
fn default_batch() -> u64 {
    100_000
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            relative_halfwidth: default_rel(),
            floor: default_floor(),
            min_samples: default_min(),
            max_samples: default_max(),
            batch_size: default_batch(),
        }
    }
}

impl StopConfig {
    pub fn rule(&self, workers: usize) -> StopRule {
        StopRule {
            relative_halfwidth: self.relative_halfwidth,
            floor: self.floor,
            min_samples: self.min_samples,
            max_samples: self.max_samples,
            batch_size: self.batch_size,
            workers: workers.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologyConfig,
    pub traffic: TrafficConfig,
    pub fanout: FanoutConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub stop: StopConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// One `(N, fanout, β, γ)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub n_nodes: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub fanout: FanoutChoice,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::from_value(
            text.parse::<toml::Table>()
                .map_err(|e| ConfigError::Parse(e.to_string()))?,
        )
    }

    pub fn from_value(table: toml::Table) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` and applies `overrides` (`dotted.key=value`) before parsing.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut table = text
            .parse::<toml::Table>()
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_value(table)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let lam = self.topology.wavelengths;
        if lam == 0 {
            return Err(field_err("topology.wavelengths", "must be at least 1"));
        }
        let nodes = self.topology.nodes.values();
        if nodes.is_empty() {
            return Err(field_err("topology.nodes", "empty list"));
        }
        for n in &nodes {
            if *n < 3 || n % lam != 0 {
                return Err(field_err(
                    "topology.nodes",
                    format!("N = {n} must be ≥ 3 and a multiple of wavelengths = {lam}"),
                ));
            }
        }
        for (field, values) in [
            ("traffic.beta", &self.traffic.beta),
            ("traffic.gamma", &self.traffic.gamma),
        ] {
            let v = values.values();
            if v.is_empty() {
                return Err(field_err(field, "empty list"));
            }
            if let Some(x) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(field_err(field, format!("{x} outside [0, 1]")));
            }
        }
        if let Some(a) = self.traffic.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(field_err("traffic.alpha", format!("{a} outside [0, 1]")));
            }
        }
        for p in self.points() {
            if (p.alpha + p.beta + p.gamma - 1.0).abs() > 1e-9 || p.alpha < -1e-12 {
                return Err(field_err(
                    "traffic",
                    format!(
                        "alpha + beta + gamma must be 1 at every point (alpha = {}, beta = {}, gamma = {})",
                        p.alpha, p.beta, p.gamma
                    ),
                ));
            }
        }
        let choices = self.fanout.choices()?;
        for c in &choices {
            c.uniform.validate("fanout.uniform")?;
            c.hotspot_dest.validate("fanout.hotspot_dest")?;
            c.hotspot_src.validate("fanout.hotspot_src")?;
            for &n in &nodes {
                c.build(n)?;
            }
        }
        if self.run.threads == 0 {
            return Err(field_err("run.threads", "must be at least 1"));
        }
        let s = &self.stop;
        if !(s.relative_halfwidth > 0.0) {
            return Err(field_err("stop.relative_halfwidth", "must be positive"));
        }
        if s.min_samples > s.max_samples {
            return Err(field_err("stop.min_samples", "exceeds stop.max_samples"));
        }
        if s.batch_size == 0 {
            return Err(field_err("stop.batch_size", "must be positive"));
        }
        Ok(())
    }

    /// Sweep points in order: `N`, fanout, `β`, `γ`. Empty when the fanout
    /// section is incomplete; [`validate`](Self::validate) reports why.
    pub fn points(&self) -> Vec<SweepPoint> {
        let choices = self.fanout.choices().unwrap_or_default();
        let mut out = Vec::new();
        for n_nodes in self.topology.nodes.values() {
            for fanout in &choices {
                for beta in self.traffic.beta.values() {
                    for gamma in self.traffic.gamma.values() {
                        let alpha = self.traffic.alpha.unwrap_or_else(|| {
                            // Drop rounding noise such as 1 - 0.7 - 0.2.
                            ((1.0 - beta - gamma) * 1e12).round() / 1e12 + 0.0
                        });
                        out.push(SweepPoint {
                            n_nodes,
                            alpha,
                            beta,
                            gamma,
                            fanout: fanout.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Sets `dotted.key` in `table` to `value`, parsed as a TOML value when
/// possible and as a bare string otherwise.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| field_err(assignment, "override must look like key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(field_err(assignment, "empty key"));
    }
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| field_err(key, format!("{part} is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
