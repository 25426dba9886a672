//! Run configuration: a TOML file with key = value sections. CLI flags
//! override file values; unknown keys are rejected with their path.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Optional only when the sole analysis is the interval example,
    /// which carries its own space.
    #[serde(default)]
    pub space: Option<SpaceConfig>,
    #[serde(default)]
    pub construction: Option<ConstructionConfig>,
    #[serde(default)]
    pub analyses: AnalysesConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default)]
    pub header: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConstructionConfig {
    pub kind: String,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_n_min")]
    pub n_min: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default = "default_net")]
    pub net: String,
}

fn default_theta() -> f64 {
    1.0
}
fn default_rho() -> f64 {
    0.5
}
fn default_n_min() -> u32 {
    1
}
fn default_net() -> String {
    "greedy".into()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalysesConfig {
    #[serde(default)]
    pub metric: bool,
    #[serde(default)]
    pub spectrum: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dixmier: Option<DixmierConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_example: Option<IntervalExampleConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    #[serde(default = "default_ppo")]
    pub points_per_octave: u32,
}

fn default_ppo() -> u32 {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ZetaConfig {
    pub s: Vec<f64>,
    #[serde(default = "default_zeta_form")]
    pub form: String,
}

fn default_zeta_form() -> String {
    "abs".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DixmierConfig {
    pub functions: Vec<String>,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntervalExampleConfig {
    #[serde(default = "default_example_n_max")]
    pub n_max: u32,
    #[serde(default = "default_example_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_example_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "default_example_functions")]
    pub functions: Vec<String>,
}

fn default_example_n_max() -> u32 {
    16
}
fn default_example_lambda_min() -> f64 {
    512.0
}
fn default_example_lambda_max() -> f64 {
    8192.0
}
fn default_example_functions() -> Vec<String> {
    vec!["const1".into(), "linear".into(), "square".into()]
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default = "default_format")]
    pub format: String,
    /// Also write the module list (level, x, y, d, diag).
    #[serde(default)]
    pub dump_triple: bool,
}

fn default_out_dir() -> String {
    ".".into()
}
fn default_format() -> String {
    "csv".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            format: default_format(),
            dump_triple: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// Whether any enabled analysis needs the space/construction pipeline.
    pub fn needs_space(&self) -> bool {
        self.construction.is_some()
            || self.analyses.metric
            || self.analyses.spectrum
            || self.analyses.sweep.is_some()
            || self.analyses.zeta.is_some()
            || self.analyses.dixmier.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        match &self.space {
            None => {
                if self.needs_space() {
                    bail!("space section required by the enabled analyses");
                }
            }
            Some(space) => match space.kind.as_str() {
                "interval-grid" => {
                    let m = space.m.context("space.m required for interval-grid")?;
                    if m < 2 {
                        bail!("space.m must be >= 2, got {m}");
                    }
                }
                "cantor" => {
                    let level = space.level.context("space.level required for cantor")?;
                    if level > 15 {
                        bail!("space.level must be <= 15, got {level}");
                    }
                }
                "cloud" => {
                    space.n.context("space.n required for cloud")?;
                }
                "file" => {
                    space.path.as_ref().context("space.path required for file")?;
                    match space.format.as_deref() {
                        Some("matrix") | Some("cloud") => {}
                        other => bail!("space.format must be matrix or cloud, got {other:?}"),
                    }
                }
                other => {
                    bail!("space.kind must be interval-grid, cantor, cloud or file, got {other:?}")
                }
            },
        }
        if let Some(c) = &self.construction {
            match c.kind.as_str() {
                "st-d" => {}
                "st-delta" => {
                    let delta = c.delta.context("construction.delta required for st-delta")?;
                    if !(delta > 0.0) {
                        bail!("construction.delta must be > 0, got {delta}");
                    }
                    if !(c.theta > 0.0) {
                        bail!("construction.theta must be > 0, got {}", c.theta);
                    }
                    if !(c.rho > 0.0 && c.rho < 1.0) {
                        bail!("construction.rho must be in (0,1), got {}", c.rho);
                    }
                    c.n_max.context("construction.n_max required for st-delta")?;
                    match c.net.as_str() {
                        "greedy" | "structured" => {}
                        other => bail!("construction.net must be greedy or structured, got {other:?}"),
                    }
                }
                other => bail!("construction.kind must be st-d or st-delta, got {other:?}"),
            }
        }
        if let Some(z) = &self.analyses.zeta {
            if z.s.iter().any(|&s| s <= 0.0) {
                bail!("analyses.zeta.s values must be > 0");
            }
            match z.form.as_str() {
                "abs" | "resolvent" => {}
                other => bail!("analyses.zeta.form must be abs or resolvent, got {other:?}"),
            }
        }
        if let Some(d) = &self.analyses.dixmier {
            if !(d.lambda > 1.0) {
                bail!("analyses.dixmier.lambda must be > 1, got {}", d.lambda);
            }
        }
        match self.output.format.as_str() {
            "csv" | "tsv" => {}
            other => bail!("output.format must be csv or tsv, got {other:?}"),
        }
        Ok(())
    }

    /// Canonical serialized form; hashing this pins the effective run.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Like `canonical_toml` but with the output section normalized, so
    /// the same computation written to two directories hashes the same.
    pub fn analysis_toml(&self) -> String {
        let mut normalized = self.clone();
        normalized.output = OutputConfig::default();
        normalized.canonical_toml()
    }
}
