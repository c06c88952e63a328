//! Config file loading. Every field is optional and falls back to the
//! library defaults; unknown keys are rejected so typos fail loudly.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::Path;
use vizprep_core::bench::BenchOptions;
use vizprep_core::pipeline::PipelineConfig;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub analyzer: AnalyzerSection,
    pub policy: PolicySection,
    pub crop: CropSection,
    pub bench: BenchSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzerSection {
    pub grad_threshold: Option<u8>,
    pub weight_edge: Option<f64>,
    pub weight_entropy: Option<f64>,
    pub weight_text: Option<f64>,
    pub edge_density_ref: Option<f64>,
    pub analysis_side: Option<u32>,
    pub t_low: Option<f64>,
    pub t_high: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub low_side: Option<u32>,
    pub medium_side: Option<u32>,
    pub high_side: Option<u32>,
    /// Defaults to `high_side` when omitted.
    pub baseline_side: Option<u32>,
    pub patch: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CropSection {
    pub grad_threshold: Option<u8>,
    pub bg_delta: Option<u8>,
    pub margin_frac: Option<f64>,
    pub min_area_frac: Option<f64>,
    pub enabled: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub repeats: Option<usize>,
    pub workers: Option<usize>,
    pub cost_per_token: Option<f64>,
    pub out_dir: Option<String>,
}

pub struct LoadedConfig {
    pub pipeline: PipelineConfig,
    pub bench: BenchOptions,
    pub out_dir: Option<String>,
}

pub fn load(path: Option<&Path>) -> Result<LoadedConfig> {
    let file = match path {
        Some(p) => {
            if !p.exists() {
                bail!("config file not found: {}", p.display());
            }
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            toml::from_str::<FileConfig>(&text)
                .with_context(|| format!("parsing config {}", p.display()))?
        }
        None => FileConfig::default(),
    };
    resolve(file)
}

fn resolve(file: FileConfig) -> Result<LoadedConfig> {
    let mut pipeline = PipelineConfig::default();

    let a = &file.analyzer;
    let an = &mut pipeline.analyzer;
    set(&mut an.grad_threshold, a.grad_threshold);
    set(&mut an.weight_edge, a.weight_edge);
    set(&mut an.weight_entropy, a.weight_entropy);
    set(&mut an.weight_text, a.weight_text);
    set(&mut an.edge_density_ref, a.edge_density_ref);
    set(&mut an.analysis_side, a.analysis_side);
    set(&mut an.t_low, a.t_low);
    set(&mut an.t_high, a.t_high);

    let p = &file.policy;
    let po = &mut pipeline.policy;
    set(&mut po.low_side, p.low_side);
    set(&mut po.medium_side, p.medium_side);
    set(&mut po.high_side, p.high_side);
    po.baseline_side = p.baseline_side.unwrap_or(po.high_side);
    set(&mut po.patch, p.patch);

    let c = &file.crop;
    let cr = &mut pipeline.crop;
    set(&mut cr.grad_threshold, c.grad_threshold);
    set(&mut cr.bg_delta, c.bg_delta);
    set(&mut cr.margin_frac, c.margin_frac);
    set(&mut cr.min_area_frac, c.min_area_frac);
    set(&mut cr.enabled, c.enabled);

    let mut bench = BenchOptions::default();
    set(&mut bench.repeats, file.bench.repeats);
    set(&mut bench.workers, file.bench.workers);
    set(&mut bench.cost_per_token, file.bench.cost_per_token);

    pipeline.analyzer = pipeline.analyzer.clone().normalized()?;
    pipeline.validate()?;
    Ok(LoadedConfig { pipeline, bench, out_dir: file.bench.out_dir })
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
