//! Paired evaluation harness: run the baseline and adaptive paths on the same
//! inputs, time the preprocessing, account tokens and proxy cost, score
//! visual quality, aggregate, and emit machine-readable reports.
//!
//! Preprocessing time is measured directly on a monotonic clock. Encoder and
//! prefill latency cannot be measured without a model backbone, so the report
//! carries a proxy cost (`tokens * cost_per_token`) in clearly labelled
//! columns; relative proxy cost equals relative token count by construction.

use crate::analyzer::ComplexityClass;
use crate::error::{Error, Result};
use crate::img;
use crate::pipeline::{
    adaptive_preprocess, baseline_preprocess, reconstruct_in_baseline_frame, PipelineConfig,
};
use crate::quality::{quality_score, QualityScore};
use crate::tokens::{self, TokenStats};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchOptions {
    /// Timed runs per image and path; the first run is discarded as warm-up
    /// when at least 3 repeats are requested.
    pub repeats: usize,
    /// Worker threads; 0 picks the machine default.
    pub workers: usize,
    /// Proxy cost per visual token.
    pub cost_per_token: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { repeats: 3, workers: 0, cost_per_token: 1.0 }
    }
}

/// One image's paired measurements.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairedRecord {
    /// Truncated SHA-256 of the input bytes; both paths share the same bytes.
    pub image_id: String,
    pub source: String,
    pub complexity_class: ComplexityClass,
    pub baseline_tokens: u64,
    pub adaptive_tokens: u64,
    pub token_reduction: f64,
    pub baseline_prep_ms: f64,
    pub adaptive_prep_ms: f64,
    pub baseline_proxy_cost: f64,
    pub adaptive_proxy_cost: f64,
    pub quality: QualityScore,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum BenchEntry {
    Record(PairedRecord),
    Skipped { source: String, reason: String },
}

impl BenchEntry {
    pub fn record(&self) -> Option<&PairedRecord> {
        match self {
            BenchEntry::Record(r) => Some(r),
            BenchEntry::Skipped { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub n: usize,
    pub mean_token_reduction: f64,
    pub mean_quality: f64,
    pub mean_adaptive_tokens: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub schema_version: u32,
    pub tool_version: String,
    pub n: usize,
    pub skipped: usize,
    pub mean_token_reduction: f64,
    pub token_reduction: MetricSummary,
    pub baseline_prep_ms: MetricSummary,
    pub adaptive_prep_ms: MetricSummary,
    pub baseline_proxy_cost: MetricSummary,
    pub adaptive_proxy_cost: MetricSummary,
    pub quality_value: MetricSummary,
    pub per_class: BTreeMap<String, ClassSummary>,
    pub wall_clock_total_ms: f64,
    pub proxy_cost_note: String,
}

/// Lower-middle-element median for even counts, matching the aggregate rule
/// used throughout the reports.
fn median(sorted: &[f64]) -> f64 {
    sorted[(sorted.len() - 1) / 2]
}

/// Nearest-rank 90th percentile.
fn p90(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let rank = ((0.9 * n as f64).ceil() as usize).max(1);
    sorted[rank - 1]
}

fn summarize_metric(values: &[f64]) -> MetricSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    MetricSummary {
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median: median(&sorted),
        p90: p90(&sorted),
    }
}

fn time_runs<T>(repeats: usize, mut run: impl FnMut() -> T) -> (T, f64) {
    let mut samples = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        last = Some(run());
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    if samples.len() >= 3 {
        samples.remove(0);
    }
    samples.sort_by(|a, b| a.partial_cmp(b).expect("durations are finite"));
    (last.expect("at least one run"), median(&samples))
}

fn process_one(path: &Path, cfg: &PipelineConfig, opts: &BenchOptions) -> BenchEntry {
    let source = path.display().to_string();
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return BenchEntry::Skipped { source, reason: format!("read failed: {e}") },
    };
    let image = match img::decode(&bytes) {
        Ok(i) => i,
        Err(e) => return BenchEntry::Skipped { source, reason: format!("{e}") },
    };
    let digest = Sha256::digest(&bytes);
    let image_id = hex_prefix(&digest, 16);

    let ((baseline_out, baseline_stats), baseline_prep_ms) =
        time_runs(opts.repeats, || baseline_preprocess(&image, &cfg.policy));
    let ((adaptive_out, plan), adaptive_prep_ms) =
        time_runs(opts.repeats, || adaptive_preprocess(&image, cfg));

    let adaptive_stats =
        TokenStats::new(adaptive_out.width(), adaptive_out.height(), cfg.policy.patch)
            .expect("pipeline output is snapped");
    debug_assert_eq!(adaptive_stats.token_count, plan.predicted_tokens);

    let reconstructed = reconstruct_in_baseline_frame(
        &adaptive_out,
        &plan,
        image.width(),
        image.height(),
        &cfg.policy,
    );
    let quality = quality_score(&baseline_out, &reconstructed);

    BenchEntry::Record(PairedRecord {
        image_id,
        source,
        complexity_class: plan.complexity.class,
        baseline_tokens: baseline_stats.token_count,
        adaptive_tokens: adaptive_stats.token_count,
        token_reduction: tokens::reduction(&baseline_stats, &adaptive_stats),
        baseline_prep_ms,
        adaptive_prep_ms,
        baseline_proxy_cost: baseline_stats.token_count as f64 * opts.cost_per_token,
        adaptive_proxy_cost: adaptive_stats.token_count as f64 * opts.cost_per_token,
        quality,
    })
}

fn hex_prefix(digest: &[u8], chars: usize) -> String {
    let mut s = String::with_capacity(chars);
    for b in digest {
        use std::fmt::Write;
        write!(s, "{b:02x}").unwrap();
        if s.len() >= chars {
            break;
        }
    }
    s.truncate(chars);
    s
}

/// Runs both paths on every manifest image. Entries come back in manifest
/// order regardless of worker scheduling; decode failures become skipped
/// entries instead of aborting the batch. Returns the entries plus the batch
/// wall-clock time in milliseconds.
pub fn run_paired(
    paths: &[PathBuf],
    cfg: &PipelineConfig,
    opts: &BenchOptions,
) -> Result<(Vec<BenchEntry>, f64)> {
    if paths.is_empty() {
        return Err(Error::EmptyManifest);
    }
    if opts.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    let entries = pool.install(|| {
        use rayon::prelude::*;
        paths.par_iter().map(|p| process_one(p, cfg, opts)).collect::<Vec<_>>()
    });
    Ok((entries, start.elapsed().as_secs_f64() * 1e3))
}

/// Exact aggregates over the non-skipped records.
pub fn summarize(entries: &[BenchEntry], wall_clock_total_ms: f64) -> Result<BenchSummary> {
    let records: Vec<&PairedRecord> = entries.iter().filter_map(|e| e.record()).collect();
    if records.is_empty() {
        return Err(Error::AllSkipped);
    }
    let col = |f: fn(&PairedRecord) -> f64| records.iter().map(|r| f(r)).collect::<Vec<_>>();
    let reductions = col(|r| r.token_reduction);

    let mut per_class = BTreeMap::new();
    for class in [ComplexityClass::Low, ComplexityClass::Medium, ComplexityClass::High] {
        let group: Vec<&&PairedRecord> =
            records.iter().filter(|r| r.complexity_class == class).collect();
        if group.is_empty() {
            continue;
        }
        let n = group.len() as f64;
        per_class.insert(
            class.to_string(),
            ClassSummary {
                n: group.len(),
                mean_token_reduction: group.iter().map(|r| r.token_reduction).sum::<f64>() / n,
                mean_quality: group.iter().map(|r| r.quality.value).sum::<f64>() / n,
                mean_adaptive_tokens: group.iter().map(|r| r.adaptive_tokens as f64).sum::<f64>() / n,
            },
        );
    }

    let token_reduction = summarize_metric(&reductions);
    Ok(BenchSummary {
        schema_version: 1,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        n: records.len(),
        skipped: entries.len() - records.len(),
        mean_token_reduction: token_reduction.mean,
        token_reduction,
        baseline_prep_ms: summarize_metric(&col(|r| r.baseline_prep_ms)),
        adaptive_prep_ms: summarize_metric(&col(|r| r.adaptive_prep_ms)),
        baseline_proxy_cost: summarize_metric(&col(|r| r.baseline_proxy_cost)),
        adaptive_proxy_cost: summarize_metric(&col(|r| r.adaptive_proxy_cost)),
        quality_value: summarize_metric(&col(|r| r.quality.value)),
        per_class,
        wall_clock_total_ms,
        proxy_cost_note: "proxy cost = token_count * cost_per_token; it stands in for encoder and \
                          prefill latency, which this harness does not execute. prep_ms columns \
                          are measured preprocessing time and must not be compared with proxy \
                          cost columns."
            .to_string(),
    })
}

pub const RECORDS_HEADER: &str = "image_id,source,complexity_class,baseline_tokens,adaptive_tokens,token_reduction,baseline_prep_ms,adaptive_prep_ms,baseline_proxy_cost,adaptive_proxy_cost,quality_value,quality_method,status,skip_reason";

fn csv_safe(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn records_csv(entries: &[BenchEntry]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for entry in entries {
        match entry {
            BenchEntry::Record(r) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},ok,\n",
                    r.image_id,
                    csv_safe(&r.source),
                    r.complexity_class,
                    r.baseline_tokens,
                    r.adaptive_tokens,
                    r.token_reduction,
                    r.baseline_prep_ms,
                    r.adaptive_prep_ms,
                    r.baseline_proxy_cost,
                    r.adaptive_proxy_cost,
                    r.quality.value,
                    r.quality.method,
                ));
            }
            BenchEntry::Skipped { source, reason } => {
                out.push_str(&format!(
                    ",{},,,,,,,,,,,skipped,{}\n",
                    csv_safe(source),
                    csv_safe(reason)
                ));
            }
        }
    }
    out
}

/// Writes `records.csv`, `summary.json`, and the per-figure data series.
pub fn emit_report(summary: &BenchSummary, entries: &[BenchEntry], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("records.csv"), records_csv(entries))?;
    let json = serde_json::to_vec_pretty(summary).expect("summary serializes");
    std::fs::write(dir.join("summary.json"), json)?;

    let records: Vec<&PairedRecord> = entries.iter().filter_map(|e| e.record()).collect();

    let mut fig5 = String::from("image_id,baseline_prep_ms,adaptive_prep_ms\n");
    let mut fig7 = String::from("image_id,token_reduction\n");
    let mut fig8 = String::from("image_id,adaptive_tokens,quality_value,method\n");
    let mut fig9 = String::from("image_id,quality_value,method\n");
    for r in &records {
        fig5.push_str(&format!("{},{},{}\n", r.image_id, r.baseline_prep_ms, r.adaptive_prep_ms));
        fig7.push_str(&format!("{},{}\n", r.image_id, r.token_reduction));
        fig8.push_str(&format!(
            "{},{},{},{}\n",
            r.image_id, r.adaptive_tokens, r.quality.value, r.quality.method
        ));
        fig9.push_str(&format!("{},{},{}\n", r.image_id, r.quality.value, r.quality.method));
    }
    let fig6 = format!(
        "metric,baseline,adaptive\nmean_prep_ms,{},{}\nmean_proxy_cost,{},{}\n",
        summary.baseline_prep_ms.mean,
        summary.adaptive_prep_ms.mean,
        summary.baseline_proxy_cost.mean,
        summary.adaptive_proxy_cost.mean,
    );
    std::fs::write(dir.join("fig5_times.csv"), fig5)?;
    std::fs::write(dir.join("fig6_means.csv"), fig6)?;
    std::fs::write(dir.join("fig7_reduction.csv"), fig7)?;
    std::fs::write(dir.join("fig8_tokens_vs_quality.csv"), fig8)?;
    std::fs::write(dir.join("fig9_quality.csv"), fig9)?;
    Ok(())
}
