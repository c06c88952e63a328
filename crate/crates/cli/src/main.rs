//! `vizprep` — analyze image complexity, run the baseline/adaptive
//! preprocessing paths, generate the synthetic corpus, and benchmark both
//! paths against each other.

mod config;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use vizprep_core::bench::{emit_report, run_paired, summarize};
use vizprep_core::corpus::{write_to_dir, CorpusManifest, CorpusSpec};
use vizprep_core::img;
use vizprep_core::pipeline::{adaptive_preprocess, baseline_preprocess, PipelineConfig};

const OUT_ENV: &str = "VIZPREP_OUT";

#[derive(Parser)]
#[command(name = "vizprep", version, about = "Content-aware adaptive image preprocessing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Baseline,
    Adaptive,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print one JSON line of complexity signals per image
    Analyze {
        /// Image file or directory of images
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run one preprocessing path and write the output PNG plus a plan JSON
    Preprocess {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Output directory (falls back to $VIZPREP_OUT)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Disable content-aware cropping
        #[arg(long)]
        no_crop: bool,
        /// Override the patch side in pixels
        #[arg(long)]
        patch: Option<u32>,
        /// Override the tier table as LOW,MEDIUM,HIGH long sides
        #[arg(long)]
        tiers: Option<String>,
        /// Also dump the content mask and crop-box overlay as PNGs
        #[arg(long)]
        debug_mask: bool,
    },
    /// Generate the deterministic synthetic document corpus
    GenCorpus {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Page counts as LOW,MEDIUM,HIGH
        #[arg(long)]
        counts: Option<String>,
        /// Page size as WxH
        #[arg(long)]
        dims: Option<String>,
    },
    /// Paired baseline-vs-adaptive benchmark over a directory of images
    Bench {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        no_crop: bool,
        #[arg(long)]
        patch: Option<u32>,
        #[arg(long)]
        tiers: Option<String>,
    },
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Analyze { input, config } => cmd_analyze(&input, config.as_deref()),
        Cmd::Preprocess { input, mode, out, config, no_crop, patch, tiers, debug_mask } => {
            let mut loaded = config::load(config.as_deref())?;
            apply_overrides(&mut loaded.pipeline, no_crop, patch, tiers.as_deref())?;
            let out = resolve_out(out, loaded.out_dir.as_deref())?;
            cmd_preprocess(&input, mode, &out, &loaded.pipeline, debug_mask)
        }
        Cmd::GenCorpus { out, seed, counts, dims } => {
            let out = resolve_out(out, None)?;
            cmd_gen_corpus(&out, seed, counts.as_deref(), dims.as_deref())
        }
        Cmd::Bench { input, out, config, workers, repeats, no_crop, patch, tiers } => {
            let mut loaded = config::load(config.as_deref())?;
            apply_overrides(&mut loaded.pipeline, no_crop, patch, tiers.as_deref())?;
            if let Some(w) = workers {
                loaded.bench.workers = w;
            }
            if let Some(r) = repeats {
                loaded.bench.repeats = r;
            }
            let out = resolve_out(out, loaded.out_dir.as_deref())?;
            cmd_bench(&input, &out, &loaded.pipeline, &loaded.bench)
        }
    }
}

/// Flag overrides win over the config file.
fn apply_overrides(
    cfg: &mut PipelineConfig,
    no_crop: bool,
    patch: Option<u32>,
    tiers: Option<&str>,
) -> Result<()> {
    if no_crop {
        cfg.crop.enabled = false;
    }
    if let Some(p) = patch {
        cfg.policy.patch = p;
    }
    if let Some(t) = tiers {
        let parts: Vec<u32> = t
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("parsing --tiers {t:?}"))?;
        let [low, medium, high] = parts[..] else {
            bail!("--tiers expects three values: LOW,MEDIUM,HIGH");
        };
        cfg.policy.low_side = low;
        cfg.policy.medium_side = medium;
        cfg.policy.high_side = high;
        cfg.policy.baseline_side = high;
    }
    cfg.validate()?;
    Ok(())
}

fn resolve_out(flag: Option<PathBuf>, config_dir: Option<&str>) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Ok(env) = std::env::var(OUT_ENV) {
        if !env.is_empty() {
            return Ok(PathBuf::from(env));
        }
    }
    if let Some(dir) = config_dir {
        return Ok(PathBuf::from(dir));
    }
    bail!("no output directory: pass --out or set {OUT_ENV}");
}

/// Images of a run, in manifest order: a single file, the `manifest.json`
/// order when present, otherwise the sorted directory listing.
fn list_images(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    if !input.is_dir() {
        bail!("input not found: {}", input.display());
    }
    let manifest = input.join("manifest.json");
    if manifest.exists() {
        let text = std::fs::read_to_string(&manifest)?;
        let parsed: CorpusManifest =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest.display()))?;
        return Ok(parsed.entries.iter().map(|e| input.join(&e.filename)).collect());
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref(),
                Some("png" | "jpg" | "jpeg")
            )
        })
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_analyze(input: &Path, config: Option<&Path>) -> Result<()> {
    let loaded = config::load(config)?;
    let paths = list_images(input)?;
    let mut readable = 0usize;
    for path in &paths {
        let image = match std::fs::read(path).map_err(anyhow::Error::from).and_then(|b| Ok(img::decode(&b)?)) {
            Ok(i) => i,
            Err(e) => {
                eprintln!("skipping {}: {e:#}", path.display());
                continue;
            }
        };
        let report = vizprep_core::analyzer::analyze(&image, &loaded.pipeline.analyzer);
        let line = serde_json::json!({
            "file": path.display().to_string(),
            "width": image.width(),
            "height": image.height(),
            "edge_density": report.edge_density,
            "entropy_bits": report.entropy_bits,
            "text_density": report.text_density,
            "score": report.score,
            "class": report.class,
        });
        println!("{line}");
        readable += 1;
    }
    if readable == 0 {
        bail!("no readable images under {}", input.display());
    }
    Ok(())
}

/// Writes `<stem>.mask.png` (content pixels in white) and
/// `<stem>.overlay.png` (source with the crop box outlined).
fn dump_mask_debug(image: &vizprep_core::img::Image, cfg: &PipelineConfig, out: &Path, stem: &str) -> Result<()> {
    use vizprep_core::cropper::{content_bbox, content_mask};
    use vizprep_core::img::{Channels, Image};

    let gray = vizprep_core::img::to_gray(image);
    let mask = content_mask(&gray, &cfg.crop);
    let mask_img = Image::new(
        mask.width,
        mask.height,
        Channels::Gray8,
        mask.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
    )
    .expect("mask dims match");
    std::fs::write(out.join(format!("{stem}.mask.png")), img::encode_png(&mask_img)?)?;

    let mut overlay = gray;
    if let Some(cb) = content_bbox(&mask, &cfg.crop) {
        let w = overlay.width();
        let stroke = 3u32.min(cb.w).min(cb.h);
        for y in cb.y..cb.y + cb.h {
            for x in cb.x..cb.x + cb.w {
                let on_edge = x < cb.x + stroke
                    || x >= cb.x + cb.w - stroke
                    || y < cb.y + stroke
                    || y >= cb.y + cb.h - stroke;
                if on_edge {
                    overlay.pixels_mut()[(y * w + x) as usize] = 128;
                }
            }
        }
    }
    std::fs::write(out.join(format!("{stem}.overlay.png")), img::encode_png(&overlay)?)?;
    Ok(())
}

fn cmd_preprocess(
    input: &Path,
    mode: Mode,
    out: &Path,
    cfg: &PipelineConfig,
    debug_mask: bool,
) -> Result<()> {
    let paths = list_images(input)?;
    if paths.is_empty() {
        bail!("no images under {}", input.display());
    }
    std::fs::create_dir_all(out)?;
    let mut processed = 0usize;
    for path in &paths {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
        let image = match std::fs::read(path).map_err(anyhow::Error::from).and_then(|b| Ok(img::decode(&b)?)) {
            Ok(i) => i,
            Err(e) => {
                eprintln!("skipping {}: {e:#}", path.display());
                continue;
            }
        };
        let (output, plan_json) = match mode {
            Mode::Baseline => {
                let (output, stats) = baseline_preprocess(&image, &cfg.policy);
                let plan = serde_json::json!({
                    "mode": "baseline",
                    "source": path.display().to_string(),
                    "output_dims": [stats.width, stats.height],
                    "patch": stats.patch,
                    "tokens": stats.token_count,
                });
                (output, plan)
            }
            Mode::Adaptive => {
                let (output, plan) = adaptive_preprocess(&image, cfg);
                let mut value = serde_json::to_value(&plan).expect("plan serializes");
                value["mode"] = "adaptive".into();
                value["source"] = path.display().to_string().into();
                (output, value)
            }
        };
        std::fs::write(out.join(format!("{stem}.png")), img::encode_png(&output)?)?;
        std::fs::write(
            out.join(format!("{stem}.plan.json")),
            serde_json::to_vec_pretty(&plan_json).expect("plan serializes"),
        )?;
        if debug_mask {
            dump_mask_debug(&image, cfg, out, stem)?;
        }
        processed += 1;
    }
    if processed == 0 {
        bail!("no readable images under {}", input.display());
    }
    eprintln!("wrote {processed} image(s) to {}", out.display());
    Ok(())
}

fn cmd_gen_corpus(out: &Path, seed: Option<u64>, counts: Option<&str>, dims: Option<&str>) -> Result<()> {
    let mut spec = CorpusSpec::default();
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(c) = counts {
        let parts: Vec<u32> = c
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("parsing --counts {c:?}"))?;
        let [low, medium, high] = parts[..] else {
            bail!("--counts expects three values: LOW,MEDIUM,HIGH");
        };
        spec.count_low = low;
        spec.count_medium = medium;
        spec.count_high = high;
    }
    if let Some(d) = dims {
        let (w, h) = d
            .split_once('x')
            .with_context(|| format!("parsing --dims {d:?}, expected WxH"))?;
        spec.page_w = w.trim().parse().with_context(|| format!("parsing --dims {d:?}"))?;
        spec.page_h = h.trim().parse().with_context(|| format!("parsing --dims {d:?}"))?;
    }
    let manifest = write_to_dir(&spec, out)?;
    eprintln!("wrote {} page(s) + manifest.json to {}", manifest.entries.len(), out.display());
    Ok(())
}

fn cmd_bench(
    input: &Path,
    out: &Path,
    cfg: &PipelineConfig,
    opts: &vizprep_core::bench::BenchOptions,
) -> Result<()> {
    let paths = list_images(input)?;
    let (entries, wall_ms) = run_paired(&paths, cfg, opts)?;
    let summary = summarize(&entries, wall_ms)?;
    emit_report(&summary, &entries, out)?;
    println!(
        "n={} skipped={} mean_token_reduction={:.4} mean_baseline_prep_ms={:.2} \
         mean_adaptive_prep_ms={:.2} mean_quality={:.4} wall_ms={:.0} out={}",
        summary.n,
        summary.skipped,
        summary.mean_token_reduction,
        summary.baseline_prep_ms.mean,
        summary.adaptive_prep_ms.mean,
        summary.quality_value.mean,
        summary.wall_clock_total_ms,
        out.display()
    );
    Ok(())
}
