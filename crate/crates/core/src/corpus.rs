//! Deterministic synthetic document pages with known complexity classes.
//!
//! Pages are built from stripe blocks (alternating dark/light horizontal
//! bands) that mimic the edge and entropy statistics of printed text without
//! any font dependency. The geometry below is calibrated against the default
//! [`AnalyzerConfig`](crate::analyzer::AnalyzerConfig) so generated pages land
//! firmly inside their intended class band:
//!
//! * low pages put one small fine-striped paragraph on a white page,
//! * medium pages stack 2-3 ruled text-line blocks covering roughly a third
//!   of the page,
//! * high pages fill nearly the whole page with dense randomized stripes plus
//!   a 1-px table grid reaching the page margins.

use crate::analyzer::ComplexityClass;
use crate::error::{Error, Result};
use crate::img::{self, Channels, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count_low: u32,
    pub count_medium: u32,
    pub count_high: u32,
    pub page_w: u32,
    pub page_h: u32,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { seed: 42, count_low: 12, count_medium: 10, count_high: 10, page_w: 1700, page_h: 2200 }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.page_w < 256 || self.page_h < 256 {
            return Err(Error::InvalidConfig("page dimensions must be >= 256".into()));
        }
        Ok(())
    }
}

/// One manifest row: where a page went and what it is.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub filename: String,
    pub intended_class: ComplexityClass,
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub entries: Vec<CorpusEntry>,
}

/// Fills `rect` with alternating bands: `dark_h` rows drawn from the `dark`
/// value range, then `light_h` rows from `light`. One value is sampled per
/// band, so the texture is deterministic under a fixed rng state.
#[allow(clippy::too_many_arguments)]
pub fn draw_stripe_block(
    image: &mut Image,
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    dark_h: u32,
    light_h: u32,
    dark: (u8, u8),
    light: (u8, u8),
    rng: &mut ChaCha8Rng,
) {
    assert_eq!(image.channels(), Channels::Gray8);
    let iw = image.width();
    let period = dark_h + light_h;
    let mut row = 0;
    while row < h {
        let in_dark = row % period < dark_h;
        let band_rows = if in_dark { dark_h - row % period } else { period - row % period };
        let value = if in_dark {
            rng.gen_range(dark.0..=dark.1)
        } else {
            rng.gen_range(light.0..=light.1)
        };
        for r in row..(row + band_rows).min(h) {
            let start = ((y + r) * iw + x) as usize;
            image.pixels_mut()[start..start + w as usize].fill(value);
        }
        row += band_rows;
    }
}

fn draw_hline(image: &mut Image, y: u32, x0: u32, x1: u32, thickness: u32, value: u8) {
    let iw = image.width();
    for r in y..(y + thickness).min(image.height()) {
        let start = (r * iw + x0) as usize;
        image.pixels_mut()[start..start + (x1 - x0) as usize].fill(value);
    }
}

fn draw_vline(image: &mut Image, x: u32, y0: u32, y1: u32, value: u8) {
    let iw = image.width();
    for y in y0..y1 {
        image.pixels_mut()[(y * iw + x) as usize] = value;
    }
}

fn frac(v: u32, f: f64) -> u32 {
    (v as f64 * f).round() as u32
}

fn low_page(w: u32, h: u32, rng: &mut ChaCha8Rng) -> Image {
    let mut page = Image::filled(w, h, Channels::Gray8, 255);
    let bw = frac(w, rng.gen_range(0.20..=0.30));
    let bh = frac(h, rng.gen_range(0.12..=0.18));
    let x = rng.gen_range(frac(w, 0.08)..=frac(w, 0.92) - bw);
    let y = rng.gen_range(frac(h, 0.08)..=frac(h, 0.92) - bh);
    draw_stripe_block(&mut page, x, y, bw, bh, 4, 4, (60, 110), (200, 240), rng);
    page
}

fn medium_page(w: u32, h: u32, rng: &mut ChaCha8Rng) -> Image {
    let mut page = Image::filled(w, h, Channels::Gray8, 255);
    let n = rng.gen_range(2..=3u32);
    let coverage = rng.gen_range(0.30..=0.42);
    let span0 = 0.06;
    let span1 = 0.94;
    let slot_h = (span1 - span0) / n as f64;
    for i in 0..n {
        let wf = rng.gen_range(0.60..=0.85);
        let bw = frac(w, wf);
        let bh = frac(h, (coverage / n as f64) / wf);
        let slot_top = frac(h, span0 + i as f64 * slot_h);
        let slot_bot = frac(h, span0 + (i + 1) as f64 * slot_h);
        let x = if i == 0 {
            frac(w, 0.06)
        } else if i == n - 1 {
            frac(w, 0.94) - bw
        } else {
            rng.gen_range(frac(w, 0.06)..=frac(w, 0.94) - bw)
        };
        let y = if i == 0 {
            slot_top
        } else if i == n - 1 {
            slot_bot - bh
        } else {
            rng.gen_range(slot_top + 12..=slot_bot - bh)
        };
        draw_stripe_block(&mut page, x, y, bw, bh, 6, 22, (90, 130), (255, 255), rng);
    }
    let line_y = frac(h, span0 + slot_h) + rng.gen_range(2..=8);
    draw_hline(&mut page, line_y, frac(w, 0.08), frac(w, 0.92), 3, 60);
    page
}

fn high_page(w: u32, h: u32, rng: &mut ChaCha8Rng) -> Image {
    let mut page = Image::filled(w, h, Channels::Gray8, 255);
    let x0 = frac(w, 0.01);
    let y0 = frac(h, 0.01);
    let x1 = frac(w, 0.99);
    let y1 = frac(h, 0.99);
    draw_stripe_block(&mut page, x0, y0, x1 - x0, y1 - y0, 4, 4, (0, 115), (150, 255), rng);
    // 1-px table rules every 40-80 px, spanning the whole fill
    let mut x = x0 + rng.gen_range(40..=80);
    while x < x1 {
        draw_vline(&mut page, x, y0, y1, rng.gen_range(0..=40) as u8);
        x += rng.gen_range(40..=80);
    }
    let mut y = y0 + rng.gen_range(40..=80);
    while y < y1 {
        draw_hline(&mut page, y, x0, x1, 1, rng.gen_range(0..=40) as u8);
        y += rng.gen_range(40..=80);
    }
    page
}

/// Generates the corpus in manifest order: all low pages, then medium, then
/// high. Byte-identical for a fixed spec.
pub fn generate(spec: &CorpusSpec) -> Result<Vec<(Image, CorpusEntry)>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    let classes = [
        (ComplexityClass::Low, spec.count_low, "low"),
        (ComplexityClass::Medium, spec.count_medium, "medium"),
        (ComplexityClass::High, spec.count_high, "high"),
    ];
    let mut index = 0u32;
    for (class, count, slug) in classes {
        for _ in 0..count {
            let page = match class {
                ComplexityClass::Low => low_page(spec.page_w, spec.page_h, &mut rng),
                ComplexityClass::Medium => medium_page(spec.page_w, spec.page_h, &mut rng),
                ComplexityClass::High => high_page(spec.page_w, spec.page_h, &mut rng),
            };
            let entry = CorpusEntry {
                filename: format!("{index:03}_{slug}.png"),
                intended_class: class,
                width: spec.page_w,
                height: spec.page_h,
            };
            out.push((page, entry));
            index += 1;
        }
    }
    Ok(out)
}

/// Generates and writes PNGs plus `manifest.json` into `dir`.
pub fn write_to_dir(spec: &CorpusSpec, dir: &Path) -> Result<CorpusManifest> {
    std::fs::create_dir_all(dir)?;
    let pages = generate(spec)?;
    let mut entries = Vec::with_capacity(pages.len());
    for (page, entry) in pages {
        std::fs::write(dir.join(&entry.filename), img::encode_png(&page)?)?;
        entries.push(entry);
    }
    let manifest = CorpusManifest { seed: spec.seed, entries };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    std::fs::write(dir.join("manifest.json"), json)?;
    Ok(manifest)
}
