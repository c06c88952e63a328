//! Independent reference implementations used as oracles by the integration
//! and acceptance suites. These deliberately re-derive each definition from
//! scratch instead of calling the library's optimized paths.

#![allow(dead_code)]

use rand::Rng;
use vizprep_core::cropper::{CropConfig, Mask};
use vizprep_core::img::{Channels, Image};

/// Two-pass windowed SSIM, straight from the per-window formula.
pub fn naive_ssim(a: &Image, b: &Image) -> f64 {
    const C1: f64 = 6.5025;
    const C2: f64 = 58.5225;
    assert_eq!(a.channels(), Channels::Gray8);
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    let (w, h) = (a.width(), a.height());
    let mut total = 0.0;
    let mut count = 0u64;
    let mut wy = 0;
    while wy + 8 <= h {
        let mut wx = 0;
        while wx + 8 <= w {
            let mut va = Vec::with_capacity(64);
            let mut vb = Vec::with_capacity(64);
            for y in wy..wy + 8 {
                for x in wx..wx + 8 {
                    va.push(a.gray_at(x, y) as f64);
                    vb.push(b.gray_at(x, y) as f64);
                }
            }
            let n = 64.0;
            let mu_a = va.iter().sum::<f64>() / n;
            let mu_b = vb.iter().sum::<f64>() / n;
            let var_a = va.iter().map(|v| (v - mu_a) * (v - mu_a)).sum::<f64>() / n;
            let var_b = vb.iter().map(|v| (v - mu_b) * (v - mu_b)).sum::<f64>() / n;
            let cov = va.iter().zip(&vb).map(|(x, y)| (x - mu_a) * (y - mu_b)).sum::<f64>() / n;
            total += ((2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2))
                / ((mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2));
            count += 1;
            wx += 8;
        }
        wy += 8;
    }
    total / count as f64
}

/// Histogram by direct pixel iteration.
pub fn brute_histogram(img: &Image) -> [u64; 256] {
    assert_eq!(img.channels(), Channels::Gray8);
    let mut hist = [0u64; 256];
    for y in 0..img.height() {
        for x in 0..img.width() {
            hist[img.gray_at(x, y) as usize] += 1;
        }
    }
    hist
}

/// `-sum p log2 p` over nonzero bins.
pub fn brute_entropy(hist: &[u64; 256]) -> f64 {
    let total: u64 = hist.iter().sum();
    let mut acc = 0.0;
    for &c in hist {
        if c > 0 {
            let p = c as f64 / total as f64;
            acc -= p * p.log2();
        }
    }
    acc
}

/// Bounding-box rule re-derived from its documented definition: tight box by
/// full scan, margin padding, sqrt-scaled floor growth with recentering and a
/// final containment shift.
pub fn brute_bbox(mask: &Mask, cfg: &CropConfig) -> Option<(u32, u32, u32, u32)> {
    let (iw, ih) = (mask.width, mask.height);
    let mut found = false;
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (u32::MAX, 0u32, u32::MAX, 0u32);
    for y in 0..ih {
        for x in 0..iw {
            if mask.get(x, y) {
                found = true;
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
    }
    if !found {
        return None;
    }
    let mx = (cfg.margin_frac * iw as f64).round() as u32;
    let my = (cfg.margin_frac * ih as f64).round() as u32;
    let x0 = x_min.saturating_sub(mx);
    let y0 = y_min.saturating_sub(my);
    let x1 = (x_max + mx).min(iw - 1);
    let y1 = (y_max + my).min(ih - 1);
    let (mut bx, mut by) = (x0, y0);
    let (mut bw, mut bh) = (x1 - x0 + 1, y1 - y0 + 1);

    let target = (cfg.min_area_frac * iw as f64 * ih as f64).ceil() as u64;
    if (bw as u64) * (bh as u64) < target {
        let s = (target as f64 / (bw as f64 * bh as f64)).sqrt();
        let mut nw = ((bw as f64 * s).ceil() as u32).min(iw);
        let mut nh = ((bh as f64 * s).ceil() as u32).min(ih);
        if (nw as u64) * (nh as u64) < target {
            nh = ((target as f64 / nw as f64).ceil() as u32).min(ih);
        }
        if (nw as u64) * (nh as u64) < target {
            nw = ((target as f64 / nh as f64).ceil() as u32).min(iw);
        }
        let cx = bx as f64 + bw as f64 / 2.0;
        let cy = by as f64 + bh as f64 / 2.0;
        let nx = ((cx - nw as f64 / 2.0).round().max(0.0) as u32).min(iw - nw);
        let ny = ((cy - nh as f64 / 2.0).round().max(0.0) as u32).min(ih - nh);
        bx = nx.clamp((bx + bw).saturating_sub(nw), bx);
        by = ny.clamp((by + bh).saturating_sub(nh), by);
        bw = nw;
        bh = nh;
    }
    Some((bx, by, bw, bh))
}

pub fn random_gray(w: u32, h: u32, rng: &mut impl Rng) -> Image {
    let mut im = Image::filled(w, h, Channels::Gray8, 0);
    rng.fill(im.pixels_mut());
    im
}

/// Splits a CSV body into rows of owned cells.
pub fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

/// Blanks the named columns so runs can be compared net of timing noise.
pub fn strip_columns(text: &str, names: &[&str]) -> String {
    let mut rows = parse_csv(text);
    let header = rows[0].clone();
    let drop: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, name)| names.contains(&name.as_str()))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(drop.len(), names.len(), "missing timing columns in header {header:?}");
    for row in rows.iter_mut() {
        for &i in &drop {
            if i < row.len() {
                row[i] = String::new();
            }
        }
    }
    rows.into_iter().map(|r| r.join(",")).collect::<Vec<_>>().join("\n")
}
