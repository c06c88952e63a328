//! Content-aware cropping: mark content pixels, bound them, pad the box, and
//! crop to it.

use crate::error::{Error, Result};
use crate::img::{self, Channels, Image};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CropConfig {
    /// Gradient magnitude at or above which a pixel counts as content.
    pub grad_threshold: u8,
    /// Minimum luma distance from the estimated background to count as content.
    pub bg_delta: u8,
    /// Padding added around the tight box, as a fraction of each image dimension.
    pub margin_frac: f64,
    /// Minimum crop area relative to the full image.
    pub min_area_frac: f64,
    pub enabled: bool,
}

impl Default for CropConfig {
    fn default() -> Self {
        Self { grad_threshold: 32, bg_delta: 24, margin_frac: 0.02, min_area_frac: 0.10, enabled: true }
    }
}

impl CropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.2).contains(&self.margin_frac) {
            return Err(Error::InvalidConfig("margin_frac must be in [0, 0.2]".into()));
        }
        if !(self.min_area_frac > 0.0 && self.min_area_frac <= 1.0) {
            return Err(Error::InvalidConfig("min_area_frac must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Axis-aligned crop rectangle, fully inside its source image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl CropBox {
    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }
}

/// Binary content mask with the dimensions of its source image.
#[derive(Clone, Debug)]
pub struct Mask {
    pub width: u32,
    pub height: u32,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize);
        Self { width, height, data }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Most frequent luma along the 1-px border ring; ties resolve to the
/// smallest value. Document margins dominate the border, so this is a robust
/// background estimate.
pub fn border_ring_mode(gray: &Image) -> u8 {
    assert_eq!(gray.channels(), Channels::Gray8);
    let (w, h) = (gray.width(), gray.height());
    let mut counts = [0u64; 256];
    for x in 0..w {
        counts[gray.gray_at(x, 0) as usize] += 1;
        counts[gray.gray_at(x, h - 1) as usize] += 1;
    }
    for y in 0..h {
        counts[gray.gray_at(0, y) as usize] += 1;
        counts[gray.gray_at(w - 1, y) as usize] += 1;
    }
    let mut best = (0u64, 0usize);
    for (v, &c) in counts.iter().enumerate() {
        if c > best.0 {
            best = (c, v);
        }
    }
    best.1 as u8
}

/// Marks a pixel as content when its luma differs from the background by at
/// least `bg_delta`, or its gradient magnitude reaches `grad_threshold`.
pub fn content_mask(gray: &Image, cfg: &CropConfig) -> Mask {
    assert_eq!(gray.channels(), Channels::Gray8, "content_mask expects Gray8");
    let bg = border_ring_mode(gray) as i32;
    let gm = img::gradient_magnitude(gray);
    let data = gray
        .pixels()
        .iter()
        .zip(gm.magnitudes.iter())
        .map(|(&l, &g)| (l as i32 - bg).unsigned_abs() >= cfg.bg_delta as u32 || g >= cfg.grad_threshold)
        .collect();
    Mask { width: gray.width(), height: gray.height(), data }
}

/// Tightest box around the true pixels, padded by `margin_frac` per side and
/// grown to the `min_area_frac` floor. Returns `None` for an all-false mask.
///
/// Floor growth scales both dimensions by `sqrt(target / area)` (rounded up,
/// clamped to the frame), recenters on the padded box's center, and finally
/// shifts as needed so the padded box stays contained. The resulting area is
/// the smallest this rule reaches at or above the floor; an exact hit is
/// generally impossible with integer dimensions.
pub fn content_bbox(mask: &Mask, cfg: &CropConfig) -> Option<CropBox> {
    let (iw, ih) = (mask.width, mask.height);
    let mut x_min = u32::MAX;
    let mut x_max = 0u32;
    let mut y_min = u32::MAX;
    let mut y_max = 0u32;
    for y in 0..ih {
        let row = &mask.data[y as usize * iw as usize..(y as usize + 1) * iw as usize];
        if let Some(first) = row.iter().position(|&b| b) {
            let last = row.iter().rposition(|&b| b).unwrap() as u32;
            x_min = x_min.min(first as u32);
            x_max = x_max.max(last);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if x_min == u32::MAX {
        return None;
    }

    let mx = (cfg.margin_frac * iw as f64).round() as u32;
    let my = (cfg.margin_frac * ih as f64).round() as u32;
    let x0 = x_min.saturating_sub(mx);
    let y0 = y_min.saturating_sub(my);
    let x1 = (x_max + mx).min(iw - 1);
    let y1 = (y_max + my).min(ih - 1);
    let mut bx = x0;
    let mut by = y0;
    let mut bw = x1 - x0 + 1;
    let mut bh = y1 - y0 + 1;

    let target = (cfg.min_area_frac * iw as f64 * ih as f64).ceil() as u64;
    if (bw as u64) * (bh as u64) < target {
        let scale = (target as f64 / (bw as f64 * bh as f64)).sqrt();
        let mut nw = ((bw as f64 * scale).ceil() as u32).min(iw);
        let mut nh = ((bh as f64 * scale).ceil() as u32).min(ih);
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
        // keep the padded box contained even when clamping shifted the center
        bx = nx.clamp((bx + bw).saturating_sub(nw), bx);
        by = ny.clamp((by + bh).saturating_sub(nh), by);
        bw = nw;
        bh = nh;
    }
    Some(CropBox { x: bx, y: by, w: bw, h: bh })
}

/// Exact sub-rectangle copy, channels preserved.
pub fn crop(image: &Image, cb: &CropBox) -> Result<Image> {
    let (iw, ih) = (image.width(), image.height());
    if cb.w == 0 || cb.h == 0 || cb.x + cb.w > iw || cb.y + cb.h > ih {
        return Err(Error::OutOfBounds(format!(
            "box {}x{}+{}+{} in image {}x{}",
            cb.w, cb.h, cb.x, cb.y, iw, ih
        )));
    }
    if cb.x == 0 && cb.y == 0 && cb.w == iw && cb.h == ih {
        return Ok(image.clone());
    }
    let ch = image.channels().count();
    let src = image.pixels();
    let src_stride = iw as usize * ch;
    let dst_stride = cb.w as usize * ch;
    let mut out = Vec::with_capacity(dst_stride * cb.h as usize);
    for row in cb.y..cb.y + cb.h {
        let start = row as usize * src_stride + cb.x as usize * ch;
        out.extend_from_slice(&src[start..start + dst_stride]);
    }
    Image::new(cb.w, cb.h, image.channels(), out)
}
