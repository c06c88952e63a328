//! The two end-to-end preprocessing paths.
//!
//! Baseline: aspect-preserving resize of every image to a fixed long side
//! (upscaling permitted), then white padding to the patch grid. Adaptive:
//! complexity analysis picks a resolution tier, content-aware cropping trims
//! background, the crop is resized to the tier without ever upscaling, and the
//! result is padded to the patch grid. Both paths are pure functions of their
//! inputs.

use crate::analyzer::{analyze, AnalyzerConfig, ComplexityReport};
use crate::cropper::{content_bbox, content_mask, crop, CropBox, CropConfig};
use crate::img::{self, Image};
use crate::policy::{select_resolution, ResolutionPolicy};
use crate::tokens::{self, TokenStats};
use serde::{Deserialize, Serialize};

/// Full configuration for one pipeline run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub analyzer: AnalyzerConfig,
    pub policy: ResolutionPolicy,
    pub crop: CropConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> crate::Result<()> {
        self.analyzer.clone().normalized()?;
        self.policy.validate()?;
        self.crop.validate()
    }
}

/// Region the adaptive path encoded: either the whole frame or a crop box in
/// original-image coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CropRegion {
    FullFrame,
    Cropped(CropBox),
}

/// Audit record of every decision the adaptive path made for one image.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreprocessPlan {
    pub complexity: ComplexityReport,
    pub crop_box: CropRegion,
    /// Long-side tier selected for the complexity class.
    pub target_side: u32,
    /// Final dimensions after snap padding.
    pub output_dims: (u32, u32),
    pub predicted_tokens: u64,
}

/// Aspect-preserving fit of `(w, h)` so the long side equals `target_long`.
/// With `allow_upscale` false, images already at or below the target keep
/// their native size. The short side rounds to nearest, floored at 1.
pub fn fit_long_side(w: u32, h: u32, target_long: u32, allow_upscale: bool) -> (u32, u32) {
    let long = w.max(h);
    if long == target_long || (!allow_upscale && long <= target_long) {
        return (w, h);
    }
    let scale = target_long as f64 / long as f64;
    if w >= h {
        (target_long, ((h as f64 * scale).round() as u32).max(1))
    } else {
        (((w as f64 * scale).round() as u32).max(1), target_long)
    }
}

/// Pads to the patch grid with white, content centered. Padding splits evenly
/// per axis with the extra pixel on the trailing side.
pub fn pad_to_patch(image: Image, patch: u32) -> Image {
    let (tw, th) = tokens::snap_dims(image.width(), image.height(), patch);
    if tw == image.width() && th == image.height() {
        return image;
    }
    let ch = image.channels().count();
    let ox = ((tw - image.width()) / 2) as usize;
    let oy = ((th - image.height()) / 2) as usize;
    let mut canvas = Image::filled(tw, th, image.channels(), 255);
    let dst_stride = tw as usize * ch;
    let src_stride = image.width() as usize * ch;
    for y in 0..image.height() as usize {
        let dst = (y + oy) * dst_stride + ox * ch;
        let src = y * src_stride;
        canvas.pixels_mut()[dst..dst + src_stride]
            .copy_from_slice(&image.pixels()[src..src + src_stride]);
    }
    canvas
}

/// Static path: resize to the baseline long side regardless of content
/// (upscaling permitted), then snap-pad.
pub fn baseline_preprocess(image: &Image, policy: &ResolutionPolicy) -> (Image, TokenStats) {
    let (w, h) = fit_long_side(image.width(), image.height(), policy.baseline_side, true);
    let resized = img::resize(image, w, h).expect("fit dims are >= 1");
    let out = pad_to_patch(resized, policy.patch);
    let stats = TokenStats::new(out.width(), out.height(), policy.patch).expect("snapped dims");
    (out, stats)
}

/// Adaptive path: analyze, pick a tier, crop to content (falling back to the
/// full frame when nothing is detected), resize without upscaling, snap-pad.
pub fn adaptive_preprocess(image: &Image, cfg: &PipelineConfig) -> (Image, PreprocessPlan) {
    let report = analyze(image, &cfg.analyzer);
    let target_side = select_resolution(report.class, &cfg.policy);

    let (region, working) = if cfg.crop.enabled {
        let gray = img::to_gray(image);
        let mask = content_mask(&gray, &cfg.crop);
        match content_bbox(&mask, &cfg.crop) {
            Some(cb) => {
                let cropped = crop(image, &cb).expect("bbox is clamped to the frame");
                (CropRegion::Cropped(cb), cropped)
            }
            None => (CropRegion::FullFrame, image.clone()),
        }
    } else {
        (CropRegion::FullFrame, image.clone())
    };

    let (w, h) = fit_long_side(working.width(), working.height(), target_side, false);
    let resized = img::resize(&working, w, h).expect("fit dims are >= 1");
    let out = pad_to_patch(resized, cfg.policy.patch);
    let predicted_tokens =
        tokens::token_count(out.width(), out.height(), cfg.policy.patch).expect("snapped dims");

    let plan = PreprocessPlan {
        complexity: report,
        crop_box: region,
        target_side,
        output_dims: (out.width(), out.height()),
        predicted_tokens,
    };
    (out, plan)
}

/// Re-projects an adaptive output into the baseline output's frame so the two
/// can be compared window for window: the padded content is extracted,
/// resized back to the crop box's footprint at baseline scale, and pasted at
/// the box position on a white canvas with the baseline output's dimensions.
/// Regions the crop discarded read as white, the document background.
pub fn reconstruct_in_baseline_frame(
    adaptive_out: &Image,
    plan: &PreprocessPlan,
    original_w: u32,
    original_h: u32,
    policy: &ResolutionPolicy,
) -> Image {
    let (bw, bh) = fit_long_side(original_w, original_h, policy.baseline_side, true);
    let (sbw, sbh) = tokens::snap_dims(bw, bh, policy.patch);
    let off_bx = (sbw - bw) / 2;
    let off_by = (sbh - bh) / 2;

    let cb = match plan.crop_box {
        CropRegion::FullFrame => CropBox { x: 0, y: 0, w: original_w, h: original_h },
        CropRegion::Cropped(b) => b,
    };
    let (cw, ch) = fit_long_side(cb.w, cb.h, plan.target_side, false);
    let off_ax = (adaptive_out.width() - cw) / 2;
    let off_ay = (adaptive_out.height() - ch) / 2;
    let content = crop(adaptive_out, &CropBox { x: off_ax, y: off_ay, w: cw, h: ch })
        .expect("content lies inside the padded output");

    let sx = bw as f64 / original_w as f64;
    let sy = bh as f64 / original_h as f64;
    let rx = ((cb.x as f64 * sx).round() as u32).min(bw - 1);
    let ry = ((cb.y as f64 * sy).round() as u32).min(bh - 1);
    let rw = ((cb.w as f64 * sx).round() as u32).clamp(1, bw - rx);
    let rh = ((cb.h as f64 * sy).round() as u32).clamp(1, bh - ry);
    let placed = img::resize(&content, rw, rh).expect("footprint dims are >= 1");

    let mut canvas = Image::filled(sbw, sbh, adaptive_out.channels(), 255);
    let chn = canvas.channels().count();
    let dst_stride = sbw as usize * chn;
    let src_stride = rw as usize * chn;
    for y in 0..rh as usize {
        let dst = (y + (off_by + ry) as usize) * dst_stride + (off_bx + rx) as usize * chn;
        let src = y * src_stride;
        canvas.pixels_mut()[dst..dst + src_stride]
            .copy_from_slice(&placed.pixels()[src..src + src_stride]);
    }
    canvas
}
