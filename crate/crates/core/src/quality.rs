//! Visual-fidelity validation: windowed SSIM between the two pipeline
//! outputs, with a mean-absolute-difference fallback for tiny images.

use crate::error::{Error, Result};
use crate::img::{self, Channels, Image};
use serde::{Deserialize, Serialize};

const WINDOW: usize = 8;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualityMethod {
    Ssim,
    FallbackMad,
}

impl std::fmt::Display for QualityMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QualityMethod::Ssim => write!(f, "ssim"),
            QualityMethod::FallbackMad => write!(f, "fallback_mad"),
        }
    }
}

/// Similarity in `[0, 1]` plus the method that produced it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QualityScore {
    pub value: f64,
    pub method: QualityMethod,
}

/// Mean SSIM over non-overlapping 8x8 windows (partial edge windows are
/// dropped). Uses population variance/covariance and the standard
/// `C1 = (0.01 * 255)^2`, `C2 = (0.03 * 255)^2` stabilizers. Raw result lies
/// in `[-1, 1]`; identical inputs give exactly 1.0.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    assert_eq!(a.channels(), Channels::Gray8, "ssim expects Gray8");
    assert_eq!(b.channels(), Channels::Gray8, "ssim expects Gray8");
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(a.width(), a.height(), b.width(), b.height()));
    }
    let (w, h) = (a.width() as usize, a.height() as usize);
    if w < WINDOW || h < WINDOW {
        return Err(Error::TooSmall(a.width(), a.height()));
    }

    let pa = a.pixels();
    let pb = b.pixels();
    let n = (WINDOW * WINDOW) as f64;
    let mut sum = 0.0;
    let mut windows = 0u64;
    let mut wy = 0;
    while wy + WINDOW <= h {
        let mut wx = 0;
        while wx + WINDOW <= w {
            let mut sa = 0u64;
            let mut sb = 0u64;
            let mut saa = 0u64;
            let mut sbb = 0u64;
            let mut sab = 0u64;
            for y in wy..wy + WINDOW {
                let row = y * w + wx;
                for i in row..row + WINDOW {
                    let (x, y) = (pa[i] as u64, pb[i] as u64);
                    sa += x;
                    sb += y;
                    saa += x * x;
                    sbb += y * y;
                    sab += x * y;
                }
            }
            // exact integer numerators keep variance and covariance free of
            // one-pass cancellation error
            let mu_a = sa as f64 / n;
            let mu_b = sb as f64 / n;
            let var_a = (64 * saa - sa * sa) as f64 / (n * n);
            let var_b = (64 * sbb - sb * sb) as f64 / (n * n);
            let cov = (64 * sab) as i64 - (sa * sb) as i64;
            let cov = cov as f64 / (n * n);
            let num = (2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2);
            let den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2);
            sum += num / den;
            windows += 1;
            wx += WINDOW;
        }
        wy += WINDOW;
    }
    Ok(sum / windows as f64)
}

/// Compares the two pipeline outputs in the first image's frame.
///
/// Both inputs are converted to Gray8 and the second is bilinearly resized to
/// the first's dimensions. SSIM is used when the frame is at least 8x8
/// (negative raw values clamp to 0); otherwise the value is
/// `1 - mean_abs_diff / 255`. Total: never errors.
pub fn quality_score(baseline: &Image, adaptive: &Image) -> QualityScore {
    let gb = img::to_gray(baseline);
    let mut ga = img::to_gray(adaptive);
    if ga.width() != gb.width() || ga.height() != gb.height() {
        ga = img::resize(&ga, gb.width(), gb.height()).expect("baseline dims are >= 1");
    }
    if gb.width() >= WINDOW as u32 && gb.height() >= WINDOW as u32 {
        let raw = ssim(&gb, &ga).expect("dims match and are >= 8");
        QualityScore { value: raw.clamp(0.0, 1.0), method: QualityMethod::Ssim }
    } else {
        let total: u64 = gb
            .pixels()
            .iter()
            .zip(ga.pixels())
            .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
            .sum();
        let mad = total as f64 / gb.pixels().len() as f64 / 255.0;
        QualityScore { value: 1.0 - mad, method: QualityMethod::FallbackMad }
    }
}
