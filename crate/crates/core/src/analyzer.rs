//! Complexity analysis: edge density, intensity entropy, and a coarse
//! text-density proxy, fused into a normalized score in `[0, 1]` and
//! classified into low / medium / high complexity.
//!
//! Analysis runs on a copy whose long side is at most
//! [`AnalyzerConfig::analysis_side`] pixels, so its cost is independent of the
//! input resolution.

use crate::error::{Error, Result};
use crate::img::{self, GradientMap, Image};
use serde::{Deserialize, Serialize};

/// Tuning knobs for the complexity signals and their fusion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyzerConfig {
    /// Gradient magnitude at or above which a pixel counts as an edge pixel.
    pub grad_threshold: u8,
    pub weight_edge: f64,
    pub weight_entropy: f64,
    pub weight_text: f64,
    /// Edge density at which the normalized edge signal saturates to 1.
    pub edge_density_ref: f64,
    /// Long side the image is downscaled to before analysis (never upscaled).
    pub analysis_side: u32,
    /// Scores strictly below this classify as Low.
    pub t_low: f64,
    /// Scores strictly above this classify as High.
    pub t_high: f64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            grad_threshold: 32,
            weight_edge: 0.45,
            weight_entropy: 0.45,
            weight_text: 0.10,
            edge_density_ref: 0.20,
            analysis_side: 512,
            t_low: 0.25,
            t_high: 0.60,
        }
    }
}

impl AnalyzerConfig {
    /// Validates ranges and rescales the three weights to sum to 1.
    pub fn normalized(mut self) -> Result<Self> {
        if self.grad_threshold == 0 {
            return Err(Error::InvalidConfig("grad_threshold must be in [1, 255]".into()));
        }
        if self.weight_edge < 0.0 || self.weight_entropy < 0.0 || self.weight_text < 0.0 {
            return Err(Error::InvalidConfig("weights must be >= 0".into()));
        }
        let sum = self.weight_edge + self.weight_entropy + self.weight_text;
        if sum <= 0.0 {
            return Err(Error::InvalidConfig("at least one weight must be positive".into()));
        }
        self.weight_edge /= sum;
        self.weight_entropy /= sum;
        self.weight_text /= sum;
        if !(self.edge_density_ref > 0.0 && self.edge_density_ref <= 1.0) {
            return Err(Error::InvalidConfig("edge_density_ref must be in (0, 1]".into()));
        }
        if self.analysis_side == 0 {
            return Err(Error::InvalidConfig("analysis_side must be >= 1".into()));
        }
        if !(0.0 < self.t_low && self.t_low < self.t_high && self.t_high < 1.0) {
            return Err(Error::InvalidConfig("need 0 < t_low < t_high < 1".into()));
        }
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComplexityClass {
    Low,
    Medium,
    High,
}

impl std::fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComplexityClass::Low => write!(f, "Low"),
            ComplexityClass::Medium => write!(f, "Medium"),
            ComplexityClass::High => write!(f, "High"),
        }
    }
}

/// Per-image complexity signals plus the fused score and class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityReport {
    /// Fraction of pixels whose gradient magnitude reaches the threshold.
    pub edge_density: f64,
    /// Shannon entropy of the 256-bin intensity histogram, in `[0, 8]` bits.
    pub entropy_bits: f64,
    /// Fraction of rows with text-like intensity transitions.
    pub text_density: f64,
    /// Convex combination of the three normalized signals, in `[0, 1]`.
    pub score: f64,
    pub class: ComplexityClass,
}

/// Fraction of pixels with `magnitude >= grad_threshold`.
pub fn edge_density(gm: &GradientMap, grad_threshold: u8) -> f64 {
    let total = gm.magnitudes.len();
    if total == 0 {
        return 0.0;
    }
    let hits = gm.magnitudes.iter().filter(|&&m| m >= grad_threshold).count();
    hits as f64 / total as f64
}

/// Shannon entropy of a 256-bin histogram, in bits.
pub fn entropy_bits(hist: &[u64; 256]) -> Result<f64> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total = total as f64;
    let mut acc = 0.0;
    for &count in hist {
        if count > 0 {
            let p = count as f64 / total;
            acc += p * p.log2();
        }
    }
    Ok(-acc)
}

/// Otsu's threshold over a 256-bin histogram: the split that maximizes
/// between-class variance. Ties resolve to the smallest threshold.
pub fn otsu_threshold(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0;
    }
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();
    let mut w0 = 0u64;
    let mut sum0 = 0.0;
    let mut best = (f64::NEG_INFINITY, 0u8);
    for (t, &count) in hist.iter().enumerate() {
        w0 += count;
        if w0 == 0 {
            continue;
        }
        let w1 = total - w0;
        if w1 == 0 {
            break;
        }
        sum0 += t as f64 * count as f64;
        let mu0 = sum0 / w0 as f64;
        let mu1 = (sum_all - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (mu0 - mu1) * (mu0 - mu1);
        if between > best.0 {
            best = (between, t as u8);
        }
    }
    best.1
}

/// Coarse text proxy: binarize at the Otsu threshold, then call a row
/// text-like when it has at least `max(4, width / 50)` dark/light
/// transitions. Returns text-like rows over total rows.
pub fn text_density(gray: &Image) -> f64 {
    assert_eq!(gray.channels(), crate::img::Channels::Gray8, "text_density expects Gray8");
    let w = gray.width();
    let h = gray.height();
    let threshold = otsu_threshold(&img::histogram256(gray));
    let floor = 4.max(w / 50);
    let mut text_rows = 0u32;
    for y in 0..h {
        let mut transitions = 0u32;
        let mut prev_dark = gray.gray_at(0, y) <= threshold;
        for x in 1..w {
            let dark = gray.gray_at(x, y) <= threshold;
            if dark != prev_dark {
                transitions += 1;
                prev_dark = dark;
            }
        }
        if transitions >= floor {
            text_rows += 1;
        }
    }
    text_rows as f64 / h as f64
}

/// Pure classification of a fused score against the two thresholds.
/// Both boundary values fall in the closed Medium interval.
pub fn classify(score: f64, t_low: f64, t_high: f64) -> ComplexityClass {
    if score < t_low {
        ComplexityClass::Low
    } else if score > t_high {
        ComplexityClass::High
    } else {
        ComplexityClass::Medium
    }
}

/// Computes the three complexity signals on an analysis-sized grayscale copy
/// and fuses them into a classified report.
pub fn analyze(image: &Image, cfg: &AnalyzerConfig) -> ComplexityReport {
    let long = image.width().max(image.height());
    let scaled;
    let view = if long > cfg.analysis_side {
        let (w, h) = crate::pipeline::fit_long_side(image.width(), image.height(), cfg.analysis_side, false);
        scaled = img::resize(image, w, h).expect("analysis dims are >= 1");
        &scaled
    } else {
        image
    };
    let gray = img::to_gray(view);
    let gm = img::gradient_magnitude(&gray);
    let edge = edge_density(&gm, cfg.grad_threshold);
    let entropy = entropy_bits(&img::histogram256(&gray)).expect("image has pixels");
    let text = text_density(&gray);

    let wsum = cfg.weight_edge + cfg.weight_entropy + cfg.weight_text;
    let edge_norm = (edge / cfg.edge_density_ref).min(1.0);
    let score = (cfg.weight_edge * edge_norm
        + cfg.weight_entropy * (entropy / 8.0)
        + cfg.weight_text * text)
        / wsum;
    let score = score.clamp(0.0, 1.0);

    ComplexityReport {
        edge_density: edge,
        entropy_bits: entropy,
        text_density: text,
        score,
        class: classify(score, cfg.t_low, cfg.t_high),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::img::Channels;

    #[test]
    fn edge_density_zero_map() {
        let gm = img::gradient_magnitude(&Image::filled(10, 10, Channels::Gray8, 50));
        assert_eq!(edge_density(&gm, 32), 0.0);
    }

    #[test]
    fn edge_density_saturated() {
        let gm = GradientMap { width: 4, height: 4, magnitudes: vec![255; 16] };
        assert_eq!(edge_density(&gm, 32), 1.0);
    }

    #[test]
    fn edge_density_counts_exactly() {
        // 10x10 map with 23 pixels at or above the threshold
        let mut mags = vec![0u8; 100];
        for m in mags.iter_mut().take(23) {
            *m = 32;
        }
        let gm = GradientMap { width: 10, height: 10, magnitudes: mags };
        let brute = gm.magnitudes.iter().filter(|&&m| m >= 32).count() as f64 / 100.0;
        assert_eq!(edge_density(&gm, 32), brute);
        assert_eq!(edge_density(&gm, 32), 0.23);
    }

    #[test]
    fn entropy_degenerate_and_uniform() {
        let mut hist = [0u64; 256];
        hist[9] = 400;
        assert_eq!(entropy_bits(&hist).unwrap(), 0.0);

        let mut two = [0u64; 256];
        two[0] = 7;
        two[255] = 7;
        assert_eq!(entropy_bits(&two).unwrap(), 1.0);

        let uniform = [4u64; 256];
        assert_eq!(entropy_bits(&uniform).unwrap(), 8.0);
    }

    #[test]
    fn entropy_rejects_empty() {
        assert!(matches!(entropy_bits(&[0u64; 256]), Err(Error::EmptyHistogram)));
    }

    #[test]
    fn text_density_constant_is_zero() {
        assert_eq!(text_density(&Image::filled(100, 40, Channels::Gray8, 128)), 0.0);
    }

    #[test]
    fn text_density_vertical_stripes_is_one() {
        // alternating 4-px black/white vertical stripes: every row crosses
        // width/8 stripe pairs, far above the max(4, w/50) floor
        let w = 200;
        let h = 40;
        let mut img = Image::filled(w, h, Channels::Gray8, 255);
        for y in 0..h {
            for x in 0..w {
                if (x / 4) % 2 == 0 {
                    img.pixels_mut()[(y * w + x) as usize] = 0;
                }
            }
        }
        // independent row scan against the definition
        let threshold = otsu_threshold(&img::histogram256(&img));
        let floor = 4.max(w / 50);
        for y in 0..h {
            let mut n = 0;
            for x in 1..w {
                if (img.gray_at(x, y) <= threshold) != (img.gray_at(x - 1, y) <= threshold) {
                    n += 1;
                }
            }
            assert!(n >= floor, "row {y} has {n} transitions, floor {floor}");
        }
        assert_eq!(text_density(&img), 1.0);
    }

    #[test]
    fn text_density_half_striped() {
        let w = 100;
        let h = 40;
        let mut img = Image::filled(w, h, Channels::Gray8, 255);
        for y in 0..h / 2 {
            for x in 0..w {
                if (x / 4) % 2 == 0 {
                    img.pixels_mut()[(y * w + x) as usize] = 0;
                }
            }
        }
        assert_eq!(text_density(&img), 0.5);
    }

    #[test]
    fn classify_boundaries_are_medium() {
        assert_eq!(classify(0.25, 0.25, 0.60), ComplexityClass::Medium);
        assert_eq!(classify(0.60, 0.25, 0.60), ComplexityClass::Medium);
        assert_eq!(classify(0.2499, 0.25, 0.60), ComplexityClass::Low);
        assert_eq!(classify(0.6001, 0.25, 0.60), ComplexityClass::High);
    }

    #[test]
    fn analyze_constant_white_floor() {
        let img = Image::filled(1024, 1024, Channels::Gray8, 255);
        let r = analyze(&img, &AnalyzerConfig::default());
        assert_eq!(r.edge_density, 0.0);
        assert_eq!(r.entropy_bits, 0.0);
        assert_eq!(r.text_density, 0.0);
        assert_eq!(r.score, 0.0);
        assert_eq!(r.class, ComplexityClass::Low);
    }

    #[test]
    fn analyze_1x1_is_low() {
        let img = Image::filled(1, 1, Channels::Rgb8, 13);
        let r = analyze(&img, &AnalyzerConfig::default());
        assert_eq!(r.score, 0.0);
        assert_eq!(r.class, ComplexityClass::Low);
    }

    #[test]
    fn normalized_rescales_weights() {
        let cfg = AnalyzerConfig { weight_edge: 2.0, weight_entropy: 1.0, weight_text: 1.0, ..AnalyzerConfig::default() }
            .normalized()
            .unwrap();
        let sum = cfg.weight_edge + cfg.weight_entropy + cfg.weight_text;
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((cfg.weight_edge - 0.5).abs() < 1e-12);
    }

    #[test]
    fn normalized_rejects_bad_thresholds() {
        let cfg = AnalyzerConfig { t_low: 0.7, t_high: 0.6, ..AnalyzerConfig::default() };
        assert!(cfg.normalized().is_err());
    }

    #[test]
    fn score_stays_in_unit_interval() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let cfg = AnalyzerConfig::default();
        for _ in 0..30 {
            let w = rng.gen_range(1..80);
            let h = rng.gen_range(1..80);
            let mut img = Image::filled(w, h, Channels::Gray8, 0);
            rng.fill(img.pixels_mut());
            let r = analyze(&img, &cfg);
            assert!((0.0..=1.0).contains(&r.score), "score {} out of range", r.score);
            assert!((0.0..=8.0).contains(&r.entropy_bits));
            assert!((0.0..=1.0).contains(&r.edge_density));
            assert!((0.0..=1.0).contains(&r.text_density));
        }
    }
}
