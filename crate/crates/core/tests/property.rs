//! Property tests for the raster and accounting invariants.

use proptest::prelude::*;
use vizprep_core::cropper::{content_bbox, CropConfig, Mask};
use vizprep_core::img::{gradient_magnitude, histogram256, resize, to_gray, Channels, Image};
use vizprep_core::quality::quality_score;
use vizprep_core::tokens::{reduction, snap_dims, token_count, TokenStats};

fn arb_gray() -> impl Strategy<Value = Image> {
    (1u32..48, 1u32..48).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), (w * h) as usize)
            .prop_map(move |px| Image::new(w, h, Channels::Gray8, px).unwrap())
    })
}

fn arb_rgb() -> impl Strategy<Value = Image> {
    (1u32..32, 1u32..32).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), (w * h * 3) as usize)
            .prop_map(move |px| Image::new(w, h, Channels::Rgb8, px).unwrap())
    })
}

proptest! {
    #[test]
    fn histogram_counts_sum_to_pixel_count(img in arb_gray()) {
        let hist = histogram256(&img);
        prop_assert_eq!(hist.iter().sum::<u64>(), img.width() as u64 * img.height() as u64);
    }

    #[test]
    fn to_gray_is_idempotent(img in arb_rgb()) {
        let once = to_gray(&img);
        prop_assert_eq!(to_gray(&once), once);
    }

    #[test]
    fn resize_returns_requested_dims(img in arb_gray(), w in 1u32..80, h in 1u32..80) {
        let out = resize(&img, w, h).unwrap();
        prop_assert_eq!((out.width(), out.height()), (w, h));
    }

    #[test]
    fn gradient_of_constant_is_zero(w in 1u32..40, h in 1u32..40, v in any::<u8>()) {
        let gm = gradient_magnitude(&Image::filled(w, h, Channels::Gray8, v));
        prop_assert!(gm.magnitudes.iter().all(|&m| m == 0));
    }

    #[test]
    fn snapped_dims_are_covering_multiples(w in 1u32..5000, h in 1u32..5000, patch in 1u32..128) {
        let (sw, sh) = snap_dims(w, h, patch);
        prop_assert!(sw >= w && sh >= h);
        prop_assert!(sw < w + patch && sh < h + patch);
        prop_assert!(token_count(sw, sh, patch).is_ok());
    }

    #[test]
    fn reduction_of_self_is_zero(w in 1u32..40, h in 1u32..40) {
        let stats = TokenStats::new(w * 16, h * 16, 16).unwrap();
        prop_assert_eq!(reduction(&stats, &stats), 0.0);
    }

    #[test]
    fn bbox_contains_every_true_pixel(
        (w, h, bits) in (1u32..40, 1u32..40).prop_flat_map(|(w, h)| {
            (Just(w), Just(h), prop::collection::vec(prop::bool::weighted(0.08), (w * h) as usize))
        })
    ) {
        let mask = Mask::new(w, h, bits);
        if let Some(cb) = content_bbox(&mask, &CropConfig::default()) {
            prop_assert!(cb.x + cb.w <= w && cb.y + cb.h <= h);
            for y in 0..h {
                for x in 0..w {
                    if mask.get(x, y) {
                        prop_assert!(x >= cb.x && x < cb.x + cb.w);
                        prop_assert!(y >= cb.y && y < cb.y + cb.h);
                    }
                }
            }
        } else {
            prop_assert!(mask.data.iter().all(|&b| !b));
        }
    }

    #[test]
    fn quality_score_is_total_and_bounded(a in arb_gray(), b in arb_gray()) {
        let q = quality_score(&a, &b);
        prop_assert!((0.0..=1.0).contains(&q.value));
    }
}
