//! Visual-token accounting: patch-grid token counts for given output
//! dimensions and reductions versus a baseline.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Token accounting for one preprocessed image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStats {
    pub width: u32,
    pub height: u32,
    pub patch: u32,
    pub token_count: u64,
}

impl TokenStats {
    /// Dimensions must already be snapped to the patch grid.
    pub fn new(width: u32, height: u32, patch: u32) -> Result<Self> {
        let token_count = token_count(width, height, patch)?;
        Ok(Self { width, height, patch, token_count })
    }
}

/// Rounds each dimension up to the nearest positive multiple of `patch`.
pub fn snap_dims(w: u32, h: u32, patch: u32) -> (u32, u32) {
    debug_assert!(w >= 1 && h >= 1 && patch >= 1);
    (w.div_ceil(patch) * patch, h.div_ceil(patch) * patch)
}

/// Tokens for a snapped output: `(w / patch) * (h / patch)`.
pub fn token_count(w: u32, h: u32, patch: u32) -> Result<u64> {
    if patch == 0 || !w.is_multiple_of(patch) || !h.is_multiple_of(patch) {
        return Err(Error::UnalignedDims(w, h, patch));
    }
    Ok((w / patch) as u64 * (h / patch) as u64)
}

/// Relative token reduction versus baseline: `1 - adaptive / baseline`.
/// Negative when the adaptive path produced more tokens; never clamped.
pub fn reduction(base: &TokenStats, adapt: &TokenStats) -> f64 {
    debug_assert!(base.token_count >= 1);
    1.0 - adapt.token_count as f64 / base.token_count as f64
}
