//! Resolution tier table: maps a complexity class to the long-side target
//! the adaptive path encodes at.

use crate::analyzer::ComplexityClass;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tier table plus the patch constant used for token accounting.
///
/// Sides are long-side targets for an aspect-preserving resize, not square
/// dimensions. All sides must be positive multiples of `patch` so token grids
/// stay exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolutionPolicy {
    pub low_side: u32,
    pub medium_side: u32,
    pub high_side: u32,
    /// Long side of the static baseline path. Defaults to `high_side`.
    pub baseline_side: u32,
    /// Pixels per visual-token patch side.
    pub patch: u32,
}

impl Default for ResolutionPolicy {
    fn default() -> Self {
        Self { low_side: 512, medium_side: 768, high_side: 1024, baseline_side: 1024, patch: 64 }
    }
}

impl ResolutionPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.patch == 0 {
            return Err(Error::InvalidConfig("patch must be >= 1".into()));
        }
        if !(self.low_side <= self.medium_side && self.medium_side <= self.high_side) {
            return Err(Error::InvalidConfig(
                "tiers must satisfy low_side <= medium_side <= high_side".into(),
            ));
        }
        for (name, side) in [
            ("low_side", self.low_side),
            ("medium_side", self.medium_side),
            ("high_side", self.high_side),
            ("baseline_side", self.baseline_side),
        ] {
            if side == 0 || side % self.patch != 0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {side} must be a positive multiple of patch {}",
                    self.patch
                )));
            }
        }
        Ok(())
    }
}

/// Total, deterministic class-to-tier mapping.
pub fn select_resolution(class: ComplexityClass, policy: &ResolutionPolicy) -> u32 {
    match class {
        ComplexityClass::Low => policy.low_side,
        ComplexityClass::Medium => policy.medium_side,
        ComplexityClass::High => policy.high_side,
    }
}
