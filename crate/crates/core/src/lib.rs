//! Content-aware adaptive preprocessing for patch-based vision encoders.
//!
//! Static preprocessing feeds every image to the encoder at one fixed
//! resolution, so visually simple pages cost as many visual tokens as dense
//! ones. This crate scores each image's complexity from cheap signals (edge
//! density, intensity entropy, a coarse text proxy), picks a resolution tier,
//! crops to the content-bearing region, and pads the result to an exact patch
//! grid. A paired benchmark harness measures the token budget and visual
//! quality of the adaptive path against the static baseline on the same
//! inputs, and a deterministic synthetic document corpus makes the whole
//! evaluation hermetic.
//!
//! The crate never runs a model: it emits standard 8-bit images plus token
//! accounting that any patch-based encoder consumer can interpret.

pub mod analyzer;
pub mod bench;
pub mod corpus;
pub mod cropper;
pub mod error;
pub mod img;
pub mod pipeline;
pub mod policy;
pub mod quality;
pub mod tokens;

pub use error::{Error, Result};
