//! Line segment detection from edge strength maps.
//!
//! The detector consumes a per-pixel edge probability map (from any edge
//! detector, or the built-in gradient fallback) and produces sub-pixel line
//! segments. The pipeline stages are:
//!
//! 1. **Orientation** — estimate a quantized orientation for every pixel with
//!    positive edge strength by summing edge values over a bank of directional
//!    line windows and taking the direction of maximum response.
//! 2. **Growing** — group pixels into line support regions. In `Poev2` mode the
//!    growth is guided: the candidate line's angle and reference point are
//!    refit from the weighted pixel scatter on a distance schedule. In `Poe`
//!    mode the map is binarized first and the seed's line is kept fixed.
//! 3. **Validation** — accept regions whose weighted size reaches the
//!    a-contrario minimal meaningful size `l_min`; rejected regions release
//!    their pixels back to the pool.
//! 4. **Segments** — convert accepted regions to sub-pixel endpoints by
//!    projecting member pixels onto the fitted line.
//!
//! The crate also ships the evaluation metrics used to score detections
//! (heatmap precision/recall/F^H, AP^H/AR^H sweeps, structural AP) and a
//! synthetic scene generator that renders anti-aliased segments with exact
//! ground truth for end-to-end verification.
//!
//! Coordinate convention: `x` is the column index increasing rightward, `y`
//! the row index increasing downward, origin at the center of the top-left
//! pixel. Angles are measured from the +x axis and reduced to `[0, pi)`.

pub mod edgemap;
pub mod eval;
pub mod growing;
pub mod orientation;
pub mod pipeline;
pub mod segments;
pub mod synth;
pub mod validation;

mod error;

pub use edgemap::EdgeStrengthMap;
pub use error::{Error, Result};
pub use growing::{DetectionParams, Mode, Region};
pub use orientation::{OrientationMap, WindowBank};
pub use pipeline::{detect, DetectionOutput};
pub use segments::LineSegment;
