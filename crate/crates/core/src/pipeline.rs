//! End-to-end detection: orientation, growing, validation, endpoints.

use crate::error::Result;
use crate::growing::{grow_regions, DetectionParams, Mode, Region};
use crate::orientation::{estimate_orientation, WindowBank};
use crate::segments::{extract_endpoints, LineSegment};
use crate::validation::{angle_match_probability, ValidationContext};
use crate::EdgeStrengthMap;

/// Detection result: segments plus the accepted support regions (kept for
/// debug dumps and audits) and the size threshold that was applied.
#[derive(Debug, Clone)]
pub struct DetectionOutput {
    pub segments: Vec<LineSegment>,
    pub regions: Vec<Region>,
    pub l_min: f64,
}

/// Runs the full detector on an edge strength map.
///
/// `Poe` mode binarizes at `lambda` and estimates orientations on the binary
/// map; `Poev2` works on the raw strengths directly. Regions whose endpoint
/// extraction degenerates (all pixels projecting to one point) are dropped
/// together with their segment.
pub fn detect(map: &EdgeStrengthMap, params: &DetectionParams) -> Result<DetectionOutput> {
    params.validate()?;
    let binarized;
    let work = match params.mode {
        Mode::Poe => {
            binarized = map.binarize(params.lambda)?;
            &binarized
        }
        Mode::Poev2 => map,
    };
    let bank = WindowBank::new(params.half_width, params.directions)?;
    let orient = estimate_orientation(work, &bank);
    let grown = grow_regions(work, &orient, params)?;

    let mut segments = Vec::with_capacity(grown.len());
    let mut regions = Vec::with_capacity(grown.len());
    for region in grown {
        if let Ok(seg) = extract_endpoints(&region) {
            segments.push(seg);
            regions.push(region);
        }
    }
    let p = angle_match_probability(params.directions, params.tau);
    let ctx = ValidationContext::for_image(map.width(), map.height(), params.epsilon, p)?;
    Ok(DetectionOutput {
        segments,
        regions,
        l_min: ctx.l_min,
    })
}
