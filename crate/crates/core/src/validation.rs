//! A-contrario size validation of line support regions.
//!
//! Under a background noise model, the expected number of false line
//! detections stays below `epsilon` when only regions whose weighted size
//! reaches the minimal meaningful size
//! `l_min = (ln(epsilon) - ln(N_L)) / ln(p)` are kept, where `N_L` is the
//! number of candidate lines in the image and `p` the probability that a
//! random pixel matches a line's quantized angle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growing::Region;

/// Validation inputs for one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationContext {
    pub epsilon: f64,
    /// Candidate line count `N_L = sqrt((M*N)^5)` for an `M x N` image.
    pub candidate_lines: f64,
    /// Probability that a pixel's quantized angle matches a line's.
    pub angle_match_prob: f64,
    /// Minimal meaningful region size.
    pub l_min: f64,
}

impl ValidationContext {
    pub fn for_image(width: usize, height: usize, epsilon: f64, p: f64) -> Result<Self> {
        let l_min = compute_l_min(width, height, epsilon, p)?;
        Ok(Self {
            epsilon,
            candidate_lines: candidate_line_count(width, height),
            angle_match_prob: p,
            l_min,
        })
    }
}

fn candidate_line_count(width: usize, height: usize) -> f64 {
    ((width * height) as f64).powf(2.5)
}

/// Minimal meaningful region size `(ln(epsilon) - ln(N_L)) / ln(p)`.
///
/// Natural logarithms; the ratio is base-invariant.
pub fn compute_l_min(width: usize, height: usize, epsilon: f64, p: f64) -> Result<f64> {
    if width == 0 || height == 0 {
        return Err(Error::Param("image dimensions must be >= 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Param(format!(
            "angle match probability {p} outside (0, 1)"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Param("epsilon must be positive".into()));
    }
    let n_l = candidate_line_count(width, height);
    Ok((epsilon.ln() - n_l.ln()) / p.ln())
}

/// Probability that a pixel's quantized angle falls within `tau` of a line's:
/// the fraction of the `P` direction classes inside the tolerance.
///
/// With the defaults (`P = 16`, `tau = pi/16`) the seed's class and its two
/// neighbors match, giving `3/16`.
pub fn angle_match_probability(directions: u32, tau: f64) -> f64 {
    let p = f64::from(directions);
    let within = (tau * p / std::f64::consts::PI + 1e-9).floor();
    ((2.0 * within + 1.0) / p).min(1.0)
}

/// Contribution of one pixel to the region size: probabilities at or above
/// 0.3 count fully, smaller ones count their own value.
pub fn pixel_weight(p: f64) -> f64 {
    if p >= 0.3 {
        1.0
    } else {
        p
    }
}

/// Weighted region size `l_region`. With unit weights (`Poe` mode) this is
/// exactly the pixel count.
pub fn region_size(region: &Region) -> f64 {
    region.pixels.iter().map(|p| pixel_weight(p.weight)).sum()
}

/// Splits regions into (accepted, rejected) by `l_region >= l_min`.
/// Rejected regions are returned so callers can release their pixels.
pub fn validate(regions: Vec<Region>, ctx: &ValidationContext) -> (Vec<Region>, Vec<Region>) {
    regions
        .into_iter()
        .partition(|r| region_size(r) >= ctx.l_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growing::RegionPixel;
    use std::f64::consts::PI;

    fn region_with_weights(weights: &[f64]) -> Region {
        Region {
            pixels: weights
                .iter()
                .enumerate()
                .map(|(i, &w)| RegionPixel {
                    x: i as u32,
                    y: 0,
                    weight: w,
                })
                .collect(),
            seed: (0, 0),
            seed_angle_index: 0,
            seed_angle: 0.0,
            ref_point: (0.0, 0.0),
            line_angle: 0.0,
            idx: 1,
            dist_r: 10.0,
            fit_trace: Vec::new(),
        }
    }

    #[test]
    fn l_min_matches_frozen_oracle() {
        // 2.5 * ln(512^2) / ln(16/3), evaluated with a 40-digit calculator.
        let got = compute_l_min(512, 512, 1.0, 3.0 / 16.0).unwrap();
        assert!((got - 18.633251042038678).abs() < 1e-9, "{got}");
    }

    #[test]
    fn l_min_vanishes_when_epsilon_reaches_candidate_count() {
        let n_l = (512.0f64 * 512.0).powf(2.5);
        let got = compute_l_min(512, 512, n_l, 3.0 / 16.0).unwrap();
        assert!(got.abs() < 1e-9);
    }

    #[test]
    fn doubling_both_dimensions_adds_frozen_delta() {
        // 5 * ln(2) / ln(16/3), evaluated with a 40-digit calculator.
        let a = compute_l_min(512, 512, 1.0, 3.0 / 16.0).unwrap();
        let b = compute_l_min(1024, 1024, 1.0, 3.0 / 16.0).unwrap();
        assert!((b - a - 2.0703612268931865).abs() < 1e-9);
    }

    #[test]
    fn l_min_monotone_in_area_and_epsilon() {
        let base = compute_l_min(100, 100, 1.0, 3.0 / 16.0).unwrap();
        assert!(compute_l_min(100, 101, 1.0, 3.0 / 16.0).unwrap() > base);
        assert!(compute_l_min(100, 100, 2.0, 3.0 / 16.0).unwrap() < base);
    }

    #[test]
    fn l_min_rejects_bad_probability() {
        assert!(compute_l_min(10, 10, 1.0, 0.0).is_err());
        assert!(compute_l_min(10, 10, 1.0, 1.0).is_err());
        assert!(compute_l_min(0, 10, 1.0, 0.5).is_err());
    }

    #[test]
    fn default_angle_match_probability_is_three_sixteenths() {
        assert_eq!(angle_match_probability(16, PI / 16.0), 3.0 / 16.0);
        assert_eq!(angle_match_probability(16, PI / 32.0), 1.0 / 16.0);
        assert_eq!(angle_match_probability(16, PI / 8.0), 5.0 / 16.0);
    }

    #[test]
    fn eq10_weighting_boundary() {
        let r = region_with_weights(&[0.5, 0.3, 0.29]);
        assert_eq!(region_size(&r), 2.29);
        let r = region_with_weights(&[1.0; 7]);
        assert_eq!(region_size(&r), 7.0);
        let r = region_with_weights(&[1e-9, 1e-9]);
        assert!(region_size(&r) < 1e-8);
    }

    #[test]
    fn region_size_monotone_under_pixel_addition() {
        let mut weights = vec![0.4, 0.2];
        let before = region_size(&region_with_weights(&weights));
        weights.push(0.01);
        assert!(region_size(&region_with_weights(&weights)) >= before);
    }

    #[test]
    fn validate_is_inclusive_at_the_threshold() {
        let ctx = ValidationContext {
            epsilon: 1.0,
            candidate_lines: 1.0,
            angle_match_prob: 3.0 / 16.0,
            l_min: 3.0,
        };
        let exact = region_with_weights(&[1.0, 1.0, 1.0]);
        let small = region_with_weights(&[1.0, 1.0]);
        let (acc, rej) = validate(vec![exact, small], &ctx);
        assert_eq!(acc.len(), 1);
        assert_eq!(acc[0].pixels.len(), 3);
        assert_eq!(rej.len(), 1);

        let (acc, rej) = validate(Vec::new(), &ctx);
        assert!(acc.is_empty() && rej.is_empty());
    }

    #[test]
    fn single_pixel_region_rejected_at_512() {
        let ctx = ValidationContext::for_image(512, 512, 1.0, 3.0 / 16.0).unwrap();
        let r = region_with_weights(&[1.0]);
        let (acc, rej) = validate(vec![r], &ctx);
        assert!(acc.is_empty());
        assert_eq!(rej.len(), 1);
    }
}
