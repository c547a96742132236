//! Line support region growing.
//!
//! Pixels are grouped into regions that support one candidate line segment.
//! A region starts from a seed pixel (strength above `lambda`) and absorbs
//! unused neighbors from the `s x s` neighborhoods of its members when they
//! match the seed's orientation up to `tau` and lie within `line_width` of
//! the region's current line.
//!
//! In [`Mode::Poev2`] the line is *guided*: whenever a newly added pixel is
//! farther than `dist_r` from the reference point, the reference point moves
//! to the weighted centroid and the angle to the first inertia axis of the
//! weighted pixel scatter, and the schedule distance grows by one step. In
//! [`Mode::Poe`] the map is binarized at `lambda` first and the seed's line
//! is kept fixed for the whole growth.
//!
//! Regions are validated inline against the a-contrario size threshold:
//! rejected regions release their pixels for later growths, but their seeds
//! are permanently disqualified from seeding again (restarting the identical
//! growth would loop forever).

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orientation::{normalize_angle, OrientationMap};
use crate::validation::{angle_match_probability, region_size, ValidationContext};
use crate::EdgeStrengthMap;

/// Guard against last-ulp rounding when comparing quantized angle gaps
/// with the tolerance.
const ANGLE_EPS: f64 = 1e-12;

/// Detection flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Baseline: binarize at `lambda`, unit weights, fixed seed line.
    Poe,
    /// Guided growing on the raw strength map; `lambda` gates only seeding.
    #[default]
    Poev2,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poe" => Ok(Mode::Poe),
            "poev2" => Ok(Mode::Poev2),
            other => Err(Error::Param(format!(
                "unknown mode {other:?} (expected poe or poev2)"
            ))),
        }
    }
}

/// All detector tunables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionParams {
    /// Seed threshold in `[0, 1]`; in `Poe` mode also the binarization level.
    pub lambda: f64,
    /// Window half-width `W` for orientation estimation.
    pub half_width: u32,
    /// Number of quantized directions `P`.
    pub directions: u32,
    /// Angle tolerance in radians for joining a region.
    pub tau: f64,
    /// Maximum point-to-line distance for region membership, in pixels.
    pub line_width: f64,
    /// Search neighborhood side `s` (odd, >= 3).
    pub search: u32,
    /// Allowed number of false detections for the size threshold.
    pub epsilon: f64,
    pub mode: Mode,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            half_width: 7,
            directions: 16,
            tau: PI / 16.0,
            line_width: 3.0,
            search: 5,
            epsilon: 1.0,
            mode: Mode::Poev2,
        }
    }
}

impl DetectionParams {
    /// Profile for generic line segment detection: low seed threshold,
    /// 5x5 search neighborhood.
    pub fn generic() -> Self {
        Self::default()
    }

    /// Profile for wireframe (scene structure) detection: high seed
    /// threshold, 3x3 search neighborhood.
    pub fn wireframe() -> Self {
        Self {
            lambda: 0.8,
            search: 3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Param(format!("lambda {} outside [0, 1]", self.lambda)));
        }
        if self.half_width < 1 {
            return Err(Error::Param("window half-width must be >= 1".into()));
        }
        if self.directions < 2 {
            return Err(Error::Param("direction count must be >= 2".into()));
        }
        if !(self.tau > 0.0 && self.tau < PI / 2.0) {
            return Err(Error::Param(format!(
                "angle tolerance {} outside (0, pi/2)",
                self.tau
            )));
        }
        if !(self.line_width > 0.0) {
            return Err(Error::Param("line width must be positive".into()));
        }
        if self.search < 3 || self.search % 2 == 0 {
            return Err(Error::Param(format!(
                "search neighborhood side must be odd and >= 3, got {}",
                self.search
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Param("epsilon must be positive".into()));
        }
        if angle_match_probability(self.directions, self.tau) >= 1.0 {
            return Err(Error::Param(
                "angle tolerance admits every direction; validation is meaningless".into(),
            ));
        }
        Ok(())
    }
}

/// A member pixel with its edge probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPixel {
    pub x: u32,
    pub y: u32,
    /// Edge probability at insertion (1.0 for every pixel in `Poe` mode).
    pub weight: f64,
}

/// Probability-weighted second central moments of a pixel set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterMoments {
    pub mxx: f64,
    pub myy: f64,
    pub mxy: f64,
}

impl ScatterMoments {
    /// Angle of the first inertia axis (the direction of maximal spread,
    /// i.e. the eigenvector of the largest eigenvalue), in `[0, pi)`.
    pub fn principal_angle(&self) -> f64 {
        normalize_angle(0.5 * (2.0 * self.mxy).atan2(self.mxx - self.myy))
    }
}

/// Weighted centroid and line angle fitted to a pixel set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub center: (f64, f64),
    pub angle: f64,
    pub moments: ScatterMoments,
}

/// One reference-point/angle update during guided growth, for audit replay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitUpdate {
    /// Index into `Region::pixels` of the insertion that triggered the update.
    pub after_pixel: usize,
    pub ref_point: (f64, f64),
    pub line_angle: f64,
    pub dist_r: f64,
}

/// A line support region. `pixels` is in insertion order and `fit_trace`
/// records every guided update, so the membership constraints can be replayed
/// exactly as they were evaluated during growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub pixels: Vec<RegionPixel>,
    pub seed: (u32, u32),
    pub seed_angle_index: u16,
    pub seed_angle: f64,
    pub ref_point: (f64, f64),
    pub line_angle: f64,
    /// Update counter: 1 initially, +1 per guided refit.
    pub idx: u32,
    pub dist_r: f64,
    pub fit_trace: Vec<FitUpdate>,
}

/// Distance from `pixel` to the line through `reference` at angle `theta`:
/// `|-(x1-x0)*sin(theta) + (y1-y0)*cos(theta)|`.
pub fn point_line_distance(pixel: (f64, f64), reference: (f64, f64), theta: f64) -> f64 {
    let (sin_t, cos_t) = theta.sin_cos();
    (-(pixel.0 - reference.0) * sin_t + (pixel.1 - reference.1) * cos_t).abs()
}

/// Refit schedule distance: `idx * line_width / sin(3*pi/(2*P))`.
///
/// `3*pi/(2*P)` bounds the gap between the seed's quantized angle and the
/// true line angle (half a quantization step plus the tolerance `pi/P`), so
/// the ratio is how far growth can run along the line before drifting more
/// than `line_width` off it.
pub fn dist_r_schedule(idx: u32, line_width: f64, directions: u32) -> f64 {
    f64::from(idx) * line_width / (3.0 * PI / (2.0 * f64::from(directions))).sin()
}

/// Fits the weighted centroid and first inertia axis to a pixel set.
///
/// Needs at least two pixels and positive total weight; with fewer the line
/// direction is undefined and callers keep their previous fit.
pub fn fit_region(pixels: &[RegionPixel]) -> Result<LineFit> {
    if pixels.len() < 2 {
        return Err(Error::Degenerate(format!(
            "line fit needs >= 2 pixels, got {}",
            pixels.len()
        )));
    }
    let total: f64 = pixels.iter().map(|p| p.weight).sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("zero total weight".into()));
    }
    let cx = pixels.iter().map(|p| p.weight * f64::from(p.x)).sum::<f64>() / total;
    let cy = pixels.iter().map(|p| p.weight * f64::from(p.y)).sum::<f64>() / total;
    let mut mxx = 0.0;
    let mut myy = 0.0;
    let mut mxy = 0.0;
    for p in pixels {
        let dx = f64::from(p.x) - cx;
        let dy = f64::from(p.y) - cy;
        mxx += p.weight * dx * dx;
        myy += p.weight * dy * dy;
        mxy += p.weight * dx * dy;
    }
    let moments = ScatterMoments {
        mxx: mxx / total,
        myy: myy / total,
        mxy: mxy / total,
    };
    Ok(LineFit {
        center: (cx, cy),
        angle: moments.principal_angle(),
        moments,
    })
}

/// Grows line support regions over the whole map and returns the accepted
/// ones in detection order.
///
/// Seeds are visited by descending value bin (ten equal bins over `(0, 1]`),
/// raster order within a bin; only pixels above `lambda` may seed. Candidate
/// pixels join a region iff they are unused, have positive strength, match
/// the seed's orientation within `tau` (modulo pi), and lie within
/// `line_width` of the current line. Regions smaller than the a-contrario
/// threshold `l_min` are discarded on the spot: their pixels become available
/// again, their seed never seeds again.
pub fn grow_regions(
    map: &EdgeStrengthMap,
    orient: &OrientationMap,
    params: &DetectionParams,
) -> Result<Vec<Region>> {
    params.validate()?;
    if map.width() != orient.width() || map.height() != orient.height() {
        return Err(Error::Dimension(format!(
            "map {}x{} vs orientation {}x{}",
            map.width(),
            map.height(),
            orient.width(),
            orient.height()
        )));
    }
    if orient.directions() != params.directions {
        return Err(Error::Dimension(format!(
            "orientation has {} directions, params expect {}",
            orient.directions(),
            params.directions
        )));
    }

    let binarized;
    let work = match params.mode {
        Mode::Poe => {
            binarized = map.binarize(params.lambda)?;
            &binarized
        }
        Mode::Poev2 => map,
    };

    let p_match = angle_match_probability(params.directions, params.tau);
    let ctx = ValidationContext::for_image(map.width(), map.height(), params.epsilon, p_match)?;

    let (w, h) = (work.width(), work.height());
    let mut grower = Grower {
        map: work,
        orient,
        params,
        used: vec![false; w * h],
    };
    let mut seed_spent = vec![false; w * h];

    // Pseudo-ordering: bucket seed candidates into ten value bins and visit
    // the bins in descending order, raster order within each bin.
    let mut bins: [Vec<u32>; 10] = Default::default();
    for (raster, &v) in work.values().iter().enumerate() {
        if v > params.lambda {
            let bin = ((v * 10.0).ceil() as usize).clamp(1, 10) - 1;
            bins[bin].push(raster as u32);
        }
    }

    let mut accepted = Vec::new();
    for bin in bins.iter().rev() {
        for &raster in bin {
            let raster = raster as usize;
            if grower.used[raster] || seed_spent[raster] {
                continue;
            }
            let (sx, sy) = (raster % w, raster / w);
            let Some(region) = grower.grow_from(sx, sy) else {
                continue;
            };
            if region_size(&region) >= ctx.l_min {
                accepted.push(region);
            } else {
                for p in &region.pixels {
                    grower.used[p.y as usize * w + p.x as usize] = false;
                }
                seed_spent[raster] = true;
            }
        }
    }
    Ok(accepted)
}

struct Grower<'a> {
    map: &'a EdgeStrengthMap,
    orient: &'a OrientationMap,
    params: &'a DetectionParams,
    used: Vec<bool>,
}

impl Grower<'_> {
    fn grow_from(&mut self, sx: usize, sy: usize) -> Option<Region> {
        let seed_index = self.orient.angle_index(sx, sy)?;
        let seed_angle = f64::from(seed_index) * PI / f64::from(self.params.directions);
        let mut region = Region {
            pixels: vec![RegionPixel {
                x: sx as u32,
                y: sy as u32,
                weight: self.map.get(sx, sy),
            }],
            seed: (sx as u32, sy as u32),
            seed_angle_index: seed_index,
            seed_angle,
            ref_point: (sx as f64, sy as f64),
            line_angle: seed_angle,
            idx: 1,
            dist_r: dist_r_schedule(1, self.params.line_width, self.params.directions),
            fit_trace: Vec::new(),
        };
        self.used[sy * self.map.width() + sx] = true;

        let mut queue = VecDeque::new();
        queue.push_back((sx, sy));
        self.drain(&mut queue, &mut region);

        // A guided refit can make previously rejected candidates eligible, so
        // re-sweep every member neighborhood until a full sweep adds nothing.
        if self.params.mode == Mode::Poev2 {
            loop {
                let before = region.pixels.len();
                for k in 0..before {
                    let (px, py) = (region.pixels[k].x as usize, region.pixels[k].y as usize);
                    self.scan_neighborhood(px, py, &mut region, &mut queue);
                }
                self.drain(&mut queue, &mut region);
                if region.pixels.len() == before {
                    break;
                }
            }
        }
        Some(region)
    }

    fn drain(&mut self, queue: &mut VecDeque<(usize, usize)>, region: &mut Region) {
        while let Some((px, py)) = queue.pop_front() {
            self.scan_neighborhood(px, py, region, queue);
        }
    }

    fn scan_neighborhood(
        &mut self,
        px: usize,
        py: usize,
        region: &mut Region,
        queue: &mut VecDeque<(usize, usize)>,
    ) {
        let reach = i64::from(self.params.search / 2);
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (cx, cy) = (px as i64 + dx, py as i64 + dy);
                if !self.map.in_bounds(cx, cy) {
                    continue;
                }
                let (cx, cy) = (cx as usize, cy as usize);
                let raster = cy * self.map.width() + cx;
                if self.used[raster] {
                    continue;
                }
                let v = self.map.get(cx, cy);
                if v <= 0.0 {
                    continue;
                }
                let Some(c_index) = self.orient.angle_index(cx, cy) else {
                    continue;
                };
                let gap = self.orient.index_angle_diff(c_index, region.seed_angle_index);
                if gap > self.params.tau + ANGLE_EPS {
                    continue;
                }
                let pos = (cx as f64, cy as f64);
                if point_line_distance(pos, region.ref_point, region.line_angle)
                    > self.params.line_width
                {
                    continue;
                }

                self.used[raster] = true;
                region.pixels.push(RegionPixel {
                    x: cx as u32,
                    y: cy as u32,
                    weight: v,
                });
                queue.push_back((cx, cy));

                if self.params.mode == Mode::Poev2 {
                    let ddx = pos.0 - region.ref_point.0;
                    let ddy = pos.1 - region.ref_point.1;
                    if (ddx * ddx + ddy * ddy).sqrt() > region.dist_r {
                        let fit = fit_region(&region.pixels)
                            .expect("refit has >= 2 positively weighted pixels");
                        region.ref_point = fit.center;
                        region.line_angle = fit.angle;
                        region.idx += 1;
                        region.dist_r = dist_r_schedule(
                            region.idx,
                            self.params.line_width,
                            self.params.directions,
                        );
                        region.fit_trace.push(FitUpdate {
                            after_pixel: region.pixels.len() - 1,
                            ref_point: region.ref_point,
                            line_angle: region.line_angle,
                            dist_r: region.dist_r,
                        });
                    }
                }
            }
        }
    }
}

/// Serializes regions as line-delimited JSON, one region per line.
pub fn dump_regions_ldjson(regions: &[Region]) -> String {
    let mut out = String::new();
    for r in regions {
        out.push_str(&serde_json::to_string(r).expect("region serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientation::{estimate_orientation, WindowBank};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn orient_for(map: &EdgeStrengthMap, params: &DetectionParams) -> OrientationMap {
        let bank = WindowBank::new(params.half_width, params.directions).unwrap();
        estimate_orientation(map, &bank)
    }

    fn px(x: u32, y: u32, weight: f64) -> RegionPixel {
        RegionPixel { x, y, weight }
    }

    /// Replays a region's insertion log and checks that both membership
    /// constraints held against the state current at each insertion.
    fn audit_region(region: &Region, orient: &OrientationMap, params: &DetectionParams) {
        let mut ref_point = (f64::from(region.seed.0), f64::from(region.seed.1));
        let mut line_angle = region.seed_angle;
        let mut trace = region.fit_trace.iter().peekable();
        for (n, p) in region.pixels.iter().enumerate() {
            if n > 0 {
                let idx = orient.angle_index(p.x as usize, p.y as usize).unwrap();
                let gap = orient.index_angle_diff(idx, region.seed_angle_index);
                assert!(gap <= params.tau + 1e-12, "angle constraint violated");
                let d = point_line_distance(
                    (f64::from(p.x), f64::from(p.y)),
                    ref_point,
                    line_angle,
                );
                assert!(d <= params.line_width, "distance constraint violated: {d}");
            }
            while trace.peek().is_some_and(|u| u.after_pixel == n) {
                let u = trace.next().unwrap();
                ref_point = u.ref_point;
                line_angle = u.line_angle;
            }
        }
        assert!(trace.next().is_none(), "trace points past the pixel list");
    }

    #[test]
    fn point_line_distance_examples() {
        assert_eq!(point_line_distance((1.0, 1.0), (0.0, 0.0), 0.0), 1.0);
        assert_eq!(point_line_distance((5.0, 0.0), (0.0, 0.0), 0.0), 0.0);
        assert_abs_diff_eq!(
            point_line_distance((1.0, 1.0), (0.0, 0.0), PI / 4.0),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn dist_r_matches_frozen_oracle_values() {
        // idx * 3 / sin(3*pi/32), evaluated with a 40-digit calculator.
        let expected = [
            10.334682589430004,
            20.669365178860007,
            31.00404776829001,
            41.338730357720014,
            51.67341294715002,
        ];
        for (i, &e) in expected.iter().enumerate() {
            let got = dist_r_schedule(i as u32 + 1, 3.0, 16);
            assert!((got - e).abs() < 1e-12, "idx {}: {got} vs {e}", i + 1);
        }
        // Linear in idx.
        assert_eq!(
            dist_r_schedule(2, 3.0, 16),
            2.0 * dist_r_schedule(1, 3.0, 16)
        );
    }

    #[test]
    fn fit_collinear_and_weighted_sets() {
        let horiz = [px(0, 0, 1.0), px(1, 0, 1.0), px(2, 0, 1.0)];
        let f = fit_region(&horiz).unwrap();
        assert_eq!(f.center, (1.0, 0.0));
        assert_abs_diff_eq!(f.angle, 0.0, epsilon = 1e-12);

        let vert = [px(0, 0, 1.0), px(0, 1, 1.0), px(0, 2, 1.0)];
        let f = fit_region(&vert).unwrap();
        assert_eq!(f.center, (0.0, 1.0));
        assert_abs_diff_eq!(f.angle, PI / 2.0, epsilon = 1e-12);

        let diag = [px(0, 0, 1.0), px(1, 1, 1.0), px(2, 2, 1.0)];
        let f = fit_region(&diag).unwrap();
        assert_abs_diff_eq!(f.angle, PI / 4.0, epsilon = 1e-12);

        let weighted = [px(0, 0, 1.0), px(2, 0, 3.0)];
        let f = fit_region(&weighted).unwrap();
        assert_eq!(f.center, (1.5, 0.0));
        assert_abs_diff_eq!(f.angle, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_degenerate_inputs_error() {
        assert!(fit_region(&[px(3, 3, 1.0)]).is_err());
        assert!(fit_region(&[px(0, 0, 0.0), px(1, 0, 0.0)]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(DetectionParams::default().validate().is_ok());
        assert!(DetectionParams::wireframe().validate().is_ok());
        for bad in [
            DetectionParams {
                lambda: 1.5,
                ..Default::default()
            },
            DetectionParams {
                search: 4,
                ..Default::default()
            },
            DetectionParams {
                search: 1,
                ..Default::default()
            },
            DetectionParams {
                tau: 0.0,
                ..Default::default()
            },
            DetectionParams {
                epsilon: 0.0,
                ..Default::default()
            },
            DetectionParams {
                line_width: -1.0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    fn horizontal_segment_map(w: usize, h: usize, row: usize, x0: usize, len: usize) -> EdgeStrengthMap {
        let mut m = EdgeStrengthMap::zeros(w, h);
        for x in x0..x0 + len {
            m.set(x, row, 1.0);
        }
        m
    }

    #[test]
    fn ideal_line_grows_one_region_with_all_pixels() {
        let params = DetectionParams::default();
        let m = horizontal_segment_map(60, 30, 15, 10, 40);
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixels.len(), 40);
        audit_region(&regions[0], &orient, &params);
        // dist_r law after k refits.
        let r = &regions[0];
        assert_eq!(r.idx as usize, r.fit_trace.len() + 1);
        assert_eq!(
            r.dist_r,
            dist_r_schedule(r.idx, params.line_width, params.directions)
        );
    }

    #[test]
    fn parallel_lines_ten_apart_stay_separate() {
        let params = DetectionParams::default();
        let mut m = EdgeStrengthMap::zeros(60, 40);
        for x in 5..45 {
            m.set(x, 10, 1.0);
            m.set(x, 20, 1.0);
        }
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(regions.len(), 2);
        assert!(regions.iter().all(|r| r.pixels.len() == 40));
    }

    #[test]
    fn sub_threshold_pixels_join_but_never_seed() {
        // A line whose left half sits below lambda still grows fully once a
        // bright pixel seeds it.
        let params = DetectionParams {
            lambda: 0.5,
            ..Default::default()
        };
        let mut m = EdgeStrengthMap::zeros(64, 20);
        for x in 5..55 {
            m.set(x, 9, if x < 30 { 0.2 } else { 0.9 });
        }
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixels.len(), 50);
        // Seed had to come from the bright half.
        assert!(regions[0].seed.0 >= 30);
        audit_region(&regions[0], &orient, &params);
    }

    #[test]
    fn rejected_region_frees_pixels_and_blocks_seed() {
        // 24x24 gives l_min ~ 9.5: a 6-pixel blip is rejected, and the map
        // yields no regions at all, but the call terminates (seed spent).
        let params = DetectionParams::default();
        let m = horizontal_segment_map(24, 24, 12, 4, 6);
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert!(regions.is_empty());

        // A 16-pixel run on the same canvas clears the threshold.
        let m = horizontal_segment_map(24, 24, 12, 4, 16);
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixels.len(), 16);
    }

    #[test]
    fn partition_no_pixel_in_two_regions() {
        let params = DetectionParams::default();
        let mut m = EdgeStrengthMap::zeros(80, 80);
        for x in 5..70 {
            m.set(x, 20, 1.0);
            m.set(x, 40, 0.8);
        }
        for y in 5..75 {
            m.set(74, y, 0.9);
        }
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(regions.len(), 3);
        let mut seen = std::collections::HashSet::new();
        for r in &regions {
            audit_region(r, &orient, &params);
            for p in &r.pixels {
                assert!(p.weight > 0.0);
                assert!(seen.insert((p.x, p.y)), "pixel in two regions");
            }
        }
    }

    #[test]
    fn poe_and_poev2_agree_on_ideal_binary_axis_aligned_input() {
        let mut m = EdgeStrengthMap::zeros(70, 50);
        for x in 10..60 {
            m.set(x, 12, 1.0);
        }
        for y in 8..44 {
            m.set(33, y, 1.0);
        }
        let mut sets = Vec::new();
        for mode in [Mode::Poe, Mode::Poev2] {
            let params = DetectionParams {
                mode,
                ..Default::default()
            };
            let orient = orient_for(&m, &params);
            let regions = grow_regions(&m, &orient, &params).unwrap();
            let mut pixels: Vec<Vec<(u32, u32)>> = regions
                .iter()
                .map(|r| {
                    let mut v: Vec<_> = r.pixels.iter().map(|p| (p.x, p.y)).collect();
                    v.sort();
                    v
                })
                .collect();
            pixels.sort();
            sets.push(pixels);
        }
        assert_eq!(sets[0], sets[1]);
    }

    #[test]
    fn poe_mode_has_unit_weights_and_fixed_line() {
        let params = DetectionParams {
            mode: Mode::Poe,
            lambda: 0.3,
            ..Default::default()
        };
        let mut m = EdgeStrengthMap::zeros(60, 20);
        for x in 5..55 {
            m.set(x, 9, 0.35 + 0.01 * (x % 3) as f64);
        }
        let binarized = m.binarize(params.lambda).unwrap();
        let orient = orient_for(&binarized, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(regions.len(), 1);
        let r = &regions[0];
        assert!(r.pixels.iter().all(|p| p.weight == 1.0));
        assert!(r.fit_trace.is_empty());
        assert_eq!(r.idx, 1);
        assert_eq!(r.ref_point, (f64::from(r.seed.0), f64::from(r.seed.1)));
    }

    #[test]
    fn determinism_identical_runs_identical_regions() {
        let params = DetectionParams::default();
        let mut m = EdgeStrengthMap::zeros(50, 50);
        for k in 5..45 {
            m.set(k, 25, 0.7);
            m.set(k, k, 0.9);
        }
        let orient = orient_for(&m, &params);
        let a = grow_regions(&m, &orient, &params).unwrap();
        let b = grow_regions(&m, &orient, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let params = DetectionParams::default();
        let m = EdgeStrengthMap::zeros(20, 20);
        let other = EdgeStrengthMap::zeros(21, 20);
        let orient = orient_for(&other, &params);
        assert!(grow_regions(&m, &orient, &params).is_err());

        let bank = WindowBank::new(params.half_width, 8).unwrap();
        let orient8 = estimate_orientation(&m, &bank);
        assert!(grow_regions(&m, &orient8, &params).is_err());
    }

    #[test]
    fn ldjson_dump_round_trips() {
        let params = DetectionParams::default();
        let m = horizontal_segment_map(60, 30, 15, 10, 40);
        let orient = orient_for(&m, &params);
        let regions = grow_regions(&m, &orient, &params).unwrap();
        let dump = dump_regions_ldjson(&regions);
        let parsed: Vec<Region> = dump
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(parsed, regions);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Cauchy-Schwarz for the weighted scatter moments.
        #[test]
        fn moments_are_positive_semidefinite(
            pts in proptest::collection::vec((0..40u32, 0..40u32, 0.01..1.0f64), 2..30)
        ) {
            let pixels: Vec<RegionPixel> = pts.iter().map(|&(x, y, w)| px(x, y, w)).collect();
            let f = fit_region(&pixels).unwrap();
            let m = f.moments;
            prop_assert!(m.mxx >= 0.0);
            prop_assert!(m.myy >= 0.0);
            prop_assert!(m.mxx * m.myy - m.mxy * m.mxy >= -1e-9);
            prop_assert!((0.0..PI).contains(&f.angle));
        }
    }
}
