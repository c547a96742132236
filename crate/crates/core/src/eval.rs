//! Detection scoring: heatmap precision/recall/F-measure, threshold sweeps
//! for average precision/recall, and structural AP.
//!
//! The heatmap metric rasterizes predicted and ground-truth segments into
//! binary maps and matches pixels one-to-one within a distance budget
//! (a fraction of the image diagonal). Matching is greedy nearest-first,
//! which approximates optimal bipartite matching; ties are broken on an
//! unordered pixel-pair key so that swapping prediction and ground truth
//! swaps precision and recall exactly.
//!
//! Structural AP matches whole segments by squared endpoint distance in a
//! 128x128-normalized frame, each ground-truth segment usable at most once,
//! and integrates the score-ranked precision-recall curve. A detection can
//! pass the structural gate while an endpoint strays by `sqrt(d_t)` in the
//! normalized frame, which is why the pixel-level heatmap metric is the
//! primary score here.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::segments::{self, LineSegment};
use crate::EdgeStrengthMap;

/// Scoring configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Heatmap pixel-match tolerance as a fraction of the image diagonal.
    pub d_match: f64,
    /// Structural-AP squared endpoint-distance threshold in the 128x128 frame.
    pub d_t: f64,
    /// Score cutoffs for the AP/AR sweep.
    pub thresholds: Vec<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            d_match: 0.0075,
            d_t: 5.0,
            thresholds: default_thresholds(),
        }
    }
}

/// Default score cutoffs for AP/AR sweeps. Scores are region support sizes,
/// so the grid spans "keep everything" up to long-segment-only cutoffs.
pub fn default_thresholds() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 75.0, 100.0]
}

/// Pixel-level scores for one prediction/ground-truth pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapScores {
    pub precision: f64,
    pub recall: f64,
    pub f_h: f64,
    pub matched: usize,
    pub pred_pixels: usize,
    pub gt_pixels: usize,
}

/// Rasterizes segments into a binary map: endpoints round to the nearest
/// pixel, Bresenham fills between them, out-of-bounds pixels are skipped.
pub fn rasterize(segments: &[LineSegment], width: usize, height: usize) -> EdgeStrengthMap {
    let mut map = EdgeStrengthMap::zeros(width, height);
    for s in segments {
        let (x0, y0) = (s.x1.round() as i64, s.y1.round() as i64);
        let (x1, y1) = (s.x2.round() as i64, s.y2.round() as i64);
        for (x, y) in bresenham(x0, y0, x1, y1) {
            if map.in_bounds(x, y) {
                map.set(x as usize, y as usize, 1.0);
            }
        }
    }
    map
}

/// All integer points of the Bresenham line from `(x0, y0)` to `(x1, y1)`,
/// endpoints included.
fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<(i64, i64)> {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (x0, y0);
    let mut points = Vec::with_capacity((dx - dy) as usize + 1);
    loop {
        points.push((x, y));
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    points
}

fn binary_pixels(map: &EdgeStrengthMap) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for y in 0..map.height() {
        for x in 0..map.width() {
            if map.get(x, y) > 0.0 {
                out.push((x as u32, y as u32));
            }
        }
    }
    out
}

fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Greedy one-to-one nearest-first matching between two pixel sets within a
/// Euclidean radius. Returns the number of matched pairs.
///
/// Candidate pairs are ordered by exact squared distance and an unordered
/// raster-index key, which makes the match count invariant under swapping
/// the two sets.
fn match_pixel_sets(
    a: &[(u32, u32)],
    b: &[(u32, u32)],
    width: usize,
    height: usize,
    radius: f64,
) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let r = radius.floor() as i64;
    let r2_max = radius * radius;
    let mut b_grid = vec![false; width * height];
    for &(x, y) in b {
        b_grid[y as usize * width + x as usize] = true;
    }

    // (d2, min raster, max raster, a raster, b raster)
    let mut pairs: Vec<(u64, u32, u32, u32, u32)> = Vec::new();
    for &(ax, ay) in a {
        for dy in -r..=r {
            let by = i64::from(ay) + dy;
            if by < 0 || by >= height as i64 {
                continue;
            }
            for dx in -r..=r {
                let bx = i64::from(ax) + dx;
                if bx < 0 || bx >= width as i64 {
                    continue;
                }
                let d2 = (dx * dx + dy * dy) as u64;
                if (d2 as f64) > r2_max {
                    continue;
                }
                let b_raster = (by * width as i64 + bx) as usize;
                if !b_grid[b_raster] {
                    continue;
                }
                let a_raster = ay * width as u32 + ax;
                let b_raster = b_raster as u32;
                pairs.push((
                    d2,
                    a_raster.min(b_raster),
                    a_raster.max(b_raster),
                    a_raster,
                    b_raster,
                ));
            }
        }
    }
    pairs.sort_unstable();

    let mut a_used = vec![false; width * height];
    let mut b_used = vec![false; width * height];
    let mut matched = 0;
    for &(_, _, _, ar, br) in &pairs {
        if !a_used[ar as usize] && !b_used[br as usize] {
            a_used[ar as usize] = true;
            b_used[br as usize] = true;
            matched += 1;
        }
    }
    matched
}

/// Pixel-level precision/recall/F between a predicted and a ground-truth
/// binary map, matching within `d_match * diagonal`.
///
/// Conventions for empty sets: both empty scores 1/1/1; an empty side scores
/// 1 on its own ratio (no mistakes of that kind were possible).
pub fn heatmap_scores(
    pred: &EdgeStrengthMap,
    gt: &EdgeStrengthMap,
    d_match: f64,
) -> Result<HeatmapScores> {
    if pred.width() != gt.width() || pred.height() != gt.height() {
        return Err(Error::Dimension(format!(
            "prediction {}x{} vs ground truth {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let pred_px = binary_pixels(pred);
    let gt_px = binary_pixels(gt);
    let radius = d_match * pred.diagonal();
    let matched = match_pixel_sets(&pred_px, &gt_px, pred.width(), pred.height(), radius);
    Ok(scores_from_counts(matched, pred_px.len(), gt_px.len()))
}

fn scores_from_counts(matched: usize, pred: usize, gt: usize) -> HeatmapScores {
    let precision = if pred > 0 {
        matched as f64 / pred as f64
    } else {
        1.0
    };
    let recall = if gt > 0 {
        matched as f64 / gt as f64
    } else {
        1.0
    };
    HeatmapScores {
        precision,
        recall,
        f_h: if pred == 0 && gt == 0 {
            1.0
        } else {
            f_measure(precision, recall)
        },
        matched,
        pred_pixels: pred,
        gt_pixels: gt,
    }
}

/// One dataset: per-image predictions with scores, ground truth, dimensions.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub predictions: Vec<Vec<LineSegment>>,
    pub ground_truth: Vec<Vec<LineSegment>>,
    pub dims: Vec<(usize, usize)>,
}

impl Dataset {
    pub fn push(
        &mut self,
        pred: Vec<LineSegment>,
        gt: Vec<LineSegment>,
        dims: (usize, usize),
    ) {
        self.predictions.push(pred);
        self.ground_truth.push(gt);
        self.dims.push(dims);
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
}

/// Dataset-level (micro-averaged) heatmap scores over all images.
pub fn dataset_heatmap_scores(dataset: &Dataset, d_match: f64) -> Result<HeatmapScores> {
    let mut matched = 0;
    let mut pred_total = 0;
    let mut gt_total = 0;
    for i in 0..dataset.len() {
        let (w, h) = dataset.dims[i];
        let pred = rasterize(&dataset.predictions[i], w, h);
        let gt = rasterize(&dataset.ground_truth[i], w, h);
        let s = heatmap_scores(&pred, &gt, d_match)?;
        matched += s.matched;
        pred_total += s.pred_pixels;
        gt_total += s.gt_pixels;
    }
    Ok(scores_from_counts(matched, pred_total, gt_total))
}

/// One point of a threshold sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    /// Dataset precision at this cutoff; `None` when no pixels survive it.
    pub precision: Option<f64>,
    pub recall: f64,
}

/// AP/AR over a score-threshold sweep of the heatmap metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub ap_h: f64,
    pub ar_h: f64,
    pub points: Vec<SweepPoint>,
}

/// Sweeps score cutoffs and reports average precision (over cutoffs where
/// precision is defined) and average recall (over all cutoffs).
pub fn pr_sweep(dataset: &Dataset, thresholds: &[f64], d_match: f64) -> Result<SweepResult> {
    let gt_maps: Vec<EdgeStrengthMap> = (0..dataset.len())
        .map(|i| rasterize(&dataset.ground_truth[i], dataset.dims[i].0, dataset.dims[i].1))
        .collect();
    let mut points = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let mut matched = 0;
        let mut pred_total = 0;
        let mut gt_total = 0;
        for i in 0..dataset.len() {
            let kept: Vec<LineSegment> = dataset.predictions[i]
                .iter()
                .filter(|s| s.score >= t)
                .copied()
                .collect();
            let (w, h) = dataset.dims[i];
            let pred = rasterize(&kept, w, h);
            let s = heatmap_scores(&pred, &gt_maps[i], d_match)?;
            matched += s.matched;
            pred_total += s.pred_pixels;
            gt_total += s.gt_pixels;
        }
        let precision = (pred_total > 0).then(|| matched as f64 / pred_total as f64);
        let recall = if gt_total > 0 {
            matched as f64 / gt_total as f64
        } else {
            1.0
        };
        points.push(SweepPoint {
            threshold: t,
            precision,
            recall,
        });
    }
    let defined: Vec<f64> = points.iter().filter_map(|p| p.precision).collect();
    let ap_h = if defined.is_empty() {
        0.0
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    };
    let ar_h = if points.is_empty() {
        0.0
    } else {
        points.iter().map(|p| p.recall).sum::<f64>() / points.len() as f64
    };
    Ok(SweepResult { ap_h, ar_h, points })
}

/// Structural AP result with the ranked PR curve and the full-cutoff point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SapResult {
    pub sap: f64,
    /// `(recall, precision)` after each ranked detection.
    pub curve: Vec<(f64, f64)>,
    pub full_precision: f64,
    pub full_recall: f64,
}

/// Squared endpoint distance of Eq.-style structural matching, trying both
/// endpoint orderings.
fn structural_distance(a: &LineSegment, b: &LineSegment) -> f64 {
    let d = |x1: f64, y1: f64, x2: f64, y2: f64| (x1 - x2).powi(2) + (y1 - y2).powi(2);
    let fwd = d(a.x1, a.y1, b.x1, b.y1) + d(a.x2, a.y2, b.x2, b.y2);
    let rev = d(a.x1, a.y1, b.x2, b.y2) + d(a.x2, a.y2, b.x1, b.y1);
    fwd.min(rev)
}

fn scale_to_128(segments: &[LineSegment], dims: (usize, usize)) -> Vec<LineSegment> {
    let sx = 128.0 / dims.0 as f64;
    let sy = 128.0 / dims.1 as f64;
    segments
        .iter()
        .map(|s| LineSegment::new(s.x1 * sx, s.y1 * sy, s.x2 * sx, s.y2 * sy, s.score))
        .collect()
}

/// Structural AP at squared-distance threshold `d_t`, all coordinates scaled
/// to a 128x128 frame per image.
///
/// Detections are ranked by descending score; each matches the nearest
/// still-unmatched ground-truth segment of its image if the squared endpoint
/// distance stays within `d_t`. The returned `sap` is the trapezoidal area
/// under the ranked precision-recall curve.
pub fn structural_ap(dataset: &Dataset, d_t: f64) -> SapResult {
    let preds: Vec<Vec<LineSegment>> = (0..dataset.len())
        .map(|i| scale_to_128(&dataset.predictions[i], dataset.dims[i]))
        .collect();
    let gts: Vec<Vec<LineSegment>> = (0..dataset.len())
        .map(|i| scale_to_128(&dataset.ground_truth[i], dataset.dims[i]))
        .collect();

    let total_gt: usize = gts.iter().map(|g| g.len()).sum();
    // (score, image, original order) — stable rank for ties.
    let mut ranked: Vec<(f64, usize, usize)> = Vec::new();
    for (img, p) in preds.iter().enumerate() {
        for (k, s) in p.iter().enumerate() {
            ranked.push((s.score, img, k));
        }
    }
    ranked.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut gt_used: Vec<Vec<bool>> = gts.iter().map(|g| vec![false; g.len()]).collect();
    let mut tp = 0usize;
    let mut curve = Vec::with_capacity(ranked.len());
    for (rank, &(_, img, k)) in ranked.iter().enumerate() {
        let det = &preds[img][k];
        let mut best: Option<(f64, usize)> = None;
        for (gi, gt) in gts[img].iter().enumerate() {
            if gt_used[img][gi] {
                continue;
            }
            let d = structural_distance(det, gt);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, gi));
            }
        }
        if let Some((d, gi)) = best {
            if d <= d_t {
                gt_used[img][gi] = true;
                tp += 1;
            }
        }
        let recall = if total_gt > 0 {
            tp as f64 / total_gt as f64
        } else {
            0.0
        };
        let precision = tp as f64 / (rank + 1) as f64;
        curve.push((recall, precision));
    }

    let sap = if total_gt == 0 {
        if ranked.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        // Trapezoid over recall, anchored at (0, 1).
        let mut area = 0.0;
        let (mut prev_r, mut prev_p) = (0.0, 1.0);
        for &(r, p) in &curve {
            area += (r - prev_r) * (p + prev_p) / 2.0;
            prev_r = r;
            prev_p = p;
        }
        area
    };
    let (full_recall, full_precision) = curve.last().copied().unwrap_or((0.0, 1.0));
    SapResult {
        sap,
        curve,
        full_precision,
        full_recall,
    }
}

/// Per-image entry of an evaluation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageScores {
    pub stem: String,
    pub precision: f64,
    pub recall: f64,
    pub f_h: f64,
}

/// Aggregate evaluation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_h: f64,
    pub ap_h: f64,
    pub ar_h: f64,
    /// `(d_t, sAP)` pairs, one per requested threshold.
    pub sap: Vec<(f64, f64)>,
    pub per_image: Vec<ImageScores>,
}

/// ShanghaiTech-style annotation: `{"lines": [[x1,y1,x2,y2], ...]}` with
/// optional `filename`/`width`/`height` fields.
#[derive(Debug, Deserialize)]
struct WireframeAnnotation {
    lines: Vec<[f64; 4]>,
}

/// Loads ground-truth segments from `.txt` (text format) or `.json` (either
/// the segment-object array or a ShanghaiTech-style `lines` annotation).
pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<Vec<LineSegment>> {
    let path = path.as_ref();
    let data = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let trimmed = data.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        if let Ok(segs) = segments::parse_json(&data) {
            return Ok(segs);
        }
        let ann: WireframeAnnotation = serde_json::from_str(&data)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Ok(ann
            .lines
            .iter()
            .map(|l| LineSegment::new(l[0], l[1], l[2], l[3], 1.0))
            .collect())
    } else {
        segments::parse_text(&data)
    }
}
