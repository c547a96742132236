//! Edge strength maps and the preprocessing steps applied to them.
//!
//! An [`EdgeStrengthMap`] is a row-major grid of edge probabilities in
//! `[0, 1]`. All preprocessing here is pure: binarization, non-maxima
//! thinning, and a gradient-magnitude fallback for raw grayscale images.

use crate::error::{Error, Result};
use crate::orientation::OrientationMap;

pub mod io;

/// Row-major grid of edge probabilities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStrengthMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl EdgeStrengthMap {
    /// Builds a map from row-major values, checking the `[0, 1]` range and
    /// the size invariants.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Param(format!(
                "map dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::Dimension(format!(
                "expected {} values for a {width}x{height} map, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Format(format!(
                "edge strength {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// All-zero map of the given size.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![0.0; width * height]).expect("nonzero dims")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Image diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt()
    }

    #[inline]
    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Value at `(x, y)`, or 0 outside the image (zero padding).
    #[inline]
    pub fn get_padded(&self, x: i64, y: i64) -> f64 {
        if self.in_bounds(x, y) {
            self.values[y as usize * self.width + x as usize]
        } else {
            0.0
        }
    }

    /// Sets a value, clamping it into `[0, 1]` to preserve the invariant.
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v.clamp(0.0, 1.0);
    }

    /// Bilinear sample at a sub-pixel location; outside samples read 0.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (x0, y0) = (x0 as i64, y0 as i64);
        let v00 = self.get_padded(x0, y0);
        let v10 = self.get_padded(x0 + 1, y0);
        let v01 = self.get_padded(x0, y0 + 1);
        let v11 = self.get_padded(x0 + 1, y0 + 1);
        v00 * (1.0 - fx) * (1.0 - fy)
            + v10 * fx * (1.0 - fy)
            + v01 * (1.0 - fx) * fy
            + v11 * fx * fy
    }

    /// Thresholds the map to `{0, 1}`: values strictly above `lambda` become
    /// 1.0, everything else (including exactly `lambda`) becomes 0.0.
    pub fn binarize(&self, lambda: f64) -> Result<EdgeStrengthMap> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Param(format!(
                "binarization threshold {lambda} outside [0, 1]"
            )));
        }
        let values = self
            .values
            .iter()
            .map(|&v| if v > lambda { 1.0 } else { 0.0 })
            .collect();
        Ok(EdgeStrengthMap {
            width: self.width,
            height: self.height,
            values,
        })
    }
}

/// Gradient-magnitude edge map from a raw grayscale image, for use when no
/// trained edge detector output is available.
///
/// Gradients are 3x3 central differences with clamped borders; the result is
/// rescaled so the maximum magnitude maps to 1.0. A constant image yields an
/// all-zero map.
pub fn fallback_edges(width: usize, height: usize, luma: &[f64]) -> Result<EdgeStrengthMap> {
    if width == 0 || height == 0 || luma.len() != width * height {
        return Err(Error::Dimension(format!(
            "luma buffer of {} values does not match {width}x{height}",
            luma.len()
        )));
    }
    let at = |x: usize, y: usize| luma[y * width + x];
    let mut mag = vec![0.0f64; width * height];
    let mut max_mag = 0.0f64;
    for y in 0..height {
        let ym = y.saturating_sub(1);
        let yp = (y + 1).min(height - 1);
        for x in 0..width {
            let xm = x.saturating_sub(1);
            let xp = (x + 1).min(width - 1);
            let gx = (at(xp, y) - at(xm, y)) / 2.0;
            let gy = (at(x, yp) - at(x, ym)) / 2.0;
            let m = (gx * gx + gy * gy).sqrt();
            mag[y * width + x] = m;
            max_mag = max_mag.max(m);
        }
    }
    if max_mag > 0.0 {
        for m in &mut mag {
            *m /= max_mag;
        }
    }
    EdgeStrengthMap::new(width, height, mag)
}

/// Non-maxima thinning along the direction perpendicular to each pixel's
/// estimated orientation.
///
/// A pixel keeps its value iff it is `>=` both bilinear samples taken one
/// pixel away on either side along the perpendicular; plateau ties therefore
/// survive. Pixels with zero strength or no orientation are zeroed.
pub fn nms_thin(map: &EdgeStrengthMap, orientation: &OrientationMap) -> Result<EdgeStrengthMap> {
    if map.width() != orientation.width() || map.height() != orientation.height() {
        return Err(Error::Dimension(format!(
            "map {}x{} vs orientation {}x{}",
            map.width(),
            map.height(),
            orientation.width(),
            orientation.height()
        )));
    }
    let mut out = EdgeStrengthMap::zeros(map.width(), map.height());
    for y in 0..map.height() {
        for x in 0..map.width() {
            let v = map.get(x, y);
            if v <= 0.0 {
                continue;
            }
            let Some(theta) = orientation.angle(x, y) else {
                continue;
            };
            // Perpendicular direction (-sin, cos) rotated from the line angle.
            let (s, c) = theta.sin_cos();
            let (px, py) = (-s, c);
            let a = map.sample_bilinear(x as f64 + px, y as f64 + py);
            let b = map.sample_bilinear(x as f64 - px, y as f64 - py);
            if v >= a && v >= b {
                out.set(x, y, v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growing::DetectionParams;
    use crate::orientation::{estimate_orientation, WindowBank};

    fn horizontal_line_map(w: usize, h: usize, row: usize) -> EdgeStrengthMap {
        let mut m = EdgeStrengthMap::zeros(w, h);
        for x in 0..w {
            m.set(x, row, 1.0);
        }
        m
    }

    #[test]
    fn new_rejects_bad_values() {
        assert!(EdgeStrengthMap::new(2, 2, vec![0.0, 0.5, 1.0, 1.1]).is_err());
        assert!(EdgeStrengthMap::new(2, 2, vec![0.0; 3]).is_err());
        assert!(EdgeStrengthMap::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn binarize_threshold_is_strict() {
        let m = EdgeStrengthMap::new(3, 1, vec![0.299, 0.3, 0.301]).unwrap();
        let b = m.binarize(0.3).unwrap();
        assert_eq!(b.values(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn binarize_edge_lambdas() {
        let m = EdgeStrengthMap::new(2, 1, vec![0.001, 1.0]).unwrap();
        assert_eq!(m.binarize(0.0).unwrap().values(), &[1.0, 1.0]);
        assert_eq!(m.binarize(1.0).unwrap().values(), &[0.0, 0.0]);
        assert!(m.binarize(1.5).is_err());
    }

    #[test]
    fn binarize_is_idempotent() {
        let m = EdgeStrengthMap::new(4, 1, vec![0.05, 0.4, 0.7, 1.0]).unwrap();
        let once = m.binarize(0.5).unwrap();
        let twice = once.binarize(0.25).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn fallback_constant_image_is_zero() {
        let m = fallback_edges(8, 6, &vec![93.0; 48]).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fallback_step_edge_peaks_at_step() {
        let w = 10;
        let h = 4;
        let luma: Vec<f64> = (0..w * h)
            .map(|i| if i % w < w / 2 { 0.0 } else { 255.0 })
            .collect();
        let m = fallback_edges(w, h, &luma).unwrap();
        // Columns adjacent to the step respond maximally, everything else is 0.
        for y in 0..h {
            for x in 0..w {
                let v = m.get(x, y);
                if x == w / 2 - 1 || x == w / 2 {
                    assert_eq!(v, 1.0);
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn fallback_isolated_pixel_is_local() {
        let w = 15;
        let mut luma = vec![0.0; w * w];
        luma[7 * w + 7] = 255.0;
        let m = fallback_edges(w, w, &luma).unwrap();
        assert!(m.get(6, 7) > 0.0);
        assert!(m.get(8, 7) > 0.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(12, 7), 0.0);
    }

    #[test]
    fn nms_keeps_thin_line_unchanged() {
        let params = DetectionParams::default();
        let m = horizontal_line_map(24, 9, 4);
        let bank = WindowBank::new(params.half_width, params.directions).unwrap();
        let orient = estimate_orientation(&m, &bank);
        let thinned = nms_thin(&m, &orient).unwrap();
        assert_eq!(thinned, m);
    }

    #[test]
    fn nms_plateau_survives_with_ge_rule() {
        let params = DetectionParams::default();
        let mut m = EdgeStrengthMap::zeros(24, 9);
        for row in 3..6 {
            for x in 0..24 {
                m.set(x, row, 1.0);
            }
        }
        let bank = WindowBank::new(params.half_width, params.directions).unwrap();
        let orient = estimate_orientation(&m, &bank);
        let thinned = nms_thin(&m, &orient).unwrap();
        assert_eq!(thinned, m);
    }

    #[test]
    fn nms_zero_map_and_never_increases() {
        let params = DetectionParams::default();
        let zero = EdgeStrengthMap::zeros(10, 10);
        let bank = WindowBank::new(params.half_width, params.directions).unwrap();
        let orient = estimate_orientation(&zero, &bank);
        assert_eq!(nms_thin(&zero, &orient).unwrap(), zero);

        // Ramp across a line: suppressed pixels drop to zero, kept ones are
        // unchanged, nothing grows.
        let mut m = EdgeStrengthMap::zeros(24, 9);
        for x in 0..24 {
            m.set(x, 3, 0.4);
            m.set(x, 4, 0.9);
            m.set(x, 5, 0.2);
        }
        let orient = estimate_orientation(&m, &bank);
        let thinned = nms_thin(&m, &orient).unwrap();
        for (a, b) in thinned.values().iter().zip(m.values()) {
            assert!(a <= b);
        }
        assert!(thinned.get(5, 4) == 0.9);
        assert_eq!(thinned.get(5, 3), 0.0);
    }

    #[test]
    fn nms_dimension_mismatch_errors() {
        let params = DetectionParams::default();
        let m = horizontal_line_map(24, 9, 4);
        let bank = WindowBank::new(params.half_width, params.directions).unwrap();
        let orient = estimate_orientation(&m, &bank);
        let small = EdgeStrengthMap::zeros(23, 9);
        assert!(nms_thin(&small, &orient).is_err());
    }
}
