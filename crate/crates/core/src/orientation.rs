//! Per-pixel orientation estimation via directional window sums.
//!
//! A [`WindowBank`] holds one line-shaped window per direction: the pixels of
//! the window for angle `theta` are the offsets `(x', y')` with
//! `|-x'*sin(theta) + y'*cos(theta)| < 0.5` and `x'^2 + y'^2 <= W^2`. Summing
//! edge strengths over each window and taking the direction of maximum
//! response gives the orientation of a pixel: the window aligned with the
//! local line collects the most evidence.
//!
//! Windows are stored as sparse offset lists; each holds on the order of
//! `2W+1` active pixels out of `(2W+1)^2`, so sparse iteration is the
//! dominant-cost kernel of the whole detector.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::EdgeStrengthMap;

/// Sentinel for pixels with no orientation (zero edge strength).
pub const INVALID_INDEX: u16 = u16::MAX;

/// Reduces an angle to `[0, pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Undirected angle difference modulo pi: `min(|a-b|, pi-|a-b|)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(PI);
    d.min(PI - d)
}

/// Bank of `P` directional line windows of half-width `W`.
#[derive(Debug, Clone)]
pub struct WindowBank {
    half_width: u32,
    directions: u32,
    angles: Vec<f64>,
    offsets: Vec<Vec<(i32, i32)>>,
}

impl WindowBank {
    /// Builds the bank for angles `theta_i = i*pi/P`, `i = 0..P`.
    pub fn new(half_width: u32, directions: u32) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::Param("window half-width must be >= 1".into()));
        }
        if !(2..u32::from(INVALID_INDEX)).contains(&directions) {
            return Err(Error::Param(format!(
                "direction count must be in [2, {}), got {directions}",
                INVALID_INDEX
            )));
        }
        let w = half_width as i32;
        let r2 = i64::from(half_width) * i64::from(half_width);
        let mut angles = Vec::with_capacity(directions as usize);
        let mut offsets = Vec::with_capacity(directions as usize);
        for i in 0..directions {
            let theta = f64::from(i) * PI / f64::from(directions);
            let (sin_t, cos_t) = theta.sin_cos();
            let mut active = Vec::new();
            for dy in -w..=w {
                for dx in -w..=w {
                    let in_disk = i64::from(dx) * i64::from(dx) + i64::from(dy) * i64::from(dy) <= r2;
                    let on_line = (-f64::from(dx) * sin_t + f64::from(dy) * cos_t).abs() < 0.5;
                    if in_disk && on_line {
                        active.push((dx, dy));
                    }
                }
            }
            angles.push(theta);
            offsets.push(active);
        }
        Ok(Self {
            half_width,
            directions,
            angles,
            offsets,
        })
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn directions(&self) -> u32 {
        self.directions
    }

    /// Angle of direction `i` in radians.
    pub fn angle(&self, i: usize) -> f64 {
        self.angles[i]
    }

    /// Active offsets `(x', y')` of the window for direction `i`.
    pub fn window_offsets(&self, i: usize) -> &[(i32, i32)] {
        &self.offsets[i]
    }

    /// Renders one window as a `(2W+1)` square map, for debug export.
    pub fn mask_image(&self, i: usize) -> EdgeStrengthMap {
        let side = 2 * self.half_width as usize + 1;
        let c = self.half_width as i32;
        let mut m = EdgeStrengthMap::zeros(side, side);
        for &(dx, dy) in &self.offsets[i] {
            m.set((dx + c) as usize, (dy + c) as usize, 1.0);
        }
        m
    }
}

/// Quantized per-pixel orientation: an angle index in `[0, P)` for every
/// pixel with positive edge strength, a sentinel elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationMap {
    width: usize,
    height: usize,
    directions: u32,
    index: Vec<u16>,
}

impl OrientationMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn directions(&self) -> u32 {
        self.directions
    }

    /// True iff the source pixel had positive edge strength.
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.index[y * self.width + x] != INVALID_INDEX
    }

    /// Angle index at `(x, y)`, if the pixel is valid.
    pub fn angle_index(&self, x: usize, y: usize) -> Option<u16> {
        match self.index[y * self.width + x] {
            INVALID_INDEX => None,
            i => Some(i),
        }
    }

    /// Quantized angle in radians at `(x, y)`, if the pixel is valid.
    pub fn angle(&self, x: usize, y: usize) -> Option<f64> {
        self.angle_index(x, y)
            .map(|i| f64::from(i) * PI / f64::from(self.directions))
    }

    /// Exact angle difference between two quantized indices, in radians.
    ///
    /// Computed from the integer index distance so that adjacent directions
    /// compare exactly equal to `pi/P`.
    pub fn index_angle_diff(&self, a: u16, b: u16) -> f64 {
        let p = self.directions;
        let d = u32::from(a.abs_diff(b));
        let d = d.min(p - d);
        f64::from(d) * PI / f64::from(p)
    }

    /// Renders the angle indices as gray levels for debug export: valid
    /// pixels map to `(index+1)/P`, invalid pixels to 0.
    pub fn index_image(&self) -> EdgeStrengthMap {
        let p = f64::from(self.directions);
        let values = self
            .index
            .iter()
            .map(|&i| {
                if i == INVALID_INDEX {
                    0.0
                } else {
                    f64::from(i + 1) / p
                }
            })
            .collect();
        EdgeStrengthMap::new(self.width, self.height, values).expect("values in range")
    }
}

/// Sum of edge strengths over every directional window centered at `(x, y)`.
/// Samples outside the image contribute zero.
pub fn directional_sums(
    map: &EdgeStrengthMap,
    bank: &WindowBank,
    x: usize,
    y: usize,
) -> Result<Vec<f64>> {
    if x >= map.width() || y >= map.height() {
        return Err(Error::Param(format!(
            "coordinates ({x}, {y}) outside {}x{} map",
            map.width(),
            map.height()
        )));
    }
    let mut sums = Vec::with_capacity(bank.directions() as usize);
    for i in 0..bank.directions() as usize {
        sums.push(window_sum(map, bank.window_offsets(i), x as i64, y as i64));
    }
    Ok(sums)
}

#[inline]
fn window_sum(map: &EdgeStrengthMap, offsets: &[(i32, i32)], x: i64, y: i64) -> f64 {
    let mut s = 0.0;
    for &(dx, dy) in offsets {
        s += map.get_padded(x + i64::from(dx), y + i64::from(dy));
    }
    s
}

/// Estimates the orientation of every pixel with positive edge strength as
/// the direction of maximum window response. Ties go to the smallest index.
pub fn estimate_orientation(map: &EdgeStrengthMap, bank: &WindowBank) -> OrientationMap {
    let (w, h) = (map.width(), map.height());
    let values = map.values();
    let margin = bank.half_width() as usize;
    let interior_w = w > 2 * margin;
    let mut index = vec![INVALID_INDEX; w * h];

    for y in 0..h {
        let interior_row = interior_w && y >= margin && y + margin < h;
        for x in 0..w {
            if values[y * w + x] <= 0.0 {
                continue;
            }
            let mut best_sum = f64::NEG_INFINITY;
            let mut best_i = 0u16;
            let interior = interior_row && x >= margin && x + margin < w;
            for i in 0..bank.directions() as usize {
                let offsets = bank.window_offsets(i);
                let s = if interior {
                    // No padding possible: index the buffer directly.
                    let base = (y * w + x) as i64;
                    let mut s = 0.0;
                    for &(dx, dy) in offsets {
                        s += values[(base + i64::from(dy) * w as i64 + i64::from(dx)) as usize];
                    }
                    s
                } else {
                    window_sum(map, offsets, x as i64, y as i64)
                };
                if s > best_sum {
                    best_sum = s;
                    best_i = i as u16;
                }
            }
            index[y * w + x] = best_i;
        }
    }
    OrientationMap {
        width: w,
        height: h,
        directions: bank.directions(),
        index,
    }
}
