//! Sub-pixel line segments and their serialization.
//!
//! An accepted region becomes a segment by refitting the line on its final
//! pixel set and projecting every member pixel onto it; the extreme
//! projections give the endpoints. Endpoints are not clamped to the image:
//! sub-pixel fits may extend slightly past the border.
//!
//! The text form (`x1 y1 x2 y2 score`, six decimals, one segment per line)
//! is the canonical interchange format; JSON carries the same fields at full
//! float precision, and SVG renders an overlay at image dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growing::{fit_region, Region};
use crate::validation::region_size;

/// Line segment with sub-pixel endpoints and a support score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    /// Weighted size of the supporting region, used as confidence.
    pub score: f64,
}

impl LineSegment {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64, score: f64) -> Self {
        Self { x1, y1, x2, y2, score }
    }

    pub fn length(&self) -> f64 {
        ((self.x2 - self.x1).powi(2) + (self.y2 - self.y1).powi(2)).sqrt()
    }

    /// Segment direction reduced to `[0, pi)`.
    pub fn angle(&self) -> f64 {
        crate::orientation::normalize_angle((self.y2 - self.y1).atan2(self.x2 - self.x1))
    }
}

/// Output serialization formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmentFormat {
    #[default]
    Text,
    Json,
    Svg,
}

impl std::str::FromStr for SegmentFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(SegmentFormat::Text),
            "json" => Ok(SegmentFormat::Json),
            "svg" => Ok(SegmentFormat::Svg),
            other => Err(Error::Param(format!(
                "unknown format {other:?} (expected text, json, or svg)"
            ))),
        }
    }
}

/// Computes a segment from an accepted region.
///
/// The line is refit on the final pixel set; each pixel is projected as
/// `t = (x - c_x)*cos(theta) + (y - c_y)*sin(theta)` and the endpoints sit at
/// the extreme projections. The score is the region's weighted size.
pub fn extract_endpoints(region: &Region) -> Result<LineSegment> {
    let fit = fit_region(&region.pixels)?;
    let (cx, cy) = fit.center;
    let (sin_t, cos_t) = fit.angle.sin_cos();
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    for p in &region.pixels {
        let t = (f64::from(p.x) - cx) * cos_t + (f64::from(p.y) - cy) * sin_t;
        t_min = t_min.min(t);
        t_max = t_max.max(t);
    }
    if !(t_max - t_min > 0.0) {
        return Err(Error::Degenerate(
            "all pixels project to a single point".into(),
        ));
    }
    Ok(LineSegment {
        x1: cx + t_min * cos_t,
        y1: cy + t_min * sin_t,
        x2: cx + t_max * cos_t,
        y2: cy + t_max * sin_t,
        score: region_size(region),
    })
}

/// Serializes segments in the requested format. `image_dims` is `(width,
/// height)` and only affects the SVG canvas.
pub fn serialize(
    segments: &[LineSegment],
    format: SegmentFormat,
    image_dims: (usize, usize),
) -> Result<Vec<u8>> {
    let text = match format {
        SegmentFormat::Text => {
            let mut out = String::new();
            for s in segments {
                out.push_str(&format!(
                    "{:.6} {:.6} {:.6} {:.6} {:.6}\n",
                    s.x1, s.y1, s.x2, s.y2, s.score
                ));
            }
            out
        }
        SegmentFormat::Json => {
            serde_json::to_string_pretty(segments).expect("segments serialize")
        }
        SegmentFormat::Svg => {
            let (w, h) = image_dims;
            let mut out = format!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
            );
            for s in segments {
                out.push_str(&format!(
                    "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"red\" stroke-width=\"1\"/>\n",
                    s.x1, s.y1, s.x2, s.y2
                ));
            }
            out.push_str("</svg>\n");
            out
        }
    };
    Ok(text.into_bytes())
}

/// Parses the text form: one `x1 y1 x2 y2 [score]` per line, blank lines
/// skipped. A missing score defaults to 1.
pub fn parse_text(data: &str) -> Result<Vec<LineSegment>> {
    let mut out = Vec::new();
    for (lineno, line) in data.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::Format(format!("line {}: bad number {t:?}", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        match fields.len() {
            4 => out.push(LineSegment::new(fields[0], fields[1], fields[2], fields[3], 1.0)),
            5 => out.push(LineSegment::new(
                fields[0], fields[1], fields[2], fields[3], fields[4],
            )),
            n => {
                return Err(Error::Format(format!(
                    "line {}: expected 4 or 5 fields, got {n}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Parses the JSON form: an array of objects with `x1 y1 x2 y2 score`.
pub fn parse_json(data: &str) -> Result<Vec<LineSegment>> {
    serde_json::from_str(data).map_err(|e| Error::Format(format!("segment json: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growing::{point_line_distance, RegionPixel};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn region_of(pixels: Vec<(u32, u32, f64)>) -> Region {
        Region {
            pixels: pixels
                .into_iter()
                .map(|(x, y, weight)| RegionPixel { x, y, weight })
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
    fn horizontal_run_endpoints() {
        let r = region_of((0..10).map(|x| (x, 0, 1.0)).collect());
        let s = extract_endpoints(&r).unwrap();
        assert_abs_diff_eq!(s.x1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.y1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x2, 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.y2, 0.0, epsilon = 1e-12);
        assert_eq!(s.score, 10.0);
        assert_abs_diff_eq!(s.length(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn vertical_run_endpoints() {
        let r = region_of((2..8).map(|y| (3, y, 1.0)).collect());
        let s = extract_endpoints(&r).unwrap();
        assert_abs_diff_eq!(s.x1, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.y1, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x2, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.y2, 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.angle(), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn endpoints_lie_on_the_fitted_line_and_span_all_projections() {
        let pixels: Vec<(u32, u32, f64)> = (0..30)
            .map(|k| (10 + k, 20 + k / 3, 0.3 + 0.02 * (k % 4) as f64))
            .collect();
        let r = region_of(pixels);
        let fit = fit_region(&r.pixels).unwrap();
        let s = extract_endpoints(&r).unwrap();
        assert!(point_line_distance((s.x1, s.y1), fit.center, fit.angle) < 1e-9);
        assert!(point_line_distance((s.x2, s.y2), fit.center, fit.angle) < 1e-9);
        let (sin_t, cos_t) = fit.angle.sin_cos();
        let t1 = (s.x1 - fit.center.0) * cos_t + (s.y1 - fit.center.1) * sin_t;
        let t2 = (s.x2 - fit.center.0) * cos_t + (s.y2 - fit.center.1) * sin_t;
        for p in &r.pixels {
            let t = (f64::from(p.x) - fit.center.0) * cos_t + (f64::from(p.y) - fit.center.1) * sin_t;
            assert!(t >= t1 - 1e-12 && t <= t2 + 1e-12);
        }
        assert_abs_diff_eq!(s.length(), t2 - t1, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_regions_error() {
        assert!(extract_endpoints(&region_of(vec![(5, 5, 1.0)])).is_err());
    }

    #[test]
    fn text_format_contract() {
        let out = serialize(&[], SegmentFormat::Text, (10, 10)).unwrap();
        assert!(out.is_empty());

        let s = LineSegment::new(0.0, 0.0, 9.0, 0.0, 10.0);
        let out = serialize(&[s], SegmentFormat::Text, (10, 10)).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "0.000000 0.000000 9.000000 0.000000 10.000000\n"
        );
    }

    #[test]
    fn text_and_json_round_trip() {
        let segs = vec![
            LineSegment::new(0.25, 1.5, 9.125, 4.75, 12.5),
            LineSegment::new(3.0, 3.0, 3.0, 8.0, 6.0),
        ];
        let txt = serialize(&segs, SegmentFormat::Text, (10, 10)).unwrap();
        let parsed = parse_text(std::str::from_utf8(&txt).unwrap()).unwrap();
        assert_eq!(parsed, segs);

        let json = serialize(&segs, SegmentFormat::Json, (10, 10)).unwrap();
        let parsed = parse_json(std::str::from_utf8(&json).unwrap()).unwrap();
        assert_eq!(parsed, segs);

        // Text truncates to six decimals; a second pass is a fixed point.
        let odd = vec![LineSegment::new(1.0 / 3.0, 0.1234567, 2.0, 3.0, 5.0)];
        let once = serialize(&odd, SegmentFormat::Text, (10, 10)).unwrap();
        let reparsed = parse_text(std::str::from_utf8(&once).unwrap()).unwrap();
        let twice = serialize(&reparsed, SegmentFormat::Text, (10, 10)).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn text_parser_flags_malformed_lines() {
        assert!(parse_text("1 2 3\n").is_err());
        assert!(parse_text("1 2 3 x\n").is_err());
        assert_eq!(parse_text("\n# comment\n1 2 3 4\n").unwrap().len(), 1);
        assert_eq!(parse_text("1 2 3 4\n").unwrap()[0].score, 1.0);
    }

    #[test]
    fn svg_contains_line_elements() {
        let segs = vec![LineSegment::new(1.0, 2.0, 30.0, 40.0, 3.0)];
        let out = serialize(&segs, SegmentFormat::Svg, (64, 48)).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("width=\"64\" height=\"48\""));
        assert!(text.contains("<line x1=\"1.000\" y1=\"2.000\" x2=\"30.000\" y2=\"40.000\""));
    }
}
