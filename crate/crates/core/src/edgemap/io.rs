//! Reading and writing edge strength maps as PGM (P2/P5) and grayscale PNG.
//!
//! PGM is the canonical test format: the parser accepts ASCII `P2` and binary
//! `P5` at 8- or 16-bit depth, and the writer emits binary `P5`. PNG i/o is
//! delegated to the `image` crate and restricted to single-channel data.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::EdgeStrengthMap;

/// How raw integer samples map into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalize {
    /// Divide by the container maximum: 255 for 8-bit samples, 65535 for
    /// 16-bit samples.
    #[default]
    Auto,
    /// Always divide by 255.
    Fixed255,
    /// Take samples as-is; fails if any raw value exceeds 1.
    None,
}

impl std::str::FromStr for Normalize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Normalize::Auto),
            "fixed-255" => Ok(Normalize::Fixed255),
            "none" => Ok(Normalize::None),
            other => Err(Error::Param(format!(
                "unknown normalization {other:?} (expected auto, fixed-255, or none)"
            ))),
        }
    }
}

/// Raw single-channel integer image, before normalization.
#[derive(Debug, Clone)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major samples; `container_max` tells whether they are 8- or 16-bit.
    pub samples: Vec<u16>,
    /// 255 for 8-bit containers, 65535 for 16-bit containers.
    pub container_max: u16,
}

impl GrayImage {
    pub fn normalize(&self, mode: Normalize) -> Result<EdgeStrengthMap> {
        let divisor = match mode {
            Normalize::Auto => f64::from(self.container_max),
            Normalize::Fixed255 => 255.0,
            Normalize::None => {
                if let Some(v) = self.samples.iter().find(|&&v| v > 1) {
                    return Err(Error::Format(format!(
                        "normalize=none requires raw values in {{0, 1}}, found {v}"
                    )));
                }
                1.0
            }
        };
        let values = self.samples.iter().map(|&v| f64::from(v) / divisor).collect();
        EdgeStrengthMap::new(self.width, self.height, values)
    }

    /// Samples as f64 luma values, for the gradient fallback detector.
    pub fn luma(&self) -> Vec<f64> {
        self.samples.iter().map(|&v| f64::from(v)).collect()
    }
}

/// Loads a single-channel image (PGM or PNG, sniffed from the file content).
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match bytes.first() {
        Some(b'P') => parse_pgm(&bytes),
        Some(0x89) => decode_png(&bytes),
        _ => Err(Error::Format(format!(
            "{}: not a PGM or PNG file",
            path.display()
        ))),
    }
}

/// Loads an edge strength map from a PGM or PNG file.
pub fn load_edge_map(path: impl AsRef<Path>, normalize: Normalize) -> Result<EdgeStrengthMap> {
    load_gray(path)?.normalize(normalize)
}

/// Writes a map as binary 8-bit PGM (`P5`, maxval 255).
pub fn save_pgm(map: &EdgeStrengthMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("P5\n{} {}\n255\n", map.width(), map.height()).into_bytes();
    out.extend(map.values().iter().map(|&v| quantize_u8(v)));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes a map as ASCII 8-bit PGM (`P2`, maxval 255).
pub fn save_pgm_ascii(map: &EdgeStrengthMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("P2\n{} {}\n255\n", map.width(), map.height());
    for row in map.values().chunks(map.width()) {
        let line: Vec<String> = row.iter().map(|&v| quantize_u8(v).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes a map as 8-bit grayscale PNG.
pub fn save_png(map: &EdgeStrengthMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let pixels: Vec<u8> = map.values().iter().map(|&v| quantize_u8(v)).collect();
    let img = image::GrayImage::from_raw(map.width() as u32, map.height() as u32, pixels)
        .expect("buffer matches dimensions");
    img.save(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn quantize_u8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Format(format!("png decode failed: {e}")))?;
    match img {
        image::DynamicImage::ImageLuma8(g) => Ok(GrayImage {
            width: g.width() as usize,
            height: g.height() as usize,
            samples: g.into_raw().into_iter().map(u16::from).collect(),
            container_max: 255,
        }),
        image::DynamicImage::ImageLuma16(g) => Ok(GrayImage {
            width: g.width() as usize,
            height: g.height() as usize,
            samples: g.into_raw(),
            container_max: 65535,
        }),
        other => Err(Error::Format(format!(
            "expected single-channel PNG, got {:?}",
            other.color()
        ))),
    }
}

/// PGM parser for `P2` (ASCII) and `P5` (binary), 8- and 16-bit.
fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let magic = bytes.get(..2).ok_or_else(|| err_pgm("truncated header"))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        b"P6" | b"P3" => return Err(err_pgm("PPM is multi-channel; expected grayscale PGM")),
        _ => return Err(err_pgm("unknown PNM magic")),
    };

    let mut pos = 2;
    let width = read_header_int(bytes, &mut pos)?;
    let height = read_header_int(bytes, &mut pos)?;
    let maxval = read_header_int(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err(err_pgm("zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(err_pgm("maxval out of range"));
    }
    let (wide, container_max) = if maxval > 255 {
        (true, 65535u16)
    } else {
        (false, 255u16)
    };

    let count = width * height;
    let samples = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let bpp = if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + count * bpp)
            .ok_or_else(|| err_pgm("truncated raster"))?;
        if wide {
            raster
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect()
        } else {
            raster.iter().map(|&b| u16::from(b)).collect()
        }
    } else {
        let mut vals = Vec::with_capacity(count);
        for _ in 0..count {
            vals.push(read_header_int(bytes, &mut pos)? as u16);
        }
        vals
    };

    if let Some(&v) = samples.iter().find(|&&v| usize::from(v) > maxval) {
        return Err(err_pgm(&format!("sample {v} exceeds maxval {maxval}")));
    }
    Ok(GrayImage {
        width,
        height,
        samples,
        container_max,
    })
}

/// Reads one whitespace-delimited integer, skipping `#` comments.
fn read_header_int(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_digit() => break,
            Some(_) => return Err(err_pgm("unexpected byte in header")),
            None => return Err(err_pgm("truncated header")),
        }
    }
    let mut value: usize = 0;
    while let Some(&b) = bytes.get(*pos) {
        if !b.is_ascii_digit() {
            break;
        }
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add(usize::from(b - b'0')))
            .ok_or_else(|| err_pgm("integer overflow in header"))?;
        *pos += 1;
    }
    Ok(value)
}

fn err_pgm(msg: &str) -> Error {
    Error::Format(format!("pgm: {msg}"))
}
