//! Tone mapping of hit counts and binary PPM (P6) output.

use std::path::Path;

use crate::error::Result;
use crate::render::Canvas;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToneMapping {
    /// White wherever a pixel was hit, black elsewhere.
    Binary,
    /// Grey level `round(255 · ln(1 + h) / ln(1 + h_max))`.
    LogDensity,
}

/// 8-bit RGB pixels, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpmImage {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<u8>,
}

impl PpmImage {
    /// `P6\n<w> <h>\n255\n` followed by the raw pixels.
    pub fn encode(&self) -> Vec<u8> {
        let header = format!("P6\n{} {}\n255\n", self.width, self.height);
        let mut bytes = Vec::with_capacity(header.len() + self.rgb.len());
        bytes.extend_from_slice(header.as_bytes());
        bytes.extend_from_slice(&self.rgb);
        bytes
    }
}

pub fn tone_map(canvas: &Canvas, mode: ToneMapping) -> PpmImage {
    let max = canvas.max_hits();
    let scale = (max as f64).ln_1p();
    let level = |h: u64| -> u8 {
        match mode {
            _ if h == 0 => 0,
            ToneMapping::Binary => 255,
            ToneMapping::LogDensity => (255.0 * (h as f64).ln_1p() / scale).round() as u8,
        }
    };
    let rgb = canvas
        .hits()
        .iter()
        .flat_map(|&h| {
            let v = level(h);
            [v, v, v]
        })
        .collect();
    PpmImage {
        width: canvas.width(),
        height: canvas.height(),
        rgb,
    }
}

pub fn write_ppm(image: &PpmImage, path: &Path) -> Result<()> {
    std::fs::write(path, image.encode())?;
    Ok(())
}
