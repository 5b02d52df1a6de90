//! Binary 8-bit grayscale PGM (`P5`) images.

use std::path::Path;

use gaborface_core::ImageRaster;

use crate::error::{Error, Result};
use crate::fsutil;

pub fn read_pgm(path: &Path) -> Result<ImageRaster> {
    parse_pgm(&fsutil::read(path)?).map_err(|m| Error::format(path, m))
}

/// Decodes a `P5` image with maxval ≤ 255. Header comments are allowed.
pub fn parse_pgm(bytes: &[u8]) -> std::result::Result<ImageRaster, String> {
    let mut pos = 0;
    let mut fields = [0usize; 3];
    let magic = next_token(bytes, &mut pos).ok_or("empty file")?;
    if magic != b"P5" {
        return Err(format!(
            "expected magic P5, found {:?}",
            String::from_utf8_lossy(magic)
        ));
    }
    for (slot, what) in fields.iter_mut().zip(["width", "height", "maxval"]) {
        let tok = next_token(bytes, &mut pos).ok_or_else(|| format!("missing {what}"))?;
        *slot = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("{what} is not an integer"))?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err("width and height must be at least 1".into());
    }
    if maxval == 0 || maxval > 255 {
        return Err(format!(
            "maxval {maxval} unsupported; only 8-bit images are read"
        ));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let need = width * height;
    let data = bytes.get(pos..).unwrap_or(&[]);
    if data.len() < need {
        return Err(format!(
            "raster truncated: need {need} bytes, found {}",
            data.len()
        ));
    }
    let values = data[..need].iter().map(|&b| f64::from(b)).collect();
    ImageRaster::new(width, height, values).map_err(|e| e.to_string())
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

/// Encodes an image as `P5`, rounding and clamping intensities to 0..=255.
pub fn encode_pgm(image: &ImageRaster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(
        image
            .intensities()
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn write_pgm(path: &Path, image: &ImageRaster) -> Result<()> {
    fsutil::write_atomic(path, &encode_pgm(image))
}
