//! Binary PGM (P5, 8-bit) reading and writing; the canonical image format
//! for datasets. PNG ingestion is available behind the `png` feature.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use docfuse_core::image::GrayImage;

/// Parses a P5 PGM with maxval 255. Header whitespace and `#` comments
/// follow the format specification.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0usize;

    fn skip_ws(bytes: &[u8], mut pos: usize) -> usize {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                return pos;
            }
        }
    }

    fn read_number(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
        let pos = skip_ws(bytes, pos);
        let start = pos;
        let mut end = pos;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if start == end {
            bail!("expected a decimal number at byte {start}");
        }
        let value: usize = std::str::from_utf8(&bytes[start..end])?.parse()?;
        Ok((value, end))
    }

    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        bail!("not a binary PGM (missing P5 magic)");
    }
    pos += 2;
    let (width, p) = read_number(bytes, pos).context("parsing width")?;
    let (height, p) = read_number(bytes, p).context("parsing height")?;
    let (maxval, p) = read_number(bytes, p).context("parsing maxval")?;
    if maxval != 255 {
        bail!("unsupported maxval {maxval} (only 8-bit, maxval 255)");
    }
    // Exactly one whitespace byte separates the header from the raster.
    if p >= bytes.len() || !bytes[p].is_ascii_whitespace() {
        bail!("missing whitespace after maxval");
    }
    let data_start = p + 1;
    let expected = width * height;
    let data = &bytes[data_start..];
    if data.len() < expected {
        bail!("raster truncated: expected {expected} bytes, found {}", data.len());
    }
    GrayImage::new(width, height, data[..expected].to_vec()).map_err(|e| anyhow::anyhow!("{e}"))
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode_pgm(&bytes).with_context(|| format!("decoding {}", path.display()))
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.pixels.len() + 32);
    write!(out, "P5\n{} {}\n255\n", img.width, img.height).unwrap();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    fs::write(path, encode_pgm(img)).with_context(|| format!("writing {}", path.display()))
}

/// Reads a grayscale raster by extension: `.pgm` always, `.png` when the
/// `png` feature is enabled.
pub fn read_raster(path: &Path) -> Result<GrayImage> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => read_pgm(path),
        #[cfg(feature = "png")]
        Some("png") => read_png(path),
        Some(other) => bail!(
            "unsupported image format '.{other}' for {} (expected .pgm{})",
            path.display(),
            if cfg!(feature = "png") { " or .png" } else { "" }
        ),
        None => bail!("image path {} has no extension", path.display()),
    }
}

#[cfg(feature = "png")]
pub fn read_png(path: &Path) -> Result<GrayImage> {
    let img = image::open(path)
        .with_context(|| format!("decoding {}", path.display()))?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    GrayImage::new(w, h, img.into_raw()).map_err(|e| anyhow::anyhow!("{e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let img = GrayImage::new(3, 2, vec![0, 64, 128, 192, 255, 10]).unwrap();
        let bytes = encode_pgm(&img);
        let back = decode_pgm(&bytes).unwrap();
        assert_eq!(back.width, 3);
        assert_eq!(back.height, 2);
        assert_eq!(back.pixels, img.pixels);
        assert_eq!(encode_pgm(&back), bytes);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# a comment\n4 1\n# another\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.pixels, vec![1, 2, 3, 4]);
    }

    #[test]
    fn bad_magic_and_truncation_are_reported() {
        assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
        let err = decode_pgm(b"P5\n4 4\n255\nab").unwrap_err();
        assert!(format!("{err}").contains("truncated"));
        assert!(decode_pgm(b"P5\n1 1\n65535\n\0\0").is_err());
    }

    #[test]
    fn raster_bytes_can_start_with_whitespace_values() {
        // 0x0a (newline) is a legal first pixel; only one separator byte
        // is consumed after the maxval.
        let mut bytes = b"P5\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[b'\n', 7]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.pixels, vec![10, 7]);
    }
}
