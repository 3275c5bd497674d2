//! Image preprocessing for the vision branch.
//!
//! Grayscale rasters are bilinearly resized to a square (warping the aspect
//! ratio rather than padding), scaled to `[0,1]` and replicated to three
//! identical channels. Standardization with fixed mean 0.5 / std 0.5 is a
//! separate step so the stored sample keeps its `[0,1]` range.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Decoded 8-bit grayscale raster.
#[derive(Debug, Clone)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, `height * width` bytes.
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<GrayImage> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::data(format!(
                "raster: {width}x{height} does not match {} pixel bytes",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }
}

/// Preprocessed model input; three identical channels in `[0,1]`.
#[derive(Debug, Clone)]
pub struct ImageSample {
    /// `[3, S, S]`.
    pub pixels: Tensor,
    pub source_size: (usize, usize),
}

impl ImageSample {
    pub fn side(&self) -> usize {
        self.pixels.dim(1)
    }

    /// `(x - 0.5) / 0.5`, the network's actual input.
    pub fn standardized(&self) -> Tensor {
        let mut t = self.pixels.clone();
        for v in t.data_mut() {
            *v = (*v - 0.5) / 0.5;
        }
        t
    }
}

/// Bilinear sample at half-pixel-aligned continuous coordinates.
fn bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    let w = img.width;
    let h = img.height;
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let x0 = crate::math::floor(x) as usize;
    let y0 = crate::math::floor(y) as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let p = |yy: usize, xx: usize| img.pixels[yy * w + xx] as f64;
    let top = p(y0, x0) * (1.0 - fx) + p(y0, x1) * fx;
    let bot = p(y1, x0) * (1.0 - fx) + p(y1, x1) * fx;
    top * (1.0 - fy) + bot * fy
}

/// Resizes to `target x target` ignoring aspect ratio, scales to `[0,1]`
/// and replicates the grayscale channel three times.
pub fn preprocess_image(raw: &GrayImage, target: usize) -> Result<ImageSample> {
    if target == 0 {
        return Err(Error::config("preprocess: target size must be >= 1"));
    }
    if raw.pixels.is_empty() {
        return Err(Error::data("preprocess: empty raster"));
    }
    let mut pixels = Tensor::zeros(&[3, target, target]);
    let sx = raw.width as f64 / target as f64;
    let sy = raw.height as f64 / target as f64;
    {
        let data = pixels.data_mut();
        for oy in 0..target {
            let y = (oy as f64 + 0.5) * sy - 0.5;
            for ox in 0..target {
                let x = (ox as f64 + 0.5) * sx - 0.5;
                data[oy * target + ox] = bilinear(raw, x, y) / 255.0;
            }
        }
        let plane = target * target;
        let (first, rest) = data.split_at_mut(plane);
        rest[..plane].copy_from_slice(first);
        rest[plane..].copy_from_slice(first);
    }
    Ok(ImageSample {
        pixels,
        source_size: (raw.height, raw.width),
    })
}
