//! Image containers and file I/O.
//!
//! All containers are row-major with a top-left origin; pixel `(x, y)` is
//! column `x`, row `y`. Containers are immutable once built.
//!
//! Supported files: binary PGM (`P5`), binary PPM (`P6`), both with maxval
//! 255, and 8-bit gray or RGB PNG.

mod png_io;
mod pnm;

use std::borrow::Cow;
use std::path::Path;

use crate::error::{Error, Result};

pub const BLACK: u8 = 0;
pub const WHITE: u8 = 255;

/// Round-half-up a real value to a byte, clamping to `[0, 255]`.
///
/// Every fractional-to-byte conversion in the crate goes through this.
pub fn quantize(value: f64) -> u8 {
    (value + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::argument(format!(
            "image dimensions must be non-zero, got {width}x{height}"
        )));
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        _ => Err(Error::argument(format!(
            "{width}x{height} image needs {} pixels, got {len}",
            width.saturating_mul(height)
        ))),
    }
}

/// Integer rectangle inside an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl RegionRect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::argument(format!("empty region {w}x{h}")));
        }
        Ok(RegionRect { x, y, w, h })
    }

    /// The rectangle covering a whole `width` x `height` image.
    pub fn full(width: usize, height: usize) -> Self {
        RegionRect {
            x: 0,
            y: 0,
            w: width,
            h: height,
        }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    /// Fails with a bounds error unless the rect is non-empty and lies
    /// inside a `width` x `height` image.
    pub fn check_within(&self, width: usize, height: usize) -> Result<()> {
        let fits = self.w > 0
            && self.h > 0
            && self.x.checked_add(self.w).is_some_and(|r| r <= width)
            && self.y.checked_add(self.h).is_some_and(|b| b <= height);
        if fits {
            Ok(())
        } else {
            Err(Error::Bounds {
                x: self.x,
                y: self.y,
                w: self.w,
                h: self.h,
                width,
                height,
            })
        }
    }
}

/// 24-bit color image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

/// 8-bit gray image, the working representation of every stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Copies out the sub-image under `rect`.
    pub fn crop(&self, rect: RegionRect) -> Result<GrayImage> {
        rect.check_within(self.width, self.height)?;
        let mut pixels = Vec::with_capacity(rect.area());
        for y in rect.y..rect.y + rect.h {
            pixels.extend_from_slice(&self.row(y)[rect.x..rect.x + rect.w]);
        }
        GrayImage::new(rect.w, rect.h, pixels)
    }
}

/// Two-tone image; every pixel is [`BLACK`] or [`WHITE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if let Some(pos) = pixels.iter().position(|&v| v != BLACK && v != WHITE) {
            return Err(Error::argument(format!(
                "binary pixel {pos} has value {}, expected 0 or 255",
                pixels[pos]
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image from a per-pixel "is white" predicate.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(if f(x, y) { WHITE } else { BLACK });
            }
        }
        BinaryImage {
            width,
            height,
            pixels,
        }
    }

    pub(crate) fn from_raw_unchecked(width: usize, height: usize, pixels: Vec<u8>) -> Self {
        debug_assert!(pixels.iter().all(|&v| v == BLACK || v == WHITE));
        debug_assert_eq!(pixels.len(), width * height);
        BinaryImage {
            width,
            height,
            pixels,
        }
    }

    /// Reinterprets a gray image (e.g. a loaded ground-truth mask) as binary.
    /// Fails if any pixel is neither 0 nor 255.
    pub fn from_gray(img: GrayImage) -> Result<Self> {
        BinaryImage::new(img.width, img.height, img.pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn is_white(&self, x: usize, y: usize) -> bool {
        self.get(x, y) == WHITE
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.clone(),
        }
    }
}

/// Per-pixel fractional "likeliness to be white" in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl MembershipMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        // `contains` is false for NaN.
        if let Some(pos) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::argument(format!(
                "membership {pos} is {}, expected a value in [0, 1]",
                values[pos]
            )));
        }
        Ok(MembershipMap {
            width,
            height,
            values,
        })
    }

    pub(crate) fn from_raw_unchecked(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        MembershipMap {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Scales to bytes with `round(v * 255)`.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.values.iter().map(|&v| quantize(v * 255.0)).collect(),
        }
    }
}

/// Anything that can be written out as an 8-bit gray raster.
pub trait GrayRaster {
    fn raster_dimensions(&self) -> (usize, usize);
    fn gray_bytes(&self) -> Cow<'_, [u8]>;
}

impl GrayRaster for GrayImage {
    fn raster_dimensions(&self) -> (usize, usize) {
        self.dimensions()
    }

    fn gray_bytes(&self) -> Cow<'_, [u8]> {
        Cow::Borrowed(&self.pixels)
    }
}

impl GrayRaster for BinaryImage {
    fn raster_dimensions(&self) -> (usize, usize) {
        self.dimensions()
    }

    fn gray_bytes(&self) -> Cow<'_, [u8]> {
        Cow::Borrowed(&self.pixels)
    }
}

impl GrayRaster for MembershipMap {
    fn raster_dimensions(&self) -> (usize, usize) {
        self.dimensions()
    }

    fn gray_bytes(&self) -> Cow<'_, [u8]> {
        Cow::Owned(self.to_gray().pixels)
    }
}

/// A decoded image file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl LoadedImage {
    /// Converts to gray, applying the weighted channel formula to color input.
    pub fn into_gray(self) -> GrayImage {
        match self {
            LoadedImage::Gray(g) => g,
            LoadedImage::Rgb(rgb) => crate::preprocess::to_gray(&rgb),
        }
    }
}

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// Decodes an in-memory PGM, PPM or PNG file, sniffing the format from its
/// leading bytes.
pub fn decode_image(data: &[u8]) -> Result<LoadedImage> {
    if data.is_empty() {
        return Err(Error::format(0, "empty file"));
    }
    if data.starts_with(&PNG_SIGNATURE) {
        png_io::decode(data)
    } else if data.starts_with(b"P5") || data.starts_with(b"P6") {
        pnm::decode(data)
    } else {
        Err(Error::format(
            0,
            "unrecognized magic; expected P5, P6 or a PNG signature",
        ))
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<LoadedImage> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&data)
}

/// Output container chosen from a file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Pgm,
    Png,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(FileFormat::Pgm),
            Some("png") => Ok(FileFormat::Png),
            _ => Err(Error::argument(format!(
                "cannot infer output format from {}; use .pgm or .png",
                path.display()
            ))),
        }
    }
}

/// Encodes a gray raster in the given container.
pub fn encode_gray<R: GrayRaster + ?Sized>(img: &R, format: FileFormat) -> Result<Vec<u8>> {
    let (w, h) = img.raster_dimensions();
    let bytes = img.gray_bytes();
    match format {
        FileFormat::Pgm => Ok(pnm::encode_pgm(w, h, &bytes)),
        FileFormat::Png => png_io::encode_gray(w, h, &bytes),
    }
}

/// Writes `img` as PGM or PNG depending on the extension of `path`.
pub fn save_image<R: GrayRaster + ?Sized>(img: &R, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let data = encode_gray(img, FileFormat::from_path(path)?)?;
    std::fs::write(path, data).map_err(|e| Error::io(path, e))
}

/// Encodes a binary PPM (`P6`). Only used to produce color test inputs.
pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    pnm::encode_ppm(img)
}
