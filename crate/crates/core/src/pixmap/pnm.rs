//! Binary PGM (`P5`) and PPM (`P6`) with maxval 255.

use super::{GrayImage, LoadedImage, RgbImage};
use crate::error::{Error, Result};

struct HeaderReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or_else(|| Error::format(start as u64, format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format(
                start as u64,
                format!("expected {what} as a decimal number"),
            ));
        }
        Ok(value)
    }
}

pub(super) fn decode(data: &[u8]) -> Result<LoadedImage> {
    let channels = match data.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(Error::format(0, "expected P5 or P6 magic")),
    };
    let mut rd = HeaderReader { data, pos: 2 };
    let width = rd.read_number("width")?;
    let height = rd.read_number("height")?;
    let maxval_pos = rd.pos;
    let maxval = rd.read_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::format(
            2,
            format!("zero image dimension {width}x{height}"),
        ));
    }
    if maxval != 255 {
        return Err(Error::format(
            maxval_pos as u64,
            format!("maxval {maxval} unsupported, only 255"),
        ));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match data.get(rd.pos) {
        Some(b) if b.is_ascii_whitespace() => rd.pos += 1,
        _ => {
            return Err(Error::format(
                rd.pos as u64,
                "expected a single whitespace byte after maxval",
            ))
        }
    }

    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::format(2, "image dimensions overflow"))?;
    let raster = &data[rd.pos..];
    if raster.len() < needed {
        return Err(Error::format(
            data.len() as u64,
            format!(
                "truncated raster: expected {needed} bytes after header at byte {}, found {}",
                rd.pos,
                raster.len()
            ),
        ));
    }
    let raster = &raster[..needed];

    if channels == 1 {
        Ok(LoadedImage::Gray(GrayImage::new(
            width,
            height,
            raster.to_vec(),
        )?))
    } else {
        let pixels = raster.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(LoadedImage::Rgb(RgbImage::new(width, height, pixels)?))
    }
}

pub(super) fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub(super) fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().flatten());
    out
}
