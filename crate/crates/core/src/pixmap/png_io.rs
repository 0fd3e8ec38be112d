//! 8-bit gray / RGB PNG through the `png` crate.

use std::cell::Cell;
use std::io::{BufRead, Cursor, Read, Seek, SeekFrom};
use std::rc::Rc;

use super::{GrayImage, LoadedImage, RgbImage};
use crate::error::{Error, Result};

/// Tracks how far the decoder has read so failures can report a byte offset.
struct TrackedCursor<'a> {
    inner: Cursor<&'a [u8]>,
    high_water: Rc<Cell<u64>>,
}

impl TrackedCursor<'_> {
    fn note(&self) {
        let pos = self.inner.position();
        if pos > self.high_water.get() {
            self.high_water.set(pos);
        }
    }
}

impl Read for TrackedCursor<'_> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.note();
        Ok(n)
    }
}

impl BufRead for TrackedCursor<'_> {
    fn fill_buf(&mut self) -> std::io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.inner.consume(amt);
        self.note();
    }
}

impl Seek for TrackedCursor<'_> {
    fn seek(&mut self, pos: SeekFrom) -> std::io::Result<u64> {
        let p = self.inner.seek(pos)?;
        self.note();
        Ok(p)
    }
}

pub(super) fn decode(data: &[u8]) -> Result<LoadedImage> {
    let high_water = Rc::new(Cell::new(0));
    let reader = TrackedCursor {
        inner: Cursor::new(data),
        high_water: Rc::clone(&high_water),
    };
    let fail = |e: png::DecodingError| Error::format(high_water.get(), format!("png: {e}"));

    let mut decoder = png::Decoder::new(reader);
    // Palette and sub-byte gray are widened to 8-bit; 16-bit and alpha stay
    // visible so they can be rejected below.
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(fail)?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::format(
            0,
            format!("unsupported PNG bit depth {depth:?}; only 8-bit"),
        ));
    }
    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::format(
                0,
                format!("unsupported PNG color type {other:?}; only gray or RGB"),
            ))
        }
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format(0, "PNG dimensions overflow"))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(fail)?;
    let width = info.width as usize;
    let height = info.height as usize;
    let line = info.line_size;

    let mut packed = Vec::with_capacity(width * height * channels);
    for row in buf.chunks(line).take(height) {
        packed.extend_from_slice(&row[..width * channels]);
    }

    if channels == 1 {
        Ok(LoadedImage::Gray(GrayImage::new(width, height, packed)?))
    } else {
        let pixels = packed.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(LoadedImage::Rgb(RgbImage::new(width, height, pixels)?))
    }
}

pub(super) fn encode_gray(width: usize, height: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    let to_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| Error::argument(format!("dimension {v} too large for PNG")))
    };
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, to_u32(width)?, to_u32(height)?);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let enc_err = |e: png::EncodingError| Error::argument(format!("png encode: {e}"));
        let mut writer = encoder.write_header().map_err(enc_err)?;
        writer.write_image_data(pixels).map_err(enc_err)?;
        writer.finish().map_err(enc_err)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode_rgb(width: u32, height: u32, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, width, height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(data).unwrap();
        w.finish().unwrap();
        out
    }

    #[test]
    fn gray_round_trip() {
        let px: Vec<u8> = (0..=255).cycle().take(7 * 5).collect();
        let bytes = encode_gray(7, 5, &px).unwrap();
        assert_eq!(
            decode(&bytes).unwrap(),
            LoadedImage::Gray(GrayImage::new(7, 5, px).unwrap())
        );
    }

    #[test]
    fn rgb_decodes_to_rgb() {
        let bytes = encode_rgb(2, 1, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(
            decode(&bytes).unwrap(),
            LoadedImage::Rgb(RgbImage::new(2, 1, vec![[1, 2, 3], [4, 5, 6]]).unwrap())
        );
    }

    #[test]
    fn truncated_png_is_format_error() {
        let bytes = encode_gray(16, 16, &[77; 256]).unwrap();
        let cut = &bytes[..bytes.len() - 20];
        match decode(cut) {
            Err(Error::Format { offset, .. }) => assert!(offset > 0),
            other => panic!("expected format error, got {other:?}"),
        }
    }
}
