//! Synthetic license-plate images with pixel-exact ground truth.
//!
//! A plate is a light field with a row of blocky digits drawn from a 3x5
//! cell font. Degradation is applied in this order: a horizontal linear
//! illumination ramp, a box blur, then salt-and-pepper noise.

use super::lcg::Lcg64;
use crate::error::{Error, Result};
use crate::pixmap::{BinaryImage, GrayImage};

/// Gray level of text in an undegraded plate.
pub const TEXT_GRAY: u8 = 30;
/// Gray level of the plate background in an undegraded plate.
pub const BACKGROUND_GRAY: u8 = 220;

/// Smallest plate side accepted by [`synth_plate`].
pub const MIN_SIDE: usize = 32;

/// Default plate size for generated corpora.
pub const DEFAULT_PLATE_SIZE: (usize, usize) = (288, 96);

/// Seven-segment digits 0-9. Bits, high to low: top, upper-left,
/// upper-right, middle, lower-left, lower-right, bottom.
const SEGMENTS: [u8; 10] = [
    0b111_0111, 0b001_0010, 0b101_1101, 0b101_1011, 0b011_1010, 0b110_1011, 0b110_1111, 0b101_0010,
    0b111_1111, 0b111_1011,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationSpec {
    /// Peak illumination offset in gray levels; the ramp runs from
    /// `-amplitude` at the left edge to `+amplitude` at the right.
    pub amplitude: u8,
    /// Fraction of pixels replaced by salt-and-pepper noise.
    pub noise_rate: f64,
    /// Box blur radius; the window is `2r + 1` square.
    pub blur_radius: u32,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn new(amplitude: u8, noise_rate: f64, blur_radius: u32, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise_rate) {
            return Err(Error::argument(format!(
                "noise rate {noise_rate} outside [0, 1]"
            )));
        }
        Ok(DegradationSpec {
            amplitude,
            noise_rate,
            blur_radius,
            seed,
        })
    }

    /// No degradation at all.
    pub fn clean(seed: u64) -> Self {
        DegradationSpec {
            amplitude: 0,
            noise_rate: 0.0,
            blur_radius: 0,
            seed,
        }
    }
}

/// Renders the text mask: `true` where a glyph stroke covers the pixel.
///
/// Glyphs are two-to-one tall seven-segment digits centered on the plate,
/// with strokes about a fourteenth of the glyph height.
fn render_glyphs(rng: &mut Lcg64, w: usize, h: usize) -> Vec<bool> {
    let mut mask = vec![false; w * h];
    let margin_y = h / 6;
    let glyph_h = h - 2 * margin_y;
    let glyph_w = glyph_h / 2;
    let stroke = (glyph_h / 14).max(2);
    let gap = (glyph_w / 3).max(2);
    let margin_x = w / 16 + 1;
    let usable = w - 2 * margin_x;
    let count = ((usable + gap) / (glyph_w + gap)).max(1);
    let used = count * glyph_w + (count - 1) * gap;
    let left = margin_x + usable.saturating_sub(used) / 2;

    let mid = (glyph_h - stroke) / 2;
    // (x0, y0, x1, y1) relative to the glyph origin, in SEGMENTS bit order
    let rects = [
        (0, 0, glyph_w, stroke),
        (0, 0, stroke, mid + stroke),
        (glyph_w - stroke, 0, glyph_w, mid + stroke),
        (0, mid, glyph_w, mid + stroke),
        (0, mid, stroke, glyph_h),
        (glyph_w - stroke, mid, glyph_w, glyph_h),
        (0, glyph_h - stroke, glyph_w, glyph_h),
    ];

    for g in 0..count {
        let segments = SEGMENTS[rng.below(10) as usize];
        let gx = left + g * (glyph_w + gap);
        for (i, &(x0, y0, x1, y1)) in rects.iter().enumerate() {
            if segments & (0b100_0000 >> i) == 0 {
                continue;
            }
            for y in margin_y + y0..margin_y + y1 {
                for x in gx + x0..(gx + x1).min(w) {
                    mask[y * w + x] = true;
                }
            }
        }
    }
    mask
}

/// Adds `amplitude * (2x / (w - 1) - 1)` to every column: the left edge is
/// darkened by `amplitude`, the right edge brightened by it, and the mean
/// level is unchanged.
fn apply_ramp(px: &mut [i32], w: usize, amplitude: u8) {
    if amplitude == 0 {
        return;
    }
    let span = (w - 1).max(1) as f64;
    let offsets: Vec<i32> = (0..w)
        .map(|x| ((2.0 * x as f64 / span - 1.0) * f64::from(amplitude) + 0.5).floor() as i32)
        .collect();
    for row in px.chunks_mut(w) {
        for (v, off) in row.iter_mut().zip(&offsets) {
            *v += off;
        }
    }
}

/// Mean over a `(2r+1)^2` window with replicated borders, rounded half up.
fn box_blur(px: &[u8], w: usize, h: usize, radius: u32) -> Vec<u8> {
    if radius == 0 {
        return px.to_vec();
    }
    let r = radius as isize;
    let n = (2 * r + 1) as u32;
    let clamp = |v: isize, len: usize| v.clamp(0, len as isize - 1) as usize;

    let mut horiz = vec![0u32; w * h];
    for y in 0..h {
        for x in 0..w {
            horiz[y * w + x] = (-r..=r)
                .map(|d| u32::from(px[y * w + clamp(x as isize + d, w)]))
                .sum();
        }
    }
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let sum: u32 = (-r..=r)
                .map(|d| horiz[clamp(y as isize + d, h) * w + x])
                .sum();
            let area = n * n;
            out[y * w + x] = ((sum + area / 2) / area) as u8;
        }
    }
    out
}

/// Draws a plate and its degraded rendering. Deterministic in
/// `(spec, w, h)`.
pub fn synth_plate(spec: &DegradationSpec, w: usize, h: usize) -> Result<(GrayImage, BinaryImage)> {
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::argument(format!(
            "synthetic plates need at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}"
        )));
    }
    let mut rng = Lcg64::new(spec.seed);
    let mask = render_glyphs(&mut rng, w, h);
    let truth = BinaryImage::from_fn(w, h, |x, y| !mask[y * w + x]);

    let mut px: Vec<i32> = mask
        .iter()
        .map(|&t| i32::from(if t { TEXT_GRAY } else { BACKGROUND_GRAY }))
        .collect();
    apply_ramp(&mut px, w, spec.amplitude);
    let lit: Vec<u8> = px.iter().map(|&v| v.clamp(0, 255) as u8).collect();
    let mut gray = box_blur(&lit, w, h, spec.blur_radius);

    if spec.noise_rate > 0.0 {
        for v in &mut gray {
            if rng.next_f64() < spec.noise_rate {
                *v = if rng.next_u32() & 0x8000_0000 == 0 {
                    0
                } else {
                    255
                };
            }
        }
    }

    Ok((GrayImage::new(w, h, gray)?, truth))
}

/// Inclusive parameter ranges from which corpus entries are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationRanges {
    pub amplitude: (u8, u8),
    pub noise_rate: (f64, f64),
    pub blur_radius: (u32, u32),
}

impl Default for DegradationRanges {
    fn default() -> Self {
        DegradationRanges {
            amplitude: (120, 200),
            noise_rate: (0.0, 0.02),
            blur_radius: (0, 1),
        }
    }
}

impl DegradationRanges {
    pub fn validate(&self) -> Result<()> {
        let (a0, a1) = self.amplitude;
        let (n0, n1) = self.noise_rate;
        let (b0, b1) = self.blur_radius;
        if a0 > a1 || b0 > b1 || !(0.0..=n1).contains(&n0) || n1 > 1.0 {
            return Err(Error::argument(format!(
                "invalid degradation ranges {self:?}"
            )));
        }
        Ok(())
    }
}

/// Draws `count` degradation specs from `ranges`, deterministic in `seed`.
pub fn corpus_specs(
    count: usize,
    ranges: &DegradationRanges,
    seed: u64,
) -> Result<Vec<DegradationSpec>> {
    ranges.validate()?;
    let mut rng = Lcg64::new(seed);
    let span_u32 = |lo: u32, hi: u32, rng: &mut Lcg64| lo + rng.below(hi - lo + 1);
    (0..count)
        .map(|_| {
            let amplitude = span_u32(
                u32::from(ranges.amplitude.0),
                u32::from(ranges.amplitude.1),
                &mut rng,
            ) as u8;
            let (n0, n1) = ranges.noise_rate;
            let noise_rate = n0 + (n1 - n0) * rng.next_f64();
            let blur_radius = span_u32(ranges.blur_radius.0, ranges.blur_radius.1, &mut rng);
            DegradationSpec::new(amplitude, noise_rate, blur_radius, rng.next_u64())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undegraded_plate_is_two_levels_matching_truth() {
        let (gray, truth) = synth_plate(&DegradationSpec::clean(5), 120, 40).unwrap();
        for (g, t) in gray.pixels().iter().zip(truth.pixels()) {
            let expected = if *t == 0 { TEXT_GRAY } else { BACKGROUND_GRAY };
            assert_eq!(*g, expected);
        }
        let black = truth.pixels().iter().filter(|&&v| v == 0).count();
        assert!(black > 0 && black < truth.pixels().len() / 2, "{black}");
    }

    #[test]
    fn same_spec_same_bytes() {
        let spec = DegradationSpec::new(150, 0.05, 1, 1234).unwrap();
        assert_eq!(
            synth_plate(&spec, 96, 32).unwrap(),
            synth_plate(&spec, 96, 32).unwrap()
        );
    }

    #[test]
    fn different_seeds_draw_different_text() {
        let a = synth_plate(&DegradationSpec::clean(1), 160, 48).unwrap().1;
        let b = synth_plate(&DegradationSpec::clean(2), 160, 48).unwrap().1;
        assert_ne!(a, b);
    }

    #[test]
    fn full_noise_rate_replaces_every_pixel() {
        let spec = DegradationSpec::new(0, 1.0, 0, 3).unwrap();
        let (gray, _) = synth_plate(&spec, 64, 32).unwrap();
        assert!(gray.pixels().iter().all(|&v| v == 0 || v == 255));
        assert!(gray.pixels().contains(&0) && gray.pixels().contains(&255));
    }

    #[test]
    fn ramp_brightens_rightwards() {
        let spec = DegradationSpec::new(80, 0.0, 0, 9).unwrap();
        let (gray, truth) = synth_plate(&spec, 64, 32).unwrap();
        // top row is background
        assert!((0..64).all(|x| truth.is_white(x, 0)));
        assert_eq!(gray.get(0, 0), BACKGROUND_GRAY - 80);
        assert_eq!(gray.get(63, 0), 255);
        let row: Vec<u8> = (0..64).map(|x| gray.get(x, 0)).collect();
        assert!(row.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn blur_averages_window() {
        let px = [0, 0, 0, 0, 90, 0, 0, 0, 0];
        assert_eq!(box_blur(&px, 3, 3, 1)[4], 10);
        assert_eq!(box_blur(&px, 3, 3, 0), px.to_vec());
    }

    #[test]
    fn small_plates_are_rejected() {
        assert!(synth_plate(&DegradationSpec::clean(0), 31, 40).is_err());
        assert!(DegradationSpec::new(0, 1.5, 0, 0).is_err());
    }

    #[test]
    fn corpus_specs_respect_ranges() {
        let r = DegradationRanges::default();
        let specs = corpus_specs(50, &r, 77).unwrap();
        assert_eq!(specs, corpus_specs(50, &r, 77).unwrap());
        for s in &specs {
            assert!((120..=200).contains(&s.amplitude));
            assert!((0.0..=0.02).contains(&s.noise_rate));
            assert!(s.blur_radius <= 1);
        }
        assert!(corpus_specs(0, &r, 1).unwrap().is_empty());
    }
}
