//! Gray conversion and 3x3 median denoising.

use rayon::prelude::*;

use crate::pixmap::{GrayImage, RgbImage};

/// Channel weights in hundredths.
///
/// Note the weights are 0.59 on red and 0.30 on green, the reverse of the
/// usual luma convention. They are kept as published for fidelity with the
/// reference method.
const RED_WEIGHT: u32 = 59;
const GREEN_WEIGHT: u32 = 30;
const BLUE_WEIGHT: u32 = 11;

/// Converts one color pixel to gray: `round(0.59 R + 0.30 G + 0.11 B)`.
///
/// Evaluated in integer hundredths so round-half-up is exact.
pub fn gray_value([r, g, b]: [u8; 3]) -> u8 {
    let weighted =
        RED_WEIGHT * u32::from(r) + GREEN_WEIGHT * u32::from(g) + BLUE_WEIGHT * u32::from(b);
    // weights sum to 100, so the result never exceeds 255
    ((weighted + 50) / 100) as u8
}

pub fn to_gray(img: &RgbImage) -> GrayImage {
    let pixels = img.pixels().iter().map(|&p| gray_value(p)).collect();
    GrayImage::new(img.width(), img.height(), pixels).expect("dimensions carried over")
}

/// Median of the 3x3 window around every pixel, borders replicated.
///
/// The window includes the center pixel, so each output is the 5th of 9
/// sorted samples.
pub fn median3x3(img: &GrayImage) -> GrayImage {
    let (w, h) = img.dimensions();
    let src = img.pixels();
    let mut out = vec![0u8; w * h];

    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let rows = [
            &src[y.saturating_sub(1) * w..][..w],
            &src[y * w..][..w],
            &src[(y + 1).min(h - 1) * w..][..w],
        ];
        for (x, dst) in row.iter_mut().enumerate() {
            let cols = [x.saturating_sub(1), x, (x + 1).min(w - 1)];
            let mut window = [0u8; 9];
            for (i, r) in rows.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    window[i * 3 + j] = r[c];
                }
            }
            *dst = median9(window);
        }
    });

    GrayImage::new(w, h, out).expect("dimensions carried over")
}

/// Median of nine values via a partial sorting network.
fn median9(mut p: [u8; 9]) -> u8 {
    #[inline(always)]
    fn sort2(p: &mut [u8; 9], a: usize, b: usize) {
        if p[a] > p[b] {
            p.swap(a, b);
        }
    }
    // Paeth's 19-exchange median network.
    sort2(&mut p, 1, 2);
    sort2(&mut p, 4, 5);
    sort2(&mut p, 7, 8);
    sort2(&mut p, 0, 1);
    sort2(&mut p, 3, 4);
    sort2(&mut p, 6, 7);
    sort2(&mut p, 1, 2);
    sort2(&mut p, 4, 5);
    sort2(&mut p, 7, 8);
    sort2(&mut p, 0, 3);
    sort2(&mut p, 5, 8);
    sort2(&mut p, 4, 7);
    sort2(&mut p, 3, 6);
    sort2(&mut p, 1, 4);
    sort2(&mut p, 2, 5);
    sort2(&mut p, 4, 7);
    sort2(&mut p, 4, 2);
    sort2(&mut p, 6, 4);
    sort2(&mut p, 4, 2);
    p[4]
}
