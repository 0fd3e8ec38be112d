//! Global Otsu thresholding, the comparison baseline.
//!
//! Picks the split `{<= k} | {> k}` that maximizes the between-class
//! variance `w0 * w1 * (mu0 - mu1)^2` of the gray-level histogram.

use crate::histeq::{region_histogram, Histogram, RegionRect};
use crate::pixmap::{BinaryImage, GrayImage, BLACK, WHITE};

/// Between-class variance of the split at `k`, from the class sizes and gray
/// sums. An empty class scores 0.
pub fn between_class_variance(n0: u64, sum0: u64, n1: u64, sum1: u64) -> f64 {
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let n = (n0 + n1) as f64;
    let w0 = n0 as f64 / n;
    let w1 = n1 as f64 / n;
    let mu0 = sum0 as f64 / n0 as f64;
    let mu1 = sum1 as f64 / n1 as f64;
    let d = mu0 - mu1;
    w0 * w1 * d * d
}

/// Otsu threshold of a histogram. Candidates are `0..=254`; ties go to the
/// smallest `k`. A single-valued histogram returns that value.
pub fn otsu_threshold_histogram(hist: &Histogram) -> u8 {
    let counts = hist.counts();
    let occupied: Vec<usize> = (0..256).filter(|&k| counts[k] > 0).collect();
    if let [only] = occupied.as_slice() {
        return *only as u8;
    }

    let total = hist.total();
    let total_sum: u64 = counts.iter().enumerate().map(|(k, &n)| k as u64 * n).sum();

    let mut n0 = 0u64;
    let mut sum0 = 0u64;
    let mut best_k = 0u8;
    let mut best_var = f64::NEG_INFINITY;
    for (k, &n) in counts.iter().enumerate().take(255) {
        n0 += n;
        sum0 += k as u64 * n;
        let var = between_class_variance(n0, sum0, total - n0, total_sum - sum0);
        if var > best_var {
            best_var = var;
            best_k = k as u8;
        }
    }
    best_k
}

pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = region_histogram(img, RegionRect::full(img.width(), img.height()))
        .expect("full-image rect is in bounds");
    otsu_threshold_histogram(&hist)
}

/// Black where `gray <= otsu_threshold`, white elsewhere.
pub fn otsu_binarize(img: &GrayImage) -> BinaryImage {
    let t = otsu_threshold(img);
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| if v <= t { BLACK } else { WHITE })
        .collect();
    BinaryImage::from_raw_unchecked(img.width(), img.height(), pixels)
}
