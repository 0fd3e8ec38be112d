//! Per-region histograms and histogram-equalization membership.
//!
//! Equalizing a region maps gray level `k` to `S_k = 255 * C_k / N`, where
//! `C_k` is the cumulative count up to `k` and `N` the region size. Dividing
//! back by 255 gives the fractional gray value used as membership, so the
//! membership is computed directly as `C_k / N` with a single division.
//!
//! A constant region therefore maps entirely to 1.0: its only occupied bin
//! is also the top of its CDF. Uniform areas lean white.

use std::io::{self, Write};

use crate::error::Result;
use crate::pixmap::{GrayImage, MembershipMap};

pub use crate::pixmap::RegionRect;

/// 256-bin gray-level histogram with its cumulative form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
    cumulative: [u64; 256],
}

impl Histogram {
    /// Builds a histogram from raw counts.
    pub fn from_counts(counts: [u64; 256]) -> Self {
        let mut cumulative = [0u64; 256];
        let mut running = 0;
        for (c, &n) in cumulative.iter_mut().zip(counts.iter()) {
            running += n;
            *c = running;
        }
        Histogram { counts, cumulative }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn cumulative(&self) -> &[u64; 256] {
        &self.cumulative
    }

    /// Total number of samples, `N`.
    pub fn total(&self) -> u64 {
        self.cumulative[255]
    }

    /// `n_k / N`.
    pub fn probability(&self, k: u8) -> f64 {
        self.counts[k as usize] as f64 / self.total() as f64
    }

    /// Membership of gray level `k`: `C_k / N`.
    pub fn membership(&self, k: u8) -> f64 {
        self.cumulative[k as usize] as f64 / self.total() as f64
    }

    /// The equalized gray level `S_k` on the 0..=255 scale. Diagnostic only;
    /// membership never goes through this value.
    pub fn stretched(&self, k: u8) -> f64 {
        self.membership(k) * 255.0
    }

    /// Membership lookup table for all 256 levels.
    pub fn membership_table(&self) -> [f64; 256] {
        let n = self.total() as f64;
        let mut lut = [0.0; 256];
        for (m, &c) in lut.iter_mut().zip(self.cumulative.iter()) {
            *m = c as f64 / n;
        }
        lut
    }

    /// Writes `k,count,cumulative` for every level, one per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for k in 0..256 {
            writeln!(out, "{k},{},{}", self.counts[k], self.cumulative[k])?;
        }
        Ok(())
    }
}

fn count_region(img: &GrayImage, rect: RegionRect) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for y in rect.y..rect.y + rect.h {
        for &v in &img.row(y)[rect.x..rect.x + rect.w] {
            counts[v as usize] += 1;
        }
    }
    counts
}

pub fn region_histogram(img: &GrayImage, rect: RegionRect) -> Result<Histogram> {
    rect.check_within(img.width(), img.height())?;
    Ok(Histogram::from_counts(count_region(img, rect)))
}

/// Membership of every pixel in `rect`, as a map the size of `rect`.
pub fn region_membership(img: &GrayImage, rect: RegionRect) -> Result<MembershipMap> {
    let hist = region_histogram(img, rect)?;
    let lut = hist.membership_table();
    let mut values = Vec::with_capacity(rect.area());
    for y in rect.y..rect.y + rect.h {
        values.extend(
            img.row(y)[rect.x..rect.x + rect.w]
                .iter()
                .map(|&v| lut[v as usize]),
        );
    }
    Ok(MembershipMap::from_raw_unchecked(rect.w, rect.h, values))
}

/// Writes the membership of `rect` into `out`, a row-major buffer with the
/// full extent of `img`. The rect must already be bounds-checked.
pub(crate) fn fill_region_membership(img: &GrayImage, rect: RegionRect, out: &mut [f64]) {
    let width = img.width();
    let lut = Histogram::from_counts(count_region(img, rect)).membership_table();
    for y in rect.y..rect.y + rect.h {
        let src = &img.row(y)[rect.x..rect.x + rect.w];
        let dst = &mut out[y * width + rect.x..][..rect.w];
        for (d, &v) in dst.iter_mut().zip(src) {
            *d = lut[v as usize];
        }
    }
}
