//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's partition, histogram or fusion
//! code; only the containers are shared.

#![allow(dead_code)]

use hhebin::GrayImage;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

/// Literal recursive midpoint split: each cell becomes up to four children,
/// floor half first, axes of length 1 left alone.
pub fn quad_cells(w: usize, h: usize, level: u32) -> Vec<Cell> {
    fn go(c: Cell, level: u32, out: &mut Vec<Cell>) {
        if level == 0 {
            out.push(c);
            return;
        }
        let xs = if c.w > 1 {
            vec![(c.x, c.w / 2), (c.x + c.w / 2, c.w - c.w / 2)]
        } else {
            vec![(c.x, c.w)]
        };
        let ys = if c.h > 1 {
            vec![(c.y, c.h / 2), (c.y + c.h / 2, c.h - c.h / 2)]
        } else {
            vec![(c.y, c.h)]
        };
        for &(y, ch) in &ys {
            for &(x, cw) in &xs {
                go(Cell { x, y, w: cw, h: ch }, level - 1, out);
            }
        }
    }
    let mut out = Vec::new();
    go(Cell { x: 0, y: 0, w, h }, level, &mut out);
    out
}

/// Membership of pixel `(x, y)` at `level`: fraction of its cell's pixels
/// whose gray value is at most its own.
pub fn oracle_membership(img: &GrayImage, level: u32, x: usize, y: usize) -> f64 {
    let cell = quad_cells(img.width(), img.height(), level)
        .into_iter()
        .find(|c| x >= c.x && x < c.x + c.w && y >= c.y && y < c.y + c.h)
        .expect("every pixel lies in some cell");
    let v = img.get(x, y);
    let mut at_most = 0usize;
    for yy in cell.y..cell.y + cell.h {
        for xx in cell.x..cell.x + cell.w {
            if img.get(xx, yy) <= v {
                at_most += 1;
            }
        }
    }
    at_most as f64 / (cell.w * cell.h) as f64
}

/// Weighted sum over levels `lmin..=lmax` with weights `(l+1)^2`, summed in
/// ascending order, then divided by the weight total.
pub fn oracle_net(img: &GrayImage, lmin: u32, lmax: u32, x: usize, y: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for l in lmin..=lmax {
        let weight = ((l + 1) * (l + 1)) as f64;
        num += oracle_membership(img, l, x, y) * weight;
        den += weight;
    }
    num / den
}

/// Per-pixel HHE decision without median filtering: 255 iff net > threshold.
pub fn oracle_hhe(img: &GrayImage, lmin: u32, lmax: u32, threshold: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.pixels().len());
    for y in 0..img.height() {
        for x in 0..img.width() {
            let net = oracle_net(img, lmin, lmax, x, y);
            out.push(if net > threshold { 255 } else { 0 });
        }
    }
    out
}

/// Between-class variance of the split `{<= k} | {> k}` computed straight
/// from the pixels.
pub fn oracle_sigma_b(pixels: &[u8], k: u8) -> f64 {
    let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
    for &p in pixels {
        if p <= k {
            n0 += 1;
            s0 += u64::from(p);
        } else {
            n1 += 1;
            s1 += u64::from(p);
        }
    }
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let n = (n0 + n1) as f64;
    let w0 = n0 as f64 / n;
    let w1 = n1 as f64 / n;
    let mu0 = s0 as f64 / n0 as f64;
    let mu1 = s1 as f64 / n1 as f64;
    let d = mu0 - mu1;
    w0 * w1 * d * d
}

/// Exhaustive Otsu over all 255 candidate splits; smallest maximizer wins,
/// a constant image returns its value.
pub fn oracle_otsu(pixels: &[u8]) -> u8 {
    if pixels.iter().all(|&p| p == pixels[0]) {
        return pixels[0];
    }
    let mut best = (f64::NEG_INFINITY, 0u8);
    for k in 0..=254u8 {
        let v = oracle_sigma_b(pixels, k);
        if v > best.0 {
            best = (v, k);
        }
    }
    best.1
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random image of the given size. Alternates between full-range noise and
/// a handful of gray levels so CDF ties (and exact 0.5 memberships) occur.
pub fn random_image(rng: &mut StdRng, w: usize, h: usize) -> GrayImage {
    let palette: Vec<u8> = (0..rng.random_range(1..6)).map(|_| rng.random()).collect();
    let few_levels = rng.random_bool(0.5);
    GrayImage::from_fn(w, h, |_, _| {
        if few_levels {
            palette[rng.random_range(0..palette.len())]
        } else {
            rng.random()
        }
    })
}

pub fn random_sized_image(rng: &mut StdRng, max_side: usize) -> GrayImage {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    random_image(rng, w, h)
}
