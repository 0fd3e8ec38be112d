//! Hierarchical histogram equalization (HHE).
//!
//! Level 0 equalizes the whole image. Each further level splits every cell of
//! the previous level at its midpoints into four and equalizes each cell
//! independently over the (filtered) source pixels. Every level yields a
//! membership map; the maps are fused with weights `(level + 1)^2` so finer,
//! more local levels dominate, and the fused map is thresholded.
//!
//! Odd sizes split with the floor half first (left/top) and the remainder
//! second. An axis of length 1 is not split further, so cells are never
//! empty and a level may have fewer than `4^level` cells.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::histeq::{fill_region_membership, RegionRect};
use crate::pixmap::{BinaryImage, GrayImage, MembershipMap, BLACK, WHITE};
use crate::preprocess::median3x3;

/// Deepest level accepted by [`LevelRange`].
pub const MAX_LEVEL: u32 = 12;

/// Default binarization threshold on the fused membership.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Contiguous, inclusive range of hierarchy levels to fuse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelRange {
    min: u32,
    max: u32,
}

impl LevelRange {
    /// Levels 2..=8, used for whole vehicle frames.
    pub const FRAME: LevelRange = LevelRange { min: 2, max: 8 };
    /// Levels 0..=3, used for cropped license plates.
    pub const PLATE: LevelRange = LevelRange { min: 0, max: 3 };

    pub fn new(min: u32, max: u32) -> Result<Self> {
        if min > max {
            return Err(Error::argument(format!(
                "level range {min}..{max} is reversed"
            )));
        }
        if max > MAX_LEVEL {
            return Err(Error::argument(format!(
                "level {max} exceeds the maximum of {MAX_LEVEL}"
            )));
        }
        Ok(LevelRange { min, max })
    }

    pub fn min(&self) -> u32 {
        self.min
    }

    pub fn max(&self) -> u32 {
        self.max
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.min..=self.max
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

impl FromStr for LevelRange {
    type Err = Error;

    /// Parses `MIN..MAX`, or a single level `N` meaning `N..N`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::argument(format!("bad level {t:?} in {s:?}")))
        };
        match s.split_once("..") {
            Some((lo, hi)) => LevelRange::new(parse(lo)?, parse(hi)?),
            None => {
                let l = parse(s)?;
                LevelRange::new(l, l)
            }
        }
    }
}

/// Fusion weight of a level, `(level + 1)^2`.
pub fn level_weight(level: u32) -> f64 {
    let l = f64::from(level) + 1.0;
    l * l
}

/// Splits one axis of length `len` recursively `level` times, returning
/// `(start, length)` segments in order.
fn axis_segments(len: usize, level: u32) -> Vec<(usize, usize)> {
    let mut segs = vec![(0, len)];
    for _ in 0..level {
        if segs.iter().all(|&(_, l)| l == 1) {
            break;
        }
        segs = segs
            .into_iter()
            .flat_map(|(start, l)| {
                if l >= 2 {
                    let first = l / 2;
                    vec![(start, first), (start + first, l - first)]
                } else {
                    vec![(start, l)]
                }
            })
            .collect();
    }
    segs
}

/// Cells of the given level, row-major by origin.
///
/// Splitting a rect at its midpoints splits its width and height
/// independently, so the cells of a level form a grid whose column and row
/// boundaries come from splitting each axis on its own.
pub fn partition(width: usize, height: usize, level: u32) -> Vec<RegionRect> {
    assert!(width > 0 && height > 0, "cannot partition an empty image");
    let cols = axis_segments(width, level);
    let rows = axis_segments(height, level);
    let mut cells = Vec::with_capacity(cols.len() * rows.len());
    for &(y, h) in &rows {
        for &(x, w) in &cols {
            cells.push(RegionRect { x, y, w, h });
        }
    }
    cells
}

/// Membership map of one hierarchy level over the full image.
pub fn level_membership(img: &GrayImage, level: u32) -> MembershipMap {
    let (w, h) = img.dimensions();
    let mut values = vec![0.0; w * h];
    for cell in partition(w, h, level) {
        fill_region_membership(img, cell, &mut values);
    }
    MembershipMap::from_raw_unchecked(w, h, values)
}

/// Membership maps for every level of a range, all over the same image.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStack {
    range: LevelRange,
    maps: Vec<MembershipMap>,
}

impl LevelStack {
    /// Computes every level of `range` on `img`. Levels run in parallel.
    pub fn compute(img: &GrayImage, range: LevelRange) -> Self {
        let maps = range
            .levels()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|level| level_membership(img, level))
            .collect();
        LevelStack { range, maps }
    }

    /// Assembles a stack from `(level, map)` pairs. Levels must be
    /// contiguous and ascending and all maps must share dimensions.
    pub fn from_levels(levels: Vec<(u32, MembershipMap)>) -> Result<Self> {
        let (first_level, first_map) = levels
            .first()
            .ok_or_else(|| Error::argument("empty level stack"))?;
        let dims = first_map.dimensions();
        for (i, (level, map)) in levels.iter().enumerate() {
            if *level != first_level + i as u32 {
                return Err(Error::argument(format!(
                    "level stack must be contiguous; expected level {}, found {level}",
                    first_level + i as u32
                )));
            }
            if map.dimensions() != dims {
                return Err(Error::argument(format!(
                    "level {level} is {:?}, expected {dims:?}",
                    map.dimensions()
                )));
            }
        }
        let range = LevelRange::new(*first_level, first_level + levels.len() as u32 - 1)?;
        let maps = levels.into_iter().map(|(_, m)| m).collect();
        Ok(LevelStack { range, maps })
    }

    pub fn range(&self) -> LevelRange {
        self.range
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.maps[0].dimensions()
    }

    pub fn get(&self, level: u32) -> Option<&MembershipMap> {
        level
            .checked_sub(self.range.min)
            .and_then(|i| self.maps.get(i as usize))
    }

    /// `(level, map)` pairs in ascending level order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &MembershipMap)> {
        self.range.levels().zip(self.maps.iter())
    }
}

/// Fuses a stack into the net membership map:
/// `sum(f_l * (l+1)^2) / sum((l+1)^2)` over the stack's levels.
pub fn combine(stack: &LevelStack) -> MembershipMap {
    if let [only] = stack.maps.as_slice() {
        return only.clone();
    }
    let (w, h) = stack.dimensions();
    let total: f64 = stack.range.levels().map(level_weight).sum();
    let mut acc = vec![0.0; w * h];
    for (level, map) in stack.iter() {
        let weight = level_weight(level);
        for (a, &v) in acc.iter_mut().zip(map.values()) {
            *a += v * weight;
        }
    }
    for a in &mut acc {
        *a = (*a / total).min(1.0);
    }
    MembershipMap::from_raw_unchecked(w, h, acc)
}

/// White where the membership is strictly greater than `threshold`.
///
/// # Panics
/// If `threshold` is not in `[0, 1]`.
pub fn binarize(net: &MembershipMap, threshold: f64) -> BinaryImage {
    assert!(
        (0.0..=1.0).contains(&threshold),
        "threshold {threshold} outside [0, 1]"
    );
    let (w, h) = net.dimensions();
    let pixels = net
        .values()
        .iter()
        .map(|&v| if v > threshold { WHITE } else { BLACK })
        .collect();
    BinaryImage::from_raw_unchecked(w, h, pixels)
}

/// Settings for the full HHE pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HheParams {
    pub range: LevelRange,
    pub threshold: f64,
    /// Apply the 3x3 median filter once before equalizing.
    pub median: bool,
}

impl HheParams {
    pub fn new(range: LevelRange) -> Self {
        HheParams {
            range,
            threshold: DEFAULT_THRESHOLD,
            median: true,
        }
    }
}

/// Everything the pipeline produced for one image.
#[derive(Debug, Clone)]
pub struct HheOutput {
    pub stack: LevelStack,
    pub net: MembershipMap,
    pub binary: BinaryImage,
}

/// Runs the pipeline and keeps the intermediate maps.
pub fn hhe_run(img: &GrayImage, params: &HheParams) -> HheOutput {
    let filtered;
    let src = if params.median {
        filtered = median3x3(img);
        &filtered
    } else {
        img
    };
    let stack = LevelStack::compute(src, params.range);
    let net = combine(&stack);
    let binary = binarize(&net, params.threshold);
    HheOutput { stack, net, binary }
}

/// Optional median, per-level membership, fusion, threshold.
pub fn hhe_binarize(
    img: &GrayImage,
    range: LevelRange,
    threshold: f64,
    median: bool,
) -> BinaryImage {
    hhe_run(
        img,
        &HheParams {
            range,
            threshold,
            median,
        },
    )
    .binary
}
