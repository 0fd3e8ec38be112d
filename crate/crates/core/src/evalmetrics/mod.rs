//! Binarization quality against ground truth, and the synthetic corpus.
//!
//! Text is black, and black is the positive class: a true positive is a
//! pixel that is black in both prediction and truth.

mod lcg;
mod synth;

pub use lcg::Lcg64;
pub use synth::{
    corpus_specs, synth_plate, DegradationRanges, DegradationSpec, BACKGROUND_GRAY,
    DEFAULT_PLATE_SIZE, TEXT_GRAY,
};

use crate::error::{Error, Result};
use crate::pixmap::{BinaryImage, BLACK};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(pred: &BinaryImage, truth: &BinaryImage) -> Result<ConfusionCounts> {
    if pred.dimensions() != truth.dimensions() {
        return Err(Error::argument(format!(
            "prediction is {:?} but ground truth is {:?}",
            pred.dimensions(),
            truth.dimensions()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.pixels().iter().zip(truth.pixels()) {
        match (p == BLACK, t == BLACK) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
}

/// 0/0 is taken as 0.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn scores(c: &ConfusionCounts) -> Scores {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Scores {
        precision,
        recall,
        f_measure: ratio(2.0 * precision * recall, precision + recall),
        accuracy: ratio(tp + tn, tp + fp + tn + fn_),
    }
}

/// Column names of the metrics CSV.
pub const METRICS_HEADER: [&str; 7] = [
    "image",
    "method",
    "levels",
    "precision",
    "recall",
    "f_measure",
    "accuracy",
];

/// One row of the metrics CSV. `levels` is empty for methods without a
/// hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub image: String,
    pub method: String,
    pub levels: String,
    pub scores: Scores,
}

impl MetricsRow {
    pub fn fields(&self) -> [String; 7] {
        let s = &self.scores;
        [
            self.image.clone(),
            self.method.clone(),
            self.levels.clone(),
            format!("{:.6}", s.precision),
            format!("{:.6}", s.recall),
            format!("{:.6}", s.f_measure),
            format!("{:.6}", s.accuracy),
        ]
    }
}
