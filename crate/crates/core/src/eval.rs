//! Class assignment and scoring of single-output networks.
//!
//! Two assignment rules are supported. Strict mode rounds the raw output to
//! the nearest class target. Tolerant mode snaps any output within one grid
//! step of the true target onto that target before falling back to strict
//! rounding. Tolerant mode consults the true label, so it is a scoring rule
//! rather than a classifier that could run on unlabeled data.

use alloc::vec::Vec;

use crate::data::{Grade, Sample, TargetEncoding};
use crate::error::{Error, Result};
use crate::network::Network;

/// Slack on grid comparisons so values a rounding error away from a band
/// edge land deterministically.
pub const GRID_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Strict,
    Tolerant,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Tolerant => "tolerant",
        }
    }
}

/// Nearest class on the target grid, halves rounding up, clamped to A..E.
pub fn assign_strict(raw: f64, encoding: &TargetEncoding) -> Grade {
    let k = libm::round(raw / encoding.step + GRID_EPSILON);
    let k = if k.is_nan() { 1.0 } else { k.clamp(1.0, 5.0) };
    Grade::from_code(k as u8).expect("clamped to 1..=5")
}

/// The target class if `raw` lies within one grid step of its target,
/// otherwise [`assign_strict`].
pub fn assign_tolerant(raw: f64, target: Grade, encoding: &TargetEncoding) -> Grade {
    if (raw - encoding.target(target)).abs() <= encoding.step + GRID_EPSILON {
        target
    } else {
        assign_strict(raw, encoding)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub raw: f64,
    pub target: Grade,
    pub strict: Grade,
    pub tolerant: Grade,
}

impl Prediction {
    pub fn new(raw: f64, target: Grade, encoding: &TargetEncoding) -> Self {
        Self {
            raw,
            target,
            strict: assign_strict(raw, encoding),
            tolerant: assign_tolerant(raw, target, encoding),
        }
    }

    pub fn assigned(&self, mode: Mode) -> Grade {
        match mode {
            Mode::Strict => self.strict,
            Mode::Tolerant => self.tolerant,
        }
    }
}

/// Counts indexed `[actual][assigned]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 5]; 5],
}

impl ConfusionMatrix {
    pub fn record(&mut self, actual: Grade, assigned: Grade) {
        self.counts[actual.index()][assigned.index()] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> usize {
        (0..5).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> [usize; 5] {
        core::array::from_fn(|i| self.counts[i].iter().sum())
    }
}

/// `100 * correct / (correct + incorrect)`.
pub fn accuracy_percent(correct: usize, incorrect: usize) -> f64 {
    let n = correct + incorrect;
    if n == 0 {
        0.0
    } else {
        100.0 * correct as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub mode: Mode,
    /// Correctly classified number of instances.
    pub ccni: usize,
    /// Incorrectly classified number of instances.
    pub icni: usize,
    /// Correct percentage.
    pub cci: f64,
    /// Incorrect percentage, `100 - cci`.
    pub ici: f64,
    /// Mean absolute error on the class-index scale (`raw / step` vs `k`).
    pub mae: f64,
    /// Root mean squared error on the class-index scale.
    pub rmse: f64,
    /// Mean absolute error on the raw output scale.
    pub mae_raw: f64,
    pub rmse_raw: f64,
    pub matrix: ConfusionMatrix,
}

impl EvaluationReport {
    pub fn total(&self) -> usize {
        self.ccni + self.icni
    }
}

/// Scores precomputed predictions.
pub fn evaluate_predictions(
    predictions: &[Prediction],
    encoding: &TargetEncoding,
    mode: Mode,
) -> Result<EvaluationReport> {
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = predictions.len() as f64;
    let mut matrix = ConfusionMatrix::default();
    let (mut abs_idx, mut sq_idx, mut abs_raw, mut sq_raw) = (0.0, 0.0, 0.0, 0.0);
    for p in predictions {
        matrix.record(p.target, p.assigned(mode));
        let e_idx = encoding.to_index_scale(p.raw) - p.target.code() as f64;
        let e_raw = p.raw - encoding.target(p.target);
        abs_idx += e_idx.abs();
        sq_idx += e_idx * e_idx;
        abs_raw += e_raw.abs();
        sq_raw += e_raw * e_raw;
    }
    let ccni = matrix.diagonal();
    let icni = predictions.len() - ccni;
    let cci = accuracy_percent(ccni, icni);
    Ok(EvaluationReport {
        mode,
        ccni,
        icni,
        cci,
        ici: 100.0 - cci,
        mae: abs_idx / n,
        rmse: libm::sqrt(sq_idx / n),
        mae_raw: abs_raw / n,
        rmse_raw: libm::sqrt(sq_raw / n),
        matrix,
    })
}

/// Runs the network over `samples` and builds one prediction per sample
/// from the first output.
pub fn predict(
    network: &Network,
    samples: &[Sample],
    encoding: &TargetEncoding,
) -> Result<Vec<Prediction>> {
    samples
        .iter()
        .map(|s| {
            let out = network.forward(&s.features)?;
            Ok(Prediction::new(out[0], s.label, encoding))
        })
        .collect()
}

pub fn evaluate(
    network: &Network,
    samples: &[Sample],
    encoding: &TargetEncoding,
    mode: Mode,
) -> Result<EvaluationReport> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    evaluate_predictions(&predict(network, samples, encoding)?, encoding, mode)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub strict_accuracy: f64,
    pub tolerant_accuracy: f64,
    /// Tolerant minus strict, in percentage points.
    pub difference: f64,
}

/// Sets a strict and a tolerant report over the same predictions side by
/// side.
pub fn compare_models(
    strict: &EvaluationReport,
    tolerant: &EvaluationReport,
) -> Result<Comparison> {
    if strict.mode != Mode::Strict || tolerant.mode != Mode::Tolerant {
        return Err(Error::InvalidConfig(
            "expected one strict and one tolerant report".into(),
        ));
    }
    if strict.total() != tolerant.total() || strict.matrix.row_sums() != tolerant.matrix.row_sums()
    {
        return Err(Error::DimensionMismatch {
            what: "compared reports",
            expected: strict.total(),
            found: tolerant.total(),
        });
    }
    if tolerant.ccni < strict.ccni {
        return Err(Error::InvalidConfig(
            "tolerant report has fewer correct instances than strict; reports do not share predictions".into(),
        ));
    }
    Ok(Comparison {
        strict_accuracy: strict.cci,
        tolerant_accuracy: tolerant.cci,
        difference: tolerant.cci - strict.cci,
    })
}
