//! Tabular data: the lecturer-evaluation feature schema, class labels,
//! preprocessing and a synthetic generator.
//!
//! Missing values are stored as `NaN` until imputed.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::network::Pattern;

mod label;
mod preprocess;
mod synth;

pub use label::{final_label, Uncovered, LABEL_RULES};
pub use preprocess::{
    balance_oversample, balanced_counts, impute_mean, normalize_minmax, split, MinMaxStats, Split,
};
pub use synth::{covered_triples, synthesize, GradeThresholds, SynthConfig};

/// Final decision class, best (A) to worst (E).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grade {
    A,
    B,
    C,
    D,
    E,
}

impl Grade {
    pub const ALL: [Grade; 5] = [Grade::A, Grade::B, Grade::C, Grade::D, Grade::E];

    /// Numeric class code, `A = 1` through `E = 5`.
    pub fn code(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get((code as usize).checked_sub(1)?).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn description(self) -> &'static str {
        match self {
            Grade::A => "Thanks from Minister",
            Grade::B => "Thanks from the Dean of the College",
            Grade::C => "Rights remain the same",
            Grade::D => "Warning",
            Grade::E => "Firm Warning",
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseGradeError(pub String);

impl fmt::Display for ParseGradeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown class grade `{}`", self.0)
    }
}

impl FromStr for Grade {
    type Err = ParseGradeError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" | "1" => Ok(Grade::A),
            "B" | "2" => Ok(Grade::B),
            "C" | "3" => Ok(Grade::C),
            "D" | "4" => Ok(Grade::D),
            "E" | "5" => Ok(Grade::E),
            other => Err(ParseGradeError(other.to_string())),
        }
    }
}

/// Grade of one criteria group on the six-step scale (A* above A).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubGrade {
    AStar,
    A,
    B,
    C,
    D,
    E,
}

impl SubGrade {
    pub const ALL: [SubGrade; 6] = [
        SubGrade::AStar,
        SubGrade::A,
        SubGrade::B,
        SubGrade::C,
        SubGrade::D,
        SubGrade::E,
    ];

    /// A* or A.
    pub fn at_least_a(self) -> bool {
        self <= SubGrade::A
    }

    /// B or worse.
    pub fn at_most_b(self) -> bool {
        self >= SubGrade::B
    }
}

impl fmt::Display for SubGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubGrade::AStar => "A*",
            SubGrade::A => "A",
            SubGrade::B => "B",
            SubGrade::C => "C",
            SubGrade::D => "D",
            SubGrade::E => "E",
        })
    }
}

/// The three group grades that decide the final label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubGrades {
    pub cad: SubGrade,
    pub fb: SubGrade,
    /// Portfolio (PRF) grade.
    pub prf: SubGrade,
}

impl SubGrades {
    pub fn new(cad: SubGrade, fb: SubGrade, prf: SubGrade) -> Self {
        Self { cad, fb, prf }
    }
}

/// Maps classes to network targets `k * step`.
///
/// The default step of 0.1 puts the five classes at 0.1..0.5, one grid step
/// apart, which is also the width of the tolerant scoring band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetEncoding {
    pub step: f64,
}

impl Default for TargetEncoding {
    fn default() -> Self {
        Self { step: 0.1 }
    }
}

impl TargetEncoding {
    pub fn target(&self, grade: Grade) -> f64 {
        grade.code() as f64 * self.step
    }

    /// Position of `raw` on the class-index scale (`raw / step`).
    pub fn to_index_scale(&self, raw: f64) -> f64 {
        raw / self.step
    }
}

/// Criteria group a feature belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureGroup {
    Portfolio,
    Cad,
    Feedback,
}

impl FeatureGroup {
    pub fn of(name: &str) -> Option<Self> {
        if name.starts_with("PRF") {
            Some(Self::Portfolio)
        } else if name.starts_with("CAD") {
            Some(Self::Cad)
        } else if name.starts_with("FB") {
            Some(Self::Feedback)
        } else {
            None
        }
    }
}

/// Ordered feature names of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    names: Vec<String>,
}

/// The fourteen features kept by correlation-based selection on the
/// original combined dataset.
pub const REFERENCE_FEATURES: [&str; 14] = [
    "PRF1", "PRF2", "PRF3", "PRF4", "PRF6", "PRF8", "PRF10", "PRF11", "CAD1", "CAD2", "CAD3",
    "FB4", "FB5", "FB10",
];

impl FeatureSchema {
    /// PRF1..PRF11, CAD1..CAD3, FB1..FB12.
    pub fn combined() -> Self {
        let mut names = Vec::with_capacity(26);
        names.extend((1..=11).map(|i| alloc::format!("PRF{i}")));
        names.extend((1..=3).map(|i| alloc::format!("CAD{i}")));
        names.extend((1..=12).map(|i| alloc::format!("FB{i}")));
        Self { names }
    }

    pub fn new(names: Vec<String>) -> Result<Self> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "duplicate feature name `{n}`"
                )));
            }
        }
        Ok(Self { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Column indices of `names`, in the order given.
    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| Error::UnknownFeature(n.as_ref().to_string()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Feature values; `NaN` marks a missing value.
    pub features: Vec<f64>,
    pub label: Grade,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(schema: FeatureSchema, samples: Vec<Sample>) -> Result<Self> {
        for s in &samples {
            if s.features.len() != schema.len() {
                return Err(Error::DimensionMismatch {
                    what: "sample features",
                    expected: schema.len(),
                    found: s.features.len(),
                });
            }
        }
        Ok(Self { schema, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.schema.len()
    }

    /// Samples per class, indexed by [`Grade::index`].
    pub fn class_counts(&self) -> [usize; 5] {
        let mut counts = [0; 5];
        for s in &self.samples {
            counts[s.label.index()] += 1;
        }
        counts
    }

    pub fn column(&self, index: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.features[index]).collect()
    }

    pub fn has_missing(&self) -> bool {
        self.samples
            .iter()
            .any(|s| s.features.iter().any(|v| v.is_nan()))
    }

    /// A dataset restricted to the given columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.feature_count()) {
            return Err(Error::DimensionMismatch {
                what: "column index",
                expected: self.feature_count(),
                found: bad,
            });
        }
        let names = indices
            .iter()
            .map(|&i| self.schema.names[i].clone())
            .collect();
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                features: indices.iter().map(|&i| s.features[i]).collect(),
                label: s.label,
            })
            .collect();
        Ok(Self {
            schema: FeatureSchema::new(names)?,
            samples,
        })
    }

    pub fn select_named<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let indices = self.schema.indices_of(names)?;
        self.select_columns(&indices)
    }

    /// Network patterns with a single target output per sample.
    pub fn patterns(&self, encoding: &TargetEncoding) -> Vec<Pattern> {
        self.samples
            .iter()
            .map(|s| Pattern::new(s.features.clone(), alloc::vec![encoding.target(s.label)]))
            .collect()
    }
}
