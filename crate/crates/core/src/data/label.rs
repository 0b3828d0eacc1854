use core::fmt;

use super::{Grade, SubGrade, SubGrades};

/// Which group grades a rule accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradeSet {
    /// Exactly this grade.
    Only(SubGrade),
    /// Either of two grades.
    Either(SubGrade, SubGrade),
    /// A* or A.
    AtLeastA,
    /// B or worse.
    AtMostB,
}

impl GradeSet {
    fn contains(self, g: SubGrade) -> bool {
        match self {
            GradeSet::Only(x) => g == x,
            GradeSet::Either(x, y) => g == x || g == y,
            GradeSet::AtLeastA => g.at_least_a(),
            GradeSet::AtMostB => g.at_most_b(),
        }
    }
}

/// One row of the final-decision table: CAD, FB and portfolio conditions and
/// the resulting class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelRule {
    pub cad: GradeSet,
    pub fb: GradeSet,
    pub prf: GradeSet,
    pub label: Grade,
}

use GradeSet::*;
use SubGrade as S;

/// Final-decision rows, checked top to bottom.
pub const LABEL_RULES: [LabelRule; 7] = [
    LabelRule {
        cad: Only(S::AStar),
        fb: Only(S::AStar),
        prf: Only(S::A),
        label: Grade::A,
    },
    LabelRule {
        cad: AtLeastA,
        fb: AtLeastA,
        prf: Only(S::B),
        label: Grade::B,
    },
    LabelRule {
        cad: AtMostB,
        fb: AtMostB,
        prf: Either(S::B, S::C),
        label: Grade::C,
    },
    LabelRule {
        cad: AtLeastA,
        fb: AtLeastA,
        prf: Only(S::D),
        label: Grade::C,
    },
    LabelRule {
        cad: AtMostB,
        fb: AtMostB,
        prf: Only(S::D),
        label: Grade::D,
    },
    LabelRule {
        cad: AtLeastA,
        fb: AtLeastA,
        prf: Only(S::E),
        label: Grade::D,
    },
    LabelRule {
        cad: AtMostB,
        fb: AtMostB,
        prf: Only(S::E),
        label: Grade::E,
    },
];

/// A grade combination no decision row covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Uncovered(pub SubGrades);

impl fmt::Display for Uncovered {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0;
        write!(
            f,
            "no decision rule covers CAD={} FB={} portfolio={}",
            g.cad, g.fb, g.prf
        )
    }
}

/// Applies the decision rows in order; the first match wins.
pub fn final_label(grades: SubGrades) -> Result<Grade, Uncovered> {
    LABEL_RULES
        .iter()
        .find(|r| {
            r.cad.contains(grades.cad) && r.fb.contains(grades.fb) && r.prf.contains(grades.prf)
        })
        .map(|r| r.label)
        .ok_or(Uncovered(grades))
}
