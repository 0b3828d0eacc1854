//! JSON and plain-text evaluation reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use swarmnet_core::data::Grade;
use swarmnet_core::eval::{compare_models, Comparison, ConfusionMatrix, EvaluationReport, Mode};

pub const TOLERANT_CAVEAT: &str =
    "Tolerant mode looks at the true class when assigning a label, so it is a \
scoring rule for labeled data, not a classifier that can run on unlabeled inputs.";

fn round_to(x: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (x * f).round() / f
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub mode: String,
    pub ccni: usize,
    pub icni: usize,
    /// Percent, two decimals.
    pub cci: f64,
    pub ici: f64,
    /// Class-index scale, four decimals.
    pub mae: f64,
    pub rmse: f64,
    /// Raw output scale, four decimals.
    pub mae_raw: f64,
    pub rmse_raw: f64,
    /// Rows actual class, columns assigned class, both A..E.
    pub confusion_matrix: [[usize; 5]; 5],
}

impl ReportJson {
    pub fn new(r: &EvaluationReport) -> Self {
        Self {
            mode: r.mode.name().into(),
            ccni: r.ccni,
            icni: r.icni,
            cci: round_to(r.cci, 2),
            ici: round_to(r.ici, 2),
            mae: round_to(r.mae, 4),
            rmse: round_to(r.rmse, 4),
            mae_raw: round_to(r.mae_raw, 4),
            rmse_raw: round_to(r.rmse_raw, 4),
            confusion_matrix: r.matrix.counts,
        }
    }

    pub fn mode(&self) -> Option<Mode> {
        match self.mode.as_str() {
            "strict" => Some(Mode::Strict),
            "tolerant" => Some(Mode::Tolerant),
            _ => None,
        }
    }

    /// Rebuilds a core report. Error metrics carry the rounding of the file.
    pub fn to_report(&self) -> Option<EvaluationReport> {
        Some(EvaluationReport {
            mode: self.mode()?,
            ccni: self.ccni,
            icni: self.icni,
            cci: self.cci,
            ici: self.ici,
            mae: self.mae,
            rmse: self.rmse,
            mae_raw: self.mae_raw,
            rmse_raw: self.rmse_raw,
            matrix: ConfusionMatrix {
                counts: self.confusion_matrix,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonJson {
    pub strict_accuracy: f64,
    pub tolerant_accuracy: f64,
    pub difference: f64,
}

impl ComparisonJson {
    pub fn new(c: &Comparison) -> Self {
        Self {
            strict_accuracy: round_to(c.strict_accuracy, 2),
            tolerant_accuracy: round_to(c.tolerant_accuracy, 2),
            difference: round_to(c.difference, 2),
        }
    }
}

/// Reports for one evaluated set, e.g. `train` or `test`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetReport {
    pub set: String,
    pub samples: usize,
    pub reports: Vec<ReportJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<ComparisonJson>,
}

impl SetReport {
    pub fn new(set: &str, reports: &[EvaluationReport]) -> swarmnet_core::Result<Self> {
        let strict = reports.iter().find(|r| r.mode == Mode::Strict);
        let tolerant = reports.iter().find(|r| r.mode == Mode::Tolerant);
        let comparison = match (strict, tolerant) {
            (Some(s), Some(t)) => Some(ComparisonJson::new(&compare_models(s, t)?)),
            _ => None,
        };
        Ok(Self {
            set: set.into(),
            samples: reports.first().map_or(0, EvaluationReport::total),
            reports: reports.iter().map(ReportJson::new).collect(),
            comparison,
        })
    }

    pub fn report(&self, mode: Mode) -> Option<&ReportJson> {
        self.reports.iter().find(|r| r.mode() == Some(mode))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    /// Free-form description of the data the model was scored on.
    pub data: String,
    pub topology: String,
    pub model: String,
    pub sets: Vec<SetReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caveat: Option<String>,
}

impl ReportDocument {
    pub fn new(data: &str, topology: &str, model: &str, sets: Vec<SetReport>) -> Self {
        let tolerant = sets.iter().any(|s| s.report(Mode::Tolerant).is_some());
        Self {
            data: data.into(),
            topology: topology.into(),
            model: model.into(),
            sets,
            caveat: tolerant.then(|| TOLERANT_CAVEAT.to_string()),
        }
    }

    pub fn set(&self, name: &str) -> Option<&SetReport> {
        self.sets.iter().find(|s| s.set == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }

    /// Aligned summary table followed by one confusion matrix per report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "Data: {}", self.data).unwrap();
        writeln!(out, "Topology: {}   Model: {}", self.topology, self.model).unwrap();
        writeln!(out).unwrap();

        let columns: Vec<(String, &ReportJson)> = self
            .sets
            .iter()
            .flat_map(|s| {
                s.reports
                    .iter()
                    .map(move |r| (format!("{} {}", s.set, r.mode), r))
            })
            .collect();
        let width = columns
            .iter()
            .map(|(h, _)| h.len())
            .max()
            .unwrap_or(0)
            .max(10);
        write!(out, "{:<10}", "").unwrap();
        for (h, _) in &columns {
            write!(out, "  {h:>width$}").unwrap();
        }
        writeln!(out).unwrap();
        let rows: [(&str, Cell); 6] = [
            ("CCNI", |r| r.ccni.to_string()),
            ("ICNI", |r| r.icni.to_string()),
            ("CCI (%)", |r| format!("{:.2}", r.cci)),
            ("ICI (%)", |r| format!("{:.2}", r.ici)),
            ("MAE", |r| format!("{:.4}", r.mae)),
            ("RMSE", |r| format!("{:.4}", r.rmse)),
        ];
        for (label, cell) in &rows {
            write!(out, "{label:<10}").unwrap();
            for (_, r) in &columns {
                write!(out, "  {:>width$}", cell(r)).unwrap();
            }
            writeln!(out).unwrap();
        }

        for s in &self.sets {
            if let Some(c) = &s.comparison {
                writeln!(
                    out,
                    "\n{}: tolerant {:.2}% vs strict {:.2}% ({:+.2} points)",
                    s.set, c.tolerant_accuracy, c.strict_accuracy, c.difference
                )
                .unwrap();
            }
        }
        for s in &self.sets {
            for r in &s.reports {
                writeln!(
                    out,
                    "\nConfusion matrix, {} set, {} mode (rows actual, columns assigned)",
                    s.set, r.mode
                )
                .unwrap();
                out.push_str(&matrix_text(&r.confusion_matrix));
            }
        }
        if let Some(c) = &self.caveat {
            writeln!(out, "\nNote: {c}").unwrap();
        }
        out
    }
}

type Cell = fn(&ReportJson) -> String;

pub fn matrix_text(m: &[[usize; 5]; 5]) -> String {
    let mut out = String::new();
    write!(out, "{:>6}", "").unwrap();
    for g in Grade::ALL {
        write!(out, "{:>6}", g.letter()).unwrap();
    }
    writeln!(out, "{:>7}", "Total").unwrap();
    for g in Grade::ALL {
        write!(out, "{:>6}", g.letter()).unwrap();
        for v in m[g.index()] {
            write!(out, "{v:>6}").unwrap();
        }
        writeln!(out, "{:>7}", m[g.index()].iter().sum::<usize>()).unwrap();
    }
    write!(out, "{:>6}", "Total").unwrap();
    for total in (0..5).map(|c| m.iter().map(|row| row[c]).sum::<usize>()) {
        write!(out, "{total:>6}").unwrap();
    }
    writeln!(out, "{:>7}", m.iter().flatten().sum::<usize>()).unwrap();
    out
}
