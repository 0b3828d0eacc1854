//! Correlation-based feature subset selection.
//!
//! A subset of `k` features scores
//! `k * mean|r_cf| / sqrt(k + k (k - 1) * mean|r_ff|)`, rewarding features
//! that track the class while penalizing redundancy among themselves.
//! Correlations are Pearson coefficients against the numeric class code.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Consecutive non-improving expansions after which best-first search stops.
pub const STALE_LIMIT: usize = 5;

/// Pearson correlation of two equally long vectors. A constant vector has
/// no defined correlation and yields 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "correlated vectors",
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    /// Symmetric feature-feature correlations with a unit diagonal.
    pub feature_feature: Vec<Vec<f64>>,
    pub feature_class: Vec<f64>,
}

impl CorrelationTable {
    pub fn from_columns(columns: &[Vec<f64>], class: &[f64]) -> Result<Self> {
        let k = columns.len();
        let mut ff = alloc::vec![alloc::vec![0.0; k]; k];
        let mut fc = Vec::with_capacity(k);
        for i in 0..k {
            ff[i][i] = 1.0;
            for j in 0..i {
                let r = pearson(&columns[i], &columns[j])?;
                ff[i][j] = r;
                ff[j][i] = r;
            }
            fc.push(pearson(&columns[i], class)?);
        }
        Ok(Self {
            feature_feature: ff,
            feature_class: fc,
        })
    }

    /// Correlations of a complete (imputed) dataset against class codes.
    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        if dataset.has_missing() {
            return Err(Error::InvalidConfig(
                "impute missing values before feature selection".into(),
            ));
        }
        let columns: Vec<Vec<f64>> = (0..dataset.feature_count())
            .map(|c| dataset.column(c))
            .collect();
        let class: Vec<f64> = dataset
            .samples
            .iter()
            .map(|s| s.label.code() as f64)
            .collect();
        Self::from_columns(&columns, &class)
    }

    pub fn feature_count(&self) -> usize {
        self.feature_class.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSubset {
    /// Feature positions, ascending.
    pub indices: Vec<usize>,
    pub merit: f64,
}

/// Merit of a feature subset. Order of `indices` does not matter.
pub fn merit(indices: &[usize], table: &CorrelationTable) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig(
            "feature subset repeats an index".into(),
        ));
    }
    if let Some(&bad) = sorted.last().filter(|&&i| i >= table.feature_count()) {
        return Err(Error::DimensionMismatch {
            what: "feature index",
            expected: table.feature_count(),
            found: bad,
        });
    }
    Ok(merit_sorted(&sorted, table))
}

fn merit_sorted(sorted: &[usize], table: &CorrelationTable) -> f64 {
    let k = sorted.len() as f64;
    let rcf = sorted
        .iter()
        .map(|&i| table.feature_class[i].abs())
        .sum::<f64>()
        / k;
    let mut pairs = 0.0;
    let mut rff_sum = 0.0;
    for (a, &i) in sorted.iter().enumerate() {
        for &j in &sorted[a + 1..] {
            rff_sum += table.feature_feature[i][j].abs();
            pairs += 1.0;
        }
    }
    let rff = if pairs > 0.0 { rff_sum / pairs } else { 0.0 };
    k * rcf / libm::sqrt(k + k * (k - 1.0) * rff)
}

/// One expansion of the best-first search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    pub expanded: Vec<usize>,
    pub expanded_merit: f64,
    pub best_merit: f64,
    pub improved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub subset: FeatureSubset,
    pub trace: Vec<SearchStep>,
}

struct Node {
    merit: f64,
    indices: Vec<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: higher merit first, then the lexicographically smaller set
    fn cmp(&self, other: &Self) -> Ordering {
        self.merit
            .total_cmp(&other.merit)
            .then_with(|| other.indices.cmp(&self.indices))
    }
}

/// Best-first forward search over subsets of the table's features.
///
/// Starting from the empty set, the most promising open subset is expanded
/// by every single feature it lacks. The search stops after
/// [`STALE_LIMIT`] consecutive expansions that fail to beat the best merit
/// seen, or when no open subsets remain. Ties go to lower feature indices.
pub fn best_first(table: &CorrelationTable) -> Result<Selection> {
    let n = table.feature_count();
    let mut open = BinaryHeap::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    open.push(Node {
        merit: 0.0,
        indices: Vec::new(),
    });
    let mut best = FeatureSubset {
        indices: Vec::new(),
        merit: 0.0,
    };
    let mut stale = 0;
    let mut trace = Vec::new();
    while let Some(node) = open.pop() {
        let mut improved = false;
        for f in 0..n {
            if node.indices.binary_search(&f).is_ok() {
                continue;
            }
            let mut child = node.indices.clone();
            let pos = child.binary_search(&f).unwrap_err();
            child.insert(pos, f);
            if !seen.insert(child.clone()) {
                continue;
            }
            let m = merit_sorted(&child, table);
            if m > best.merit {
                best = FeatureSubset {
                    indices: child.clone(),
                    merit: m,
                };
                improved = true;
            }
            open.push(Node {
                merit: m,
                indices: child,
            });
        }
        trace.push(SearchStep {
            expanded: node.indices,
            expanded_merit: node.merit,
            best_merit: best.merit,
            improved,
        });
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= STALE_LIMIT {
                break;
            }
        }
    }
    if best.indices.is_empty() {
        return Err(Error::NoSelection);
    }
    Ok(Selection {
        subset: best,
        trace,
    })
}

/// Runs best-first selection on a complete dataset.
pub fn select_features(dataset: &Dataset) -> Result<Selection> {
    if dataset.feature_count() < 2 {
        return Err(Error::InvalidConfig(
            "feature selection needs at least two features".into(),
        ));
    }
    if dataset.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: dataset.len(),
        });
    }
    best_first(&CorrelationTable::from_dataset(dataset)?)
}

/// Highest-merit subset by enumerating every non-empty subset. Only for
/// small feature counts (at most 20).
pub fn exhaustive_search(table: &CorrelationTable) -> Result<FeatureSubset> {
    let n = table.feature_count();
    if n == 0 {
        return Err(Error::EmptySubset);
    }
    if n > 20 {
        return Err(Error::InvalidConfig(
            "exhaustive search is limited to 20 features".into(),
        ));
    }
    let mut best: Option<FeatureSubset> = None;
    for mask in 1u32..(1u32 << n) {
        let indices: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let m = merit_sorted(&indices, table);
        if best.as_ref().is_none_or(|b| m > b.merit) {
            best = Some(FeatureSubset { indices, merit: m });
        }
    }
    Ok(best.expect("at least one subset"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn table(fc: Vec<f64>, ff: Vec<Vec<f64>>) -> CorrelationTable {
        CorrelationTable {
            feature_feature: ff,
            feature_class: fc,
        }
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 5.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        // sxy = 4.1, sxx = 2, syy = 7566 / 900
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.1]).unwrap();
        let expected = 4.1 / libm::sqrt(2.0 * 7566.0 / 900.0);
        assert!((r - expected).abs() < 1e-12, "{r} vs {expected}");
        assert!((r - 0.999_900_867_4).abs() < 1e-10);
        assert_eq!(pearson(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn merit_examples() {
        let t = table(vec![0.8], vec![vec![1.0]]);
        assert_eq!(merit(&[0], &t).unwrap(), 0.8);
        let dup = table(vec![0.8, 0.8], vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!((merit(&[0, 1], &dup).unwrap() - 0.8).abs() < 1e-15);
        let indep = table(vec![0.8, 0.8], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((merit(&[0, 1], &indep).unwrap() - 1.6 / libm::sqrt(2.0)).abs() < 1e-15);
        assert_eq!(merit(&[], &t).unwrap_err(), Error::EmptySubset);
        assert!(merit(&[0, 0], &dup).is_err());
    }

    #[test]
    fn merit_ignores_order() {
        let t = table(
            vec![0.3, -0.7, 0.1],
            vec![
                vec![1.0, 0.2, -0.4],
                vec![0.2, 1.0, 0.5],
                vec![-0.4, 0.5, 1.0],
            ],
        );
        assert_eq!(
            merit(&[2, 0, 1], &t).unwrap(),
            merit(&[0, 1, 2], &t).unwrap()
        );
    }

    #[test]
    fn uncorrelated_everything_is_no_selection() {
        let t = table(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(best_first(&t).unwrap_err(), Error::NoSelection);
    }

    #[test]
    fn best_first_matches_exhaustive_on_a_small_table() {
        let t = table(
            vec![0.6, 0.55, 0.1, 0.58],
            vec![
                vec![1.0, 0.9, 0.1, 0.2],
                vec![0.9, 1.0, 0.0, 0.3],
                vec![0.1, 0.0, 1.0, 0.05],
                vec![0.2, 0.3, 0.05, 1.0],
            ],
        );
        let sel = best_first(&t).unwrap();
        let ex = exhaustive_search(&t).unwrap();
        assert_eq!(sel.subset.merit, ex.merit);
        assert_eq!(sel.subset.indices, ex.indices);
        assert!(!sel.trace.is_empty());
    }
}
