use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Dataset, Grade};
use crate::error::{Error, Result};
use crate::rng;

/// Per-column `(min, max)` recorded when normalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxStats {
    pub columns: Vec<(f64, f64)>,
}

impl MinMaxStats {
    /// Column extremes over present (non-`NaN`) values. A column with no
    /// present value records `(0, 0)`.
    pub fn fit(dataset: &Dataset) -> Self {
        let columns = (0..dataset.feature_count())
            .map(|c| {
                let (lo, hi) = dataset
                    .samples
                    .iter()
                    .map(|s| s.features[c])
                    .filter(|v| !v.is_nan())
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    });
                if lo > hi {
                    (0.0, 0.0)
                } else {
                    (lo, hi)
                }
            })
            .collect();
        Self { columns }
    }

    pub fn scale(&self, column: usize, value: f64) -> f64 {
        let (lo, hi) = self.columns[column];
        if value.is_nan() {
            value
        } else if hi > lo {
            (value - lo) / (hi - lo)
        } else {
            0.0
        }
    }

    /// Rescales `dataset` with these statistics. Values outside the recorded
    /// range map outside `[0, 1]`; missing values stay missing.
    pub fn apply(&self, dataset: &Dataset) -> Result<Dataset> {
        if self.columns.len() != dataset.feature_count() {
            return Err(Error::DimensionMismatch {
                what: "normalization statistics",
                expected: dataset.feature_count(),
                found: self.columns.len(),
            });
        }
        let mut out = dataset.clone();
        for s in &mut out.samples {
            for (c, v) in s.features.iter_mut().enumerate() {
                *v = self.scale(c, *v);
            }
        }
        Ok(out)
    }
}

/// Min-max normalizes every column to `[0, 1]`; constant columns become 0.
pub fn normalize_minmax(dataset: &Dataset) -> (Dataset, MinMaxStats) {
    let stats = MinMaxStats::fit(dataset);
    let out = stats
        .apply(dataset)
        .expect("statistics fitted on this dataset");
    (out, stats)
}

/// Replaces missing values with the mean of the column's present values.
pub fn impute_mean(dataset: &Dataset) -> Result<Dataset> {
    let mut means = Vec::with_capacity(dataset.feature_count());
    for c in 0..dataset.feature_count() {
        let (sum, n) = dataset
            .samples
            .iter()
            .map(|s| s.features[c])
            .filter(|v| !v.is_nan())
            .fold((0.0, 0usize), |(sum, n), v| (sum + v, n + 1));
        if n == 0 {
            if dataset.is_empty() {
                means.push(0.0);
                continue;
            }
            return Err(Error::FullyMissingColumn(c));
        }
        means.push(sum / n as f64);
    }
    let mut out = dataset.clone();
    for s in &mut out.samples {
        for (v, &m) in s.features.iter_mut().zip(&means) {
            if v.is_nan() {
                *v = m;
            }
        }
    }
    Ok(out)
}

/// Final per-class counts after topping up the smallest classes one sample
/// at a time (ties go to the lower class index) until `target_total`.
pub fn balanced_counts(counts: [usize; 5], target_total: usize) -> [usize; 5] {
    let mut out = counts;
    let mut total: usize = out.iter().sum();
    while total < target_total {
        let smallest = (0..5).min_by_key(|&i| (out[i], i)).expect("five classes");
        out[smallest] += 1;
        total += 1;
    }
    out
}

/// Oversamples by duplicating randomly chosen samples of the smaller classes
/// until the dataset holds `target_total` samples with class counts as equal
/// as the originals allow. Originals keep their order; duplicates follow.
pub fn balance_oversample(dataset: &Dataset, target_total: usize, seed: u64) -> Result<Dataset> {
    let counts = dataset.class_counts();
    if let Some(g) = Grade::ALL.iter().find(|g| counts[g.index()] == 0) {
        return Err(Error::EmptyClass(g.code()));
    }
    if target_total < dataset.len() {
        return Err(Error::InvalidConfig(alloc::format!(
            "balance target {target_total} is below the current size {}",
            dataset.len()
        )));
    }
    let wanted = balanced_counts(counts, target_total);
    let mut rng = rng::stream(seed, rng::stages::BALANCE);
    let mut out = dataset.clone();
    for g in Grade::ALL {
        let members: Vec<usize> = dataset
            .samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == g)
            .map(|(i, _)| i)
            .collect();
        for _ in counts[g.index()]..wanted[g.index()] {
            let pick = members[rng.gen_range(0..members.len())];
            out.samples.push(dataset.samples[pick].clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    /// Original sample indices placed in each part, ascending.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Classes with fewer than two samples; their split cannot be stratified.
    pub sparse_classes: Vec<Grade>,
}

/// Stratified, seeded train/test split.
///
/// The test part holds `n - round(n * train_fraction)` samples, shared out
/// between classes in proportion to their size by largest remainder.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if dataset.len() < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            found: dataset.len(),
        });
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(
            "train fraction must lie in (0, 1)".into(),
        ));
    }
    let n = dataset.len();
    let n_train = libm::round(n as f64 * train_fraction) as usize;
    let n_test = n - n_train;
    let counts = dataset.class_counts();

    let mut quota = [0usize; 5];
    let mut remainders = [(0usize, 0usize); 5];
    for i in 0..5 {
        let exact = counts[i] * n_test;
        quota[i] = exact / n;
        remainders[i] = (exact % n, i);
    }
    let mut left = n_test - quota.iter().sum::<usize>();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter() {
        if left == 0 {
            break;
        }
        if quota[i] < counts[i] {
            quota[i] += 1;
            left -= 1;
        }
    }

    let mut rng = rng::stream(seed, rng::stages::SPLIT);
    let mut test_indices = Vec::with_capacity(n_test);
    for g in Grade::ALL {
        let mut members: Vec<usize> = dataset
            .samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == g)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        test_indices.extend_from_slice(&members[..quota[g.index()]]);
    }
    test_indices.sort_unstable();
    let mut is_test = alloc::vec![false; n];
    for &i in &test_indices {
        is_test[i] = true;
    }
    let train_indices: Vec<usize> = (0..n).filter(|&i| !is_test[i]).collect();
    let pick = |idx: &[usize]| Dataset {
        schema: dataset.schema.clone(),
        samples: idx.iter().map(|&i| dataset.samples[i].clone()).collect(),
    };
    let sparse_classes = Grade::ALL
        .iter()
        .copied()
        .filter(|g| counts[g.index()] < 2)
        .collect();
    Ok(Split {
        train: pick(&train_indices),
        test: pick(&test_indices),
        train_indices,
        test_indices,
        sparse_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSchema, Sample};
    use alloc::string::String;
    use alloc::vec;

    fn one_column(values: &[f64]) -> Dataset {
        let schema = FeatureSchema::new(vec![String::from("x")]).unwrap();
        let samples = values
            .iter()
            .map(|&v| Sample {
                features: vec![v],
                label: Grade::A,
            })
            .collect();
        Dataset::new(schema, samples).unwrap()
    }

    fn labeled(counts: [usize; 5]) -> Dataset {
        let schema = FeatureSchema::new(vec![String::from("x")]).unwrap();
        let mut samples = Vec::new();
        for g in Grade::ALL {
            for i in 0..counts[g.index()] {
                samples.push(Sample {
                    features: vec![i as f64],
                    label: g,
                });
            }
        }
        Dataset::new(schema, samples).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let (d, stats) = normalize_minmax(&one_column(&[2.0, 4.0, 6.0]));
        assert_eq!(d.column(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(stats.columns, vec![(2.0, 6.0)]);
        let unit = one_column(&[0.0, 0.3, 1.0, 0.7]);
        assert_eq!(normalize_minmax(&unit).0, unit);
        assert_eq!(
            normalize_minmax(&one_column(&[5.0, 5.0, 5.0])).0.column(0),
            vec![0.0; 3]
        );
    }

    #[test]
    fn normalize_skips_missing() {
        let (d, stats) = normalize_minmax(&one_column(&[1.0, f64::NAN, 3.0]));
        assert_eq!(stats.columns, vec![(1.0, 3.0)]);
        let col = d.column(0);
        assert_eq!(col[0], 0.0);
        assert!(col[1].is_nan());
        assert_eq!(col[2], 1.0);
    }

    #[test]
    fn test_data_uses_training_statistics() {
        let (_, stats) = normalize_minmax(&one_column(&[0.0, 10.0]));
        let test = stats.apply(&one_column(&[5.0, 20.0])).unwrap();
        assert_eq!(test.column(0), vec![0.5, 2.0]);
    }

    #[test]
    fn impute_examples() {
        assert_eq!(
            impute_mean(&one_column(&[1.0, f64::NAN, 3.0]))
                .unwrap()
                .column(0),
            vec![1.0, 2.0, 3.0]
        );
        let full = one_column(&[0.1, 0.2]);
        assert_eq!(impute_mean(&full).unwrap(), full);
        assert_eq!(
            impute_mean(&one_column(&[0.5, f64::NAN, f64::NAN, 0.5]))
                .unwrap()
                .column(0),
            vec![0.5; 4]
        );
        assert_eq!(
            impute_mean(&one_column(&[f64::NAN, f64::NAN])).unwrap_err(),
            Error::FullyMissingColumn(0)
        );
    }

    #[test]
    fn balanced_count_examples() {
        assert_eq!(balanced_counts([10, 2, 0, 0, 0], 12), [10, 2, 0, 0, 0]);
        assert_eq!(balanced_counts([1, 1, 1, 10, 2], 20), [3, 3, 2, 10, 2]);
        let c = balanced_counts([40, 60, 100, 70, 43], 580);
        assert_eq!(c.iter().sum::<usize>(), 580);
        assert_eq!(c, [116; 5]);
    }

    #[test]
    fn balance_two_class_example() {
        // (10, 2) -> (10, 10) with the other classes already at 10
        let d = labeled([10, 2, 10, 10, 10]);
        let b = balance_oversample(&d, 50, 1).unwrap();
        assert_eq!(b.class_counts(), [10; 5]);
        assert_eq!(&b.samples[..d.len()], &d.samples[..]);
    }

    #[test]
    fn balance_is_identity_when_already_at_target() {
        let d = labeled([4; 5]);
        assert_eq!(balance_oversample(&d, 20, 9).unwrap(), d);
    }

    #[test]
    fn balance_rejects_empty_class_and_shrinking() {
        assert_eq!(
            balance_oversample(&labeled([3, 3, 0, 3, 3]), 20, 0).unwrap_err(),
            Error::EmptyClass(3)
        );
        assert!(balance_oversample(&labeled([3; 5]), 10, 0).is_err());
    }

    #[test]
    fn split_580_gives_522_and_58() {
        let d = labeled([116; 5]);
        let s = split(&d, 0.9, 4).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (522, 58));
        assert_eq!(s.test.class_counts(), [12, 12, 12, 11, 11]);
        assert!(s.sparse_classes.is_empty());
    }

    #[test]
    fn split_is_a_seeded_partition() {
        let d = labeled([30, 7, 12, 25, 3]);
        let a = split(&d, 0.9, 11).unwrap();
        let b = split(&d, 0.9, 11).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a
            .train_indices
            .iter()
            .chain(&a.test_indices)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..d.len()).collect::<Vec<_>>());
        let c = split(&d, 0.9, 12).unwrap();
        assert_ne!(a.test_indices, c.test_indices);
    }

    #[test]
    fn split_flags_sparse_classes_and_small_sets() {
        let s = split(&labeled([20, 1, 5, 5, 5]), 0.9, 0).unwrap();
        assert_eq!(s.sparse_classes, vec![Grade::B]);
        assert!(matches!(
            split(&labeled([1, 1, 1, 1, 1]), 0.9, 0),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
