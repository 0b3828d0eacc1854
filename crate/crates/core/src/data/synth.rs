//! Schema-faithful synthetic lecturer records.
//!
//! Rows are generated class first: the class counts are fixed up front, each
//! row then draws a group-grade triple that the decision table maps to its
//! class, and finally draws raw features whose group means fall inside each
//! grade's band. Portfolio and feedback items are five-step ratings rescaled
//! to `[0, 1]`; CAD1 and CAD2 are integer activity points and CAD3 is their
//! sum.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{
    final_label, Dataset, FeatureGroup, FeatureSchema, Grade, Sample, SubGrade, SubGrades,
    LABEL_RULES,
};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// Lower bounds of the group-mean bands for A*, A, B, C and D; anything
/// below the last bound is E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradeThresholds {
    pub bounds: [f64; 5],
}

impl Default for GradeThresholds {
    fn default() -> Self {
        Self {
            bounds: [0.9, 0.8, 0.7, 0.6, 0.5],
        }
    }
}

impl GradeThresholds {
    /// Grade of a group mean in `[0, 1]`. Portfolio grades stop at A, so
    /// with `allow_star == false` the A* band folds into A.
    pub fn grade(&self, mean: f64, allow_star: bool) -> SubGrade {
        let g = SubGrade::ALL[..5]
            .iter()
            .zip(self.bounds)
            .find(|&(_, lo)| mean >= lo)
            .map(|(&g, _)| g)
            .unwrap_or(SubGrade::E);
        if g == SubGrade::AStar && !allow_star {
            SubGrade::A
        } else {
            g
        }
    }

    /// Group grades of one raw row laid out under `schema`.
    ///
    /// Portfolio and feedback use the mean of their items; CAD uses
    /// `CAD3 / (2 * cad_max_points)`.
    pub fn subgrades(
        &self,
        schema: &FeatureSchema,
        row: &[f64],
        cad_max_points: u32,
    ) -> Result<SubGrades> {
        let mut prf = (0.0, 0usize);
        let mut fb = (0.0, 0usize);
        for (name, &v) in schema.names().iter().zip(row) {
            match FeatureGroup::of(name) {
                Some(FeatureGroup::Portfolio) => prf = (prf.0 + v, prf.1 + 1),
                Some(FeatureGroup::Feedback) => fb = (fb.0 + v, fb.1 + 1),
                _ => {}
            }
        }
        let cad3 = schema
            .index_of("CAD3")
            .ok_or_else(|| Error::UnknownFeature("CAD3".into()))?;
        if prf.1 == 0 || fb.1 == 0 {
            return Err(Error::InvalidConfig(
                "schema lacks portfolio or feedback items".into(),
            ));
        }
        Ok(SubGrades {
            cad: self.grade(row[cad3] / (2 * cad_max_points) as f64, true),
            fb: self.grade(fb.0 / fb.1 as f64, true),
            prf: self.grade(prf.0 / prf.1 as f64, false),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub count: usize,
    pub seed: u64,
    /// Half-width of the uniform perturbation added to every feature after
    /// labeling, in units of the feature's full range.
    pub noise_level: f64,
    /// Probability that any single feature value is blanked.
    pub missing_rate: f64,
    /// Relative class frequencies for A..E.
    pub class_weights: [f64; 5],
    pub thresholds: GradeThresholds,
    /// Upper bound of CAD1 and CAD2 points.
    pub cad_max_points: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            count: 313,
            seed: 0,
            noise_level: 0.0,
            missing_rate: 0.0,
            class_weights: [0.13, 0.19, 0.32, 0.22, 0.14],
            thresholds: GradeThresholds::default(),
            cad_max_points: 10,
        }
    }
}

/// Every (CAD, FB, portfolio) triple the decision table maps to `label`.
pub fn covered_triples(label: Grade) -> Vec<SubGrades> {
    let mut out = Vec::new();
    for cad in SubGrade::ALL {
        for fb in SubGrade::ALL {
            for prf in SubGrade::ALL {
                let g = SubGrades::new(cad, fb, prf);
                if final_label(g) == Ok(label) {
                    out.push(g);
                }
            }
        }
    }
    debug_assert!(LABEL_RULES.iter().any(|r| r.label == label));
    out
}

/// Class counts by largest remainder, with at least one row for every class
/// of positive weight.
fn class_counts(count: usize, weights: &[f64; 5]) -> Result<[usize; 5]> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidConfig(
            "class weights must be non-negative with a positive sum".into(),
        ));
    }
    let mut counts = [0usize; 5];
    let mut fractions = [(0.0, 0usize); 5];
    for i in 0..5 {
        let exact = count as f64 * weights[i] / total;
        counts[i] = libm::floor(exact) as usize;
        fractions[i] = (exact - counts[i] as f64, i);
    }
    let left = count - counts.iter().sum::<usize>();
    fractions.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    for &(_, i) in fractions.iter().cycle().take(left) {
        counts[i] += 1;
    }
    // guarantee presence by borrowing from the largest class
    for i in 0..5 {
        if weights[i] > 0.0 && counts[i] == 0 {
            let donor = (0..5)
                .max_by_key(|&j| (counts[j], usize::MAX - j))
                .expect("five classes");
            if counts[donor] > 1 {
                counts[donor] -= 1;
                counts[i] += 1;
            }
        }
    }
    Ok(counts)
}

/// Integer totals `s` in `0..=max_total` whose scaled mean `s / max_total`
/// falls in the band of `grade`.
fn totals_in_band(
    grade: SubGrade,
    allow_star: bool,
    max_total: u32,
    th: &GradeThresholds,
) -> Vec<u32> {
    (0..=max_total)
        .filter(|&s| th.grade(s as f64 / max_total as f64, allow_star) == grade)
        .collect()
}

/// Spreads `total` units over `slots` ratings, each holding at most 4.
fn spread(total: u32, slots: usize, rng: &mut StreamRng) -> Vec<u32> {
    let mut out = alloc::vec![0u32; slots];
    for _ in 0..total {
        loop {
            let i = rng.gen_range(0..slots);
            if out[i] < 4 {
                out[i] += 1;
                break;
            }
        }
    }
    out
}

struct Layout {
    prf: Vec<usize>,
    fb: Vec<usize>,
    cad1: usize,
    cad2: usize,
    cad3: usize,
}

impl Layout {
    fn of(schema: &FeatureSchema) -> Result<Self> {
        let mut prf = Vec::new();
        let mut fb = Vec::new();
        for (i, n) in schema.names().iter().enumerate() {
            match FeatureGroup::of(n) {
                Some(FeatureGroup::Portfolio) => prf.push(i),
                Some(FeatureGroup::Feedback) => fb.push(i),
                _ => {}
            }
        }
        let idx = |n: &str| {
            schema
                .index_of(n)
                .ok_or_else(|| Error::UnknownFeature(n.into()))
        };
        Ok(Self {
            prf,
            fb,
            cad1: idx("CAD1")?,
            cad2: idx("CAD2")?,
            cad3: idx("CAD3")?,
        })
    }
}

fn draw_row(
    target: SubGrades,
    layout: &Layout,
    width: usize,
    config: &SynthConfig,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    let th = &config.thresholds;
    let mut row = alloc::vec![0.0; width];
    for (cols, grade, star) in [
        (&layout.prf, target.prf, false),
        (&layout.fb, target.fb, true),
    ] {
        let max_total = 4 * cols.len() as u32;
        let options = totals_in_band(grade, star, max_total, th);
        let total = *options.choose(rng).ok_or_else(|| {
            Error::InvalidConfig(alloc::format!("thresholds leave grade {grade} unreachable"))
        })?;
        for (&c, r) in cols.iter().zip(spread(total, cols.len(), rng)) {
            row[c] = r as f64 / 4.0;
        }
    }
    let cad_max = config.cad_max_points;
    let options = totals_in_band(target.cad, true, 2 * cad_max, th);
    let total = *options.choose(rng).ok_or_else(|| {
        Error::InvalidConfig(alloc::format!(
            "thresholds leave CAD grade {} unreachable",
            target.cad
        ))
    })?;
    let lo = total.saturating_sub(cad_max);
    let hi = total.min(cad_max);
    let cad1 = rng.gen_range(lo..=hi);
    row[layout.cad1] = cad1 as f64;
    row[layout.cad2] = (total - cad1) as f64;
    row[layout.cad3] = total as f64;
    Ok(row)
}

fn perturb(row: &mut [f64], layout: &Layout, config: &SynthConfig, rng: &mut StreamRng) {
    let noise = config.noise_level;
    if noise > 0.0 {
        for &c in layout.prf.iter().chain(&layout.fb) {
            row[c] = (row[c] + rng.gen_range(-noise..=noise)).clamp(0.0, 1.0);
        }
        let span = config.cad_max_points as f64;
        for c in [layout.cad1, layout.cad2] {
            row[c] = (row[c] + span * rng.gen_range(-noise..=noise)).clamp(0.0, span);
        }
        row[layout.cad3] = row[layout.cad1] + row[layout.cad2];
    }
    if config.missing_rate > 0.0 {
        for v in row.iter_mut() {
            if rng.gen::<f64>() < config.missing_rate {
                *v = f64::NAN;
            }
        }
    }
}

/// Generates `config.count` raw rows over the combined 26-feature schema.
///
/// Labels always come from [`final_label`] applied to the grades of the
/// noise-free row; a row whose grades are uncovered or disagree with the
/// intended class is redrawn.
pub fn synthesize(config: &SynthConfig) -> Result<Dataset> {
    if config.count < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            found: config.count,
        });
    }
    if !(config.noise_level >= 0.0) || !(0.0..1.0).contains(&config.missing_rate) {
        return Err(Error::InvalidConfig(
            "noise must be >= 0 and missing rate in [0, 1)".into(),
        ));
    }
    if config.cad_max_points == 0 {
        return Err(Error::InvalidConfig(
            "cad_max_points must be positive".into(),
        ));
    }
    let schema = FeatureSchema::combined();
    let layout = Layout::of(&schema)?;
    let counts = class_counts(config.count, &config.class_weights)?;
    let mut rng = rng::stream(config.seed, rng::stages::SYNTHESIZE);

    let mut labels: Vec<Grade> = Grade::ALL
        .iter()
        .flat_map(|&g| core::iter::repeat_n(g, counts[g.index()]))
        .collect();
    labels.shuffle(&mut rng);

    let triples: Vec<Vec<SubGrades>> = Grade::ALL.iter().map(|&g| covered_triples(g)).collect();
    let mut samples = Vec::with_capacity(config.count);
    for label in labels {
        let options = &triples[label.index()];
        let mut attempts = 0;
        let row = loop {
            let target = *options
                .choose(&mut rng)
                .expect("every class has a covering row");
            let row = draw_row(target, &layout, schema.len(), config, &mut rng)?;
            let grades = config
                .thresholds
                .subgrades(&schema, &row, config.cad_max_points)?;
            if final_label(grades) == Ok(label) {
                break row;
            }
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::InvalidConfig(alloc::format!(
                    "could not draw a row labeled {label} under these thresholds"
                )));
            }
        };
        let mut row = row;
        perturb(&mut row, &layout, config, &mut rng);
        samples.push(Sample {
            features: row,
            label,
        });
    }
    Dataset::new(schema, samples)
}
