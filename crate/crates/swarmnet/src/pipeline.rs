//! End-to-end flow: normalize, impute, balance, select, split, train, score.

use std::path::Path;

use swarmnet_core::backprop::{train_bp, BpConfig};
use swarmnet_core::data::{
    balance_oversample, impute_mean, normalize_minmax, split, synthesize, Dataset, FeatureSchema,
    Grade, MinMaxStats, SynthConfig, TargetEncoding, REFERENCE_FEATURES,
};
use swarmnet_core::eval::{evaluate, EvaluationReport, Mode};
use swarmnet_core::pso::{pso_train, PsoConfig};
use swarmnet_core::rng::{self, derive_seed, stages};
use swarmnet_core::select::select_features;
use swarmnet_core::{Network, Topology};

use crate::error::Result;
use crate::formats::{self, SelectionFile, StatsFile};
use crate::report::{ReportDocument, SetReport};

#[derive(Debug, Clone, PartialEq)]
pub enum Trainer {
    Bp(BpConfig),
    Pso(PsoConfig),
}

impl Trainer {
    pub fn name(&self) -> &'static str {
        match self {
            Trainer::Bp(_) => "bp",
            Trainer::Pso(_) => "pso",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum FeatureChoice {
    #[default]
    All,
    Named(Vec<String>),
    Cfs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Master seed; every random stage derives its own stream from it.
    pub seed: u64,
    /// Size after oversampling. `None` tops up to the smallest fully
    /// balanced size.
    pub balance_total: Option<usize>,
    pub train_fraction: f64,
    pub features: FeatureChoice,
    pub hidden: Vec<usize>,
    pub trainer: Trainer,
    /// Optional backpropagation pass over the trained weights. Off by
    /// default.
    pub refine: Option<BpConfig>,
    /// Uniform range of the initial weights for backpropagation.
    pub init_range: (f64, f64),
    pub encoding: TargetEncoding,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            balance_total: None,
            train_fraction: 0.9,
            features: FeatureChoice::All,
            hidden: vec![12, 8],
            trainer: Trainer::Pso(PsoConfig::default()),
            refine: None,
            init_range: (-1.0, 1.0),
            encoding: TargetEncoding::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    /// Statistics of the kept columns, fitted on the full dataset.
    pub stats: StatsFile,
    pub selection: Option<SelectionFile>,
    pub balanced: Dataset,
    pub train: Dataset,
    pub test: Dataset,
    pub sparse_classes: Vec<Grade>,
}

/// Smallest size at which every class can match the largest one.
pub fn full_balance_total(ds: &Dataset) -> usize {
    5 * ds.class_counts().iter().max().copied().unwrap_or(0)
}

pub fn preprocess(raw: &Dataset, config: &PipelineConfig) -> Result<Prepared> {
    let (normalized, stats) = normalize_minmax(raw);
    let all_stats = StatsFile::new(&raw.schema, &stats);
    let complete = impute_mean(&normalized)?;
    let total = config
        .balance_total
        .unwrap_or_else(|| full_balance_total(&complete).max(complete.len()));
    let balanced = balance_oversample(&complete, total, config.seed)?;

    let (kept, selection) = match &config.features {
        FeatureChoice::All => (balanced, None),
        FeatureChoice::Named(names) => {
            let kept = balanced.select_named(names)?;
            (
                kept,
                Some(preset_selection("custom", &balanced.schema, names)?),
            )
        }
        FeatureChoice::Cfs => {
            let sel = select_features(&balanced)?;
            let file = SelectionFile::from_search(&balanced.schema, &sel);
            (balanced.select_columns(&sel.subset.indices)?, Some(file))
        }
    };
    let names = kept.schema.names().to_vec();
    let stats = StatsFile {
        columns: names
            .iter()
            .map(|n| {
                all_stats
                    .columns
                    .iter()
                    .find(|c| &c.name == n)
                    .expect("kept column has stats")
                    .clone()
            })
            .collect(),
    };
    let parts = split(&kept, config.train_fraction, config.seed)?;
    Ok(Prepared {
        stats,
        selection,
        balanced: kept,
        train: parts.train,
        test: parts.test,
        sparse_classes: parts.sparse_classes,
    })
}

pub fn preset_selection(
    label: &str,
    schema: &FeatureSchema,
    names: &[String],
) -> Result<SelectionFile> {
    Ok(SelectionFile {
        method: format!("preset:{label}"),
        indices: schema.indices_of(names)?,
        names: names.to_vec(),
        merit: None,
        trace: Vec::new(),
    })
}

/// Named presets understood by the selection step.
pub fn preset(name: &str) -> Option<Vec<String>> {
    match name {
        "table3" => Some(REFERENCE_FEATURES.iter().map(|s| s.to_string()).collect()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub network: Network,
    /// Training MSE per epoch; for swarm training entry 0 is the initial
    /// swarm.
    pub trace: Vec<f64>,
    pub first_epoch: usize,
}

pub fn train(train: &Dataset, config: &PipelineConfig) -> Result<Trained> {
    let topology = Topology::new(train.feature_count(), &config.hidden, 1)?;
    let patterns = train.patterns(&config.encoding);
    let (network, mut trace, first_epoch) = match &config.trainer {
        Trainer::Bp(bp) => {
            let mut init_rng = rng::stream(derive_seed(config.seed, stages::INIT), 0);
            let (lo, hi) = config.init_range;
            let start = Network::random(topology, lo, hi, &mut init_rng);
            let cfg = BpConfig {
                seed: derive_seed(config.seed, stages::TRAIN),
                ..bp.clone()
            };
            let (net, t) = train_bp(start, &patterns, &cfg)?;
            (net, t.epoch_errors, 1)
        }
        Trainer::Pso(pso) => {
            let cfg = PsoConfig {
                seed: derive_seed(config.seed, stages::SWARM),
                ..pso.clone()
            };
            let (best, outcome) = pso_train(&patterns, &topology, &cfg)?;
            (Network::decode(topology, &best)?, outcome.trace, 0)
        }
    };
    let network = match &config.refine {
        Some(bp) => {
            let cfg = BpConfig {
                seed: derive_seed(config.seed, stages::TRAIN) ^ 1,
                ..bp.clone()
            };
            let (net, t) = train_bp(network, &patterns, &cfg)?;
            trace.extend(t.epoch_errors);
            net
        }
        None => network,
    };
    Ok(Trained {
        network,
        trace,
        first_epoch,
    })
}

pub fn score(
    network: &Network,
    ds: &Dataset,
    encoding: &TargetEncoding,
    modes: &[Mode],
) -> Result<Vec<EvaluationReport>> {
    Ok(modes
        .iter()
        .map(|&m| evaluate(network, &ds.samples, encoding, m))
        .collect::<swarmnet_core::Result<_>>()?)
}

/// Applies recorded statistics to a raw dataset and fills gaps, yielding
/// model inputs in the statistics' column order.
pub fn prepare_for_model(raw: &Dataset, stats: &StatsFile) -> Result<Dataset> {
    let picked = raw.select_named(&stats.names())?;
    let scaled = stats.stats().apply(&picked)?;
    Ok(impute_mean(&scaled)?)
}

pub fn stats_from(schema: &FeatureSchema, stats: &MinMaxStats) -> StatsFile {
    StatsFile::new(schema, stats)
}

pub const SYNTHETIC_LABEL: &str =
    "synthetic data (generated stand-in, not the original survey data)";

/// Settings of the end-to-end rehearsal run.
#[derive(Debug, Clone, PartialEq)]
pub struct RehearsalConfig {
    pub seed: u64,
    pub count: usize,
    pub noise_level: f64,
    pub missing_rate: f64,
    pub balance_total: usize,
    pub pso: PsoConfig,
}

impl Default for RehearsalConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 313,
            noise_level: 0.05,
            missing_rate: 0.0,
            balance_total: 580,
            pso: PsoConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rehearsal {
    pub raw: Dataset,
    pub prepared: Prepared,
    pub trained: Trained,
    pub document: ReportDocument,
}

/// Generates a synthetic cohort, balances it, keeps the fourteen reference
/// features, trains a 14-12-8-1 network with the swarm and scores it in both
/// modes on the train and test parts.
pub fn rehearse(config: &RehearsalConfig) -> Result<Rehearsal> {
    let raw = synthesize(&SynthConfig {
        count: config.count,
        seed: config.seed,
        noise_level: config.noise_level,
        missing_rate: config.missing_rate,
        ..SynthConfig::default()
    })?;
    let pipeline = PipelineConfig {
        seed: config.seed,
        balance_total: Some(config.balance_total),
        features: FeatureChoice::Named(preset("table3").expect("built-in preset")),
        hidden: vec![12, 8],
        trainer: Trainer::Pso(config.pso.clone()),
        ..PipelineConfig::default()
    };
    let mut prepared = preprocess(&raw, &pipeline)?;
    if let Some(sel) = &mut prepared.selection {
        sel.method = "preset:table3".into();
    }
    let trained = train(&prepared.train, &pipeline)?;
    let modes = [Mode::Strict, Mode::Tolerant];
    let enc = pipeline.encoding;
    let sets = vec![
        SetReport::new(
            "train",
            &score(&trained.network, &prepared.train, &enc, &modes)?,
        )?,
        SetReport::new(
            "test",
            &score(&trained.network, &prepared.test, &enc, &modes)?,
        )?,
    ];
    let document = ReportDocument::new(
        &format!(
            "{SYNTHETIC_LABEL}; {} rows balanced to {}",
            raw.len(),
            prepared.balanced.len()
        ),
        &trained.network.topology().to_string(),
        "swarm-trained",
        sets,
    );
    Ok(Rehearsal {
        raw,
        prepared,
        trained,
        document,
    })
}

/// Runs [`rehearse`] and writes every artifact into `dir`.
pub fn write_rehearsal(run: &Rehearsal, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| crate::error::IoError::io(dir, e))?;
    crate::csv_io::save_csv(&run.raw, &dir.join("dataset.csv"))?;
    crate::csv_io::save_csv(&run.prepared.train, &dir.join("train.csv"))?;
    crate::csv_io::save_csv(&run.prepared.test, &dir.join("test.csv"))?;
    formats::save_json(&run.prepared.stats, &dir.join("stats.json"))?;
    if let Some(sel) = &run.prepared.selection {
        formats::save_json(sel, &dir.join("selection.json"))?;
    }
    formats::save_model(&run.trained.network, &dir.join("model.txt"))?;
    formats::write_text(
        &dir.join("trace.csv"),
        &formats::trace_to_csv(&run.trained.trace, run.trained.first_epoch),
    )?;
    formats::write_text(&dir.join("report.json"), &run.document.to_json())?;
    formats::write_text(&dir.join("report.txt"), &run.document.to_text())?;
    Ok(())
}
