//! Command-line interface.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use swarmnet_core::backprop::BpConfig;
use swarmnet_core::data::{impute_mean, synthesize, Dataset, Grade, SynthConfig};
use swarmnet_core::eval::{compare_models, Mode};
use swarmnet_core::pso::PsoConfig;
use swarmnet_core::select::{merit, select_features, CorrelationTable};

use crate::csv_io::{load_csv, save_csv};
use crate::formats::{self, SelectionFile};
use crate::pipeline::{self, FeatureChoice, PipelineConfig, RehearsalConfig, Trainer};
use crate::report::{ComparisonJson, ReportDocument, SetReport};

pub const SEED_ENV: &str = "SWARMNET_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "swarmnet",
    version,
    about = "Train and score swarm-optimized feedforward networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Reduce a dataset to a preset or CFS-selected feature subset.
    Select(SelectArgs),
    /// Preprocess a dataset, train a network and save it.
    Train(TrainArgs),
    /// Score a saved model on a dataset.
    Evaluate(EvaluateArgs),
    /// Compare a strict and a tolerant report.
    Compare(CompareArgs),
    /// Run the full pipeline on synthetic data and write every artifact.
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub missing_rate: Option<f64>,
    /// key=value file with count, seed, noise_level, missing_rate.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, conflicts_with = "cfs", required_unless_present = "cfs")]
    pub preset: Option<String>,
    #[arg(long)]
    pub cfs: bool,
    /// Reduced dataset.
    #[arg(long)]
    pub out: PathBuf,
    /// Selection report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainerKind {
    Bp,
    Pso,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub trainer: Option<TrainerKind>,
    /// Hidden layer sizes, e.g. `12,8`.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    /// Epoch budget for either trainer.
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub target_error: Option<f64>,
    #[arg(long)]
    pub inertia: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub exit_error: Option<f64>,
    #[arg(long)]
    pub velocity_clamp: Option<f64>,
    /// Draw one r1, r2 pair per particle update.
    #[arg(long)]
    pub scalar_r: bool,
    #[arg(long)]
    pub balance_total: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Backpropagation epochs run on the trained weights; 0 disables.
    #[arg(long)]
    pub refine_bp_epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// key=value file with any of the options above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
    /// Per-epoch training error CSV; defaults to `<model>.trace.csv`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Normalization statistics (JSON).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long)]
    pub train_out: Option<PathBuf>,
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Tolerant,
    Both,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Normalization statistics to apply to raw data first.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    /// Report (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Plain-text table.
    #[arg(long)]
    pub text: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Report holding the strict-mode result.
    #[arg(long)]
    pub strict: PathBuf,
    /// Report holding the tolerant-mode result.
    #[arg(long)]
    pub tolerant: PathBuf,
    /// Evaluated set to compare; defaults to `test`, else the first set.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "reproduce-out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 313)]
    pub count: usize,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 580)]
    pub balance_total: usize,
}

/// Seed from the environment, if set.
fn env_seed() -> anyhow::Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{SEED_ENV}=`{v}` is not an integer")),
        Err(_) => Ok(None),
    }
}

/// Values from a key=value file, consumed key by key so leftovers can be
/// reported.
struct ConfigValues {
    path: PathBuf,
    values: BTreeMap<String, String>,
}

impl ConfigValues {
    fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        Ok(match path {
            Some(p) => Self {
                path: p.to_path_buf(),
                values: formats::load_key_values(p)?,
            },
            None => Self {
                path: PathBuf::new(),
                values: BTreeMap::new(),
            },
        })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> anyhow::Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| anyhow!("{}: invalid value `{v}` for `{key}`", self.path.display())),
        }
    }

    fn finish(self) -> anyhow::Result<()> {
        if let Some(k) = self.values.keys().next() {
            bail!("{}: unknown key `{k}`", self.path.display());
        }
        Ok(())
    }
}

/// Flag, then config file, then fallback.
fn pick<T>(flag: Option<T>, file: Option<T>, fallback: T) -> T {
    flag.or(file).unwrap_or(fallback)
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> anyhow::Result<u64> {
    Ok(match flag.or(file) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

fn class_summary(ds: &Dataset) -> String {
    let counts = ds.class_counts();
    Grade::ALL
        .iter()
        .map(|g| format!("{}={}", g.letter(), counts[g.index()]))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn generate_config(args: &GenerateArgs) -> anyhow::Result<SynthConfig> {
    let mut file = ConfigValues::load(args.config.as_deref())?;
    let count = pick(args.count, file.take("count")?, 313);
    let seed = resolve_seed(args.seed, file.take("seed")?)?;
    let noise_level = pick(args.noise, file.take("noise_level")?, 0.0);
    let missing_rate = pick(args.missing_rate, file.take("missing_rate")?, 0.0);
    file.finish()?;
    Ok(SynthConfig {
        count,
        seed,
        noise_level,
        missing_rate,
        ..SynthConfig::default()
    })
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<()> {
    let cfg = generate_config(&args)?;
    let ds = synthesize(&cfg)?;
    save_csv(&ds, &args.out)?;
    println!(
        "wrote {} rows to {} ({})",
        ds.len(),
        args.out.display(),
        class_summary(&ds)
    );
    Ok(())
}

fn cmd_select(args: SelectArgs) -> anyhow::Result<()> {
    let ds = load_csv(&args.data)?;
    let (reduced, report) = if let Some(name) = &args.preset {
        let names = pipeline::preset(name)
            .ok_or_else(|| anyhow!("unknown preset `{name}` (known: table3)"))?;
        let reduced = ds
            .select_named(&names)
            .with_context(|| format!("applying preset `{name}`"))?;
        let mut file = pipeline::preset_selection(name, &ds.schema, &names)?;
        if ds.len() >= 3 {
            let table = CorrelationTable::from_dataset(&impute_mean(&ds)?)?;
            file.merit = merit(&file.indices, &table).ok();
        }
        (reduced, file)
    } else {
        // correlations are scale-free, so raw values with mean-filled gaps suffice
        let sel = select_features(&impute_mean(&ds)?)?;
        (
            ds.select_columns(&sel.subset.indices)?,
            SelectionFile::from_search(&ds.schema, &sel),
        )
    };
    save_csv(&reduced, &args.out)?;
    if let Some(p) = &args.report {
        formats::save_json(&report, p)?;
    }
    println!(
        "kept {} of {} features: {}",
        reduced.feature_count(),
        ds.feature_count(),
        report.names.join(",")
    );
    Ok(())
}

pub fn train_config(args: &TrainArgs) -> anyhow::Result<PipelineConfig> {
    let mut file = ConfigValues::load(args.config.as_deref())?;
    let trainer_name: Option<String> = file.take("trainer")?;
    let file_trainer = match trainer_name.as_deref() {
        None => None,
        Some("bp") => Some(TrainerKind::Bp),
        Some("pso") => Some(TrainerKind::Pso),
        Some(other) => bail!("unknown trainer `{other}` (expected bp or pso)"),
    };
    let file_hidden = match file.take::<String>("hidden")? {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| anyhow!("invalid hidden layer list `{s}`"))?,
        ),
    };
    let kind = pick(args.trainer, file_trainer, TrainerKind::Pso);
    let bp_default = BpConfig::default();
    let pso_default = PsoConfig::default();
    let max_epochs = args.max_epochs.or(file.take("max_epochs")?);
    let bp = BpConfig {
        learning_rate: pick(args.lr, file.take("lr")?, bp_default.learning_rate),
        momentum: pick(args.momentum, file.take("momentum")?, bp_default.momentum),
        max_epochs: max_epochs.unwrap_or(bp_default.max_epochs),
        target_error: pick(
            args.target_error,
            file.take("target_error")?,
            bp_default.target_error,
        ),
        seed: 0,
    };
    let file_scalar_r: Option<bool> = file.take("scalar_r")?;
    let pso = PsoConfig {
        inertia: pick(args.inertia, file.take("inertia")?, pso_default.inertia),
        c1: pick(args.c1, file.take("c1")?, pso_default.c1),
        c2: pick(args.c2, file.take("c2")?, pso_default.c2),
        particle_count: pick(
            args.particles,
            file.take("particles")?,
            pso_default.particle_count,
        ),
        max_epochs: max_epochs.unwrap_or(pso_default.max_epochs),
        exit_error: pick(
            args.exit_error,
            file.take("exit_error")?,
            pso_default.exit_error,
        ),
        velocity_clamp: pick(
            args.velocity_clamp,
            file.take("velocity_clamp")?,
            pso_default.velocity_clamp,
        ),
        scalar_r: args.scalar_r || file_scalar_r.unwrap_or(false),
        ..pso_default
    };
    let refine_epochs = pick(args.refine_bp_epochs, file.take("refine_bp_epochs")?, 0);
    let hidden = pick(args.hidden.clone(), file_hidden, vec![12, 8]);
    let balance_total = args.balance_total.or(file.take("balance_total")?);
    let train_fraction = pick(args.train_fraction, file.take("train_fraction")?, 0.9);
    let seed = resolve_seed(args.seed, file.take("seed")?)?;
    file.finish()?;

    let trainer = match kind {
        TrainerKind::Bp => {
            bp.validate()?;
            Trainer::Bp(bp.clone())
        }
        TrainerKind::Pso => {
            pso.validate()?;
            Trainer::Pso(pso)
        }
    };
    let refine = (refine_epochs > 0).then_some(BpConfig {
        max_epochs: refine_epochs,
        ..bp
    });
    Ok(PipelineConfig {
        seed,
        balance_total,
        train_fraction,
        features: FeatureChoice::All,
        hidden,
        trainer,
        refine,
        ..PipelineConfig::default()
    })
}

fn cmd_train(args: TrainArgs) -> anyhow::Result<()> {
    let cfg = train_config(&args)?;
    let raw = load_csv(&args.data)?;
    let prepared = pipeline::preprocess(&raw, &cfg)?;
    for g in &prepared.sparse_classes {
        eprintln!(
            "warning: class {} has fewer than two samples; split is not stratified for it",
            g.letter()
        );
    }
    let trained = pipeline::train(&prepared.train, &cfg)?;
    formats::save_model(&trained.network, &args.model)?;
    let trace_path = args.trace.clone().unwrap_or_else(|| {
        let mut p = args.model.clone().into_os_string();
        p.push(".trace.csv");
        PathBuf::from(p)
    });
    formats::write_text(
        &trace_path,
        &formats::trace_to_csv(&trained.trace, trained.first_epoch),
    )?;
    if let Some(p) = &args.stats {
        formats::save_json(&prepared.stats, p)?;
    }
    if let Some(p) = &args.train_out {
        save_csv(&prepared.train, p)?;
    }
    if let Some(p) = &args.test_out {
        save_csv(&prepared.test, p)?;
    }
    println!(
        "trained {} ({}) on {} samples, {} held out; final training MSE {:.6}",
        trained.network.topology(),
        cfg.trainer.name(),
        prepared.train.len(),
        prepared.test.len(),
        trained.trace.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn file_label(p: &Path) -> String {
    p.file_name().map_or_else(
        || p.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let network = formats::load_model(&args.model)?;
    let raw = load_csv(&args.data)?;
    let ds = match &args.stats {
        Some(p) => pipeline::prepare_for_model(&raw, &formats::load_json(p)?)?,
        None => raw,
    };
    let inputs = network.topology().input_count();
    if ds.feature_count() != inputs {
        bail!(
            "model {} expects {inputs} inputs but {} has {} feature columns",
            network.topology(),
            args.data.display(),
            ds.feature_count()
        );
    }
    if ds.has_missing() {
        bail!(
            "{}: missing values; pass --stats or impute first",
            args.data.display()
        );
    }
    let modes: &[Mode] = match args.mode {
        ModeArg::Strict => &[Mode::Strict],
        ModeArg::Tolerant => &[Mode::Tolerant],
        ModeArg::Both => &[Mode::Strict, Mode::Tolerant],
    };
    let reports = pipeline::score(&network, &ds, &Default::default(), modes)?;
    let set = SetReport::new("eval", &reports)?;
    let doc = ReportDocument::new(
        &file_label(&args.data),
        &network.topology().to_string(),
        &file_label(&args.model),
        vec![set],
    );
    formats::write_text(&args.out, &doc.to_json())?;
    if let Some(p) = &args.text {
        formats::write_text(p, &doc.to_text())?;
    }
    for r in &doc.sets[0].reports {
        println!(
            "{}: {}/{} correct ({:.2}%)",
            r.mode,
            r.ccni,
            r.ccni + r.icni,
            r.cci
        );
    }
    if let Some(c) = &doc.sets[0].comparison {
        println!("tolerant minus strict: {:+.2} points", c.difference);
    }
    Ok(())
}

fn pick_set<'a>(
    doc: &'a ReportDocument,
    name: Option<&str>,
    path: &Path,
) -> anyhow::Result<&'a SetReport> {
    let found = match name {
        Some(n) => doc.set(n),
        None => doc.set("test").or(doc.sets.first()),
    };
    found.ok_or_else(|| {
        anyhow!(
            "{}: no evaluated set `{}`",
            path.display(),
            name.unwrap_or("test")
        )
    })
}

fn cmd_compare(args: CompareArgs) -> anyhow::Result<()> {
    let strict_doc: ReportDocument = formats::load_json(&args.strict)?;
    let tolerant_doc: ReportDocument = formats::load_json(&args.tolerant)?;
    let s_set = pick_set(&strict_doc, args.set.as_deref(), &args.strict)?;
    let t_set = pick_set(&tolerant_doc, Some(&s_set.set), &args.tolerant)?;
    let strict = s_set
        .report(Mode::Strict)
        .and_then(|r| r.to_report())
        .ok_or_else(|| {
            anyhow!(
                "{}: no strict report for set `{}`",
                args.strict.display(),
                s_set.set
            )
        })?;
    let tolerant = t_set
        .report(Mode::Tolerant)
        .and_then(|r| r.to_report())
        .ok_or_else(|| {
            anyhow!(
                "{}: no tolerant report for set `{}`",
                args.tolerant.display(),
                t_set.set
            )
        })?;
    let cmp = ComparisonJson::new(&compare_models(&strict, &tolerant)?);
    formats::save_json(&cmp, &args.out)?;
    println!(
        "strict {:.2}%  tolerant {:.2}%  difference {:+.2} points",
        cmp.strict_accuracy, cmp.tolerant_accuracy, cmp.difference
    );
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> anyhow::Result<()> {
    let cfg = RehearsalConfig {
        seed: resolve_seed(args.seed, None)?,
        count: args.count,
        noise_level: args.noise,
        balance_total: args.balance_total,
        ..RehearsalConfig::default()
    };
    let run = pipeline::rehearse(&cfg)?;
    pipeline::write_rehearsal(&run, &args.out_dir)?;
    println!("SYNTHETIC DATA: results below come from generated data, not the original survey.");
    print!("{}", run.document.to_text());
    println!("artifacts written to {}", args.out_dir.display());
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Select(a) => cmd_select(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::ReproducePaper(a) => cmd_reproduce(a),
    }
}
