use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::Parser;
use swarmnet::cli::{train_config, Cli};
use swarmnet::csv_io::{load_csv, save_csv};
use swarmnet::formats::SelectionFile;
use swarmnet::pipeline::Trainer;
use swarmnet::report::ReportDocument;
use swarmnet_core::data::{Dataset, FeatureSchema, Grade, Sample};
use swarmnet_core::select::{exhaustive_search, CorrelationTable};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_swarmnet"));
    c.env_remove("SWARMNET_SEED");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn generate_is_seeded_and_complete() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(
        p,
        &[
            "generate", "--count", "580", "--seed", "7", "--out", "a.csv",
        ],
    );
    ok(
        p,
        &[
            "generate", "--count", "580", "--seed", "7", "--out", "b.csv",
        ],
    );
    assert_eq!(read(p, "a.csv"), read(p, "b.csv"));
    let ds = load_csv(&p.join("a.csv")).unwrap();
    assert_eq!(ds.len(), 580);
    assert_eq!(ds.feature_count(), 26);
    assert!(ds.class_counts().iter().all(|&c| c > 0));
    ok(
        p,
        &[
            "generate", "--count", "580", "--seed", "8", "--out", "c.csv",
        ],
    );
    assert_ne!(read(p, "a.csv"), read(p, "c.csv"));
}

#[test]
fn generate_rejects_tiny_counts() {
    let d = tempfile::tempdir().unwrap();
    let err = fails(d.path(), &["generate", "--count", "5", "--out", "a.csv"]);
    assert!(err.contains("at least 10"), "{err}");
    assert!(!d.path().join("a.csv").exists());
}

#[test]
fn seed_precedence_is_flag_then_config_then_environment() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    std::fs::write(
        p.join("gen.cfg"),
        "count = 40\nseed = 5\nnoise_level = 0.02\n",
    )
    .unwrap();
    ok(
        p,
        &[
            "generate", "--count", "40", "--noise", "0.02", "--seed", "5", "--out", "ref5.csv",
        ],
    );
    ok(
        p,
        &[
            "generate", "--count", "40", "--noise", "0.02", "--seed", "9", "--out", "ref9.csv",
        ],
    );

    let env = |seed: &str, args: &[&str]| {
        let out = bin()
            .current_dir(p)
            .env("SWARMNET_SEED", seed)
            .args(args)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    env(
        "9",
        &[
            "generate", "--count", "40", "--noise", "0.02", "--out", "env.csv",
        ],
    );
    assert_eq!(read(p, "env.csv"), read(p, "ref9.csv"));
    env(
        "9",
        &["generate", "--config", "gen.cfg", "--out", "cfg.csv"],
    );
    assert_eq!(read(p, "cfg.csv"), read(p, "ref5.csv"));
    env(
        "1",
        &[
            "generate", "--config", "gen.cfg", "--seed", "9", "--out", "flag.csv",
        ],
    );
    assert_eq!(read(p, "flag.csv"), read(p, "ref9.csv"));

    std::fs::write(p.join("bad.cfg"), "colour = blue\n").unwrap();
    let err = fails(p, &["generate", "--config", "bad.cfg", "--out", "x.csv"]);
    assert!(err.contains("unknown key `colour`"), "{err}");
}

#[test]
fn train_options_pass_through_with_config_fallback() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "trainer = bp\nlr = 0.1\nmomentum = 0.5\nhidden = 7\nseed = 4\n",
    )
    .unwrap();
    let parse = |extra: &[&str]| {
        let mut args = vec![
            "swarmnet",
            "train",
            "--data",
            "d.csv",
            "--model",
            "m.txt",
            "--config",
            cfg.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        match Cli::parse_from(args).command {
            swarmnet::cli::Command::Train(t) => train_config(&t).unwrap(),
            _ => unreachable!(),
        }
    };
    let from_file = parse(&[]);
    assert_eq!(from_file.hidden, vec![7]);
    assert_eq!(from_file.seed, 4);
    let Trainer::Bp(bp) = &from_file.trainer else {
        panic!("expected bp")
    };
    assert_eq!((bp.learning_rate, bp.momentum), (0.1, 0.5));

    let flags = parse(&[
        "--lr",
        "0.3",
        "--momentum",
        "0.9",
        "--hidden",
        "12,8",
        "--seed",
        "2",
    ]);
    let Trainer::Bp(bp) = &flags.trainer else {
        panic!("expected bp")
    };
    assert_eq!((bp.learning_rate, bp.momentum), (0.3, 0.9));
    assert_eq!((flags.hidden.clone(), flags.seed), (vec![12, 8], 2));

    let pso = parse(&["--trainer", "pso"]);
    let Trainer::Pso(p) = &pso.trainer else {
        panic!("expected pso")
    };
    assert_eq!(
        (p.inertia, p.c1, p.c2, p.particle_count, p.max_epochs),
        (0.729, 1.4944, 1.4944, 24, 500)
    );
    assert!(pso.refine.is_none());
}

fn reduced_dataset(dir: &Path) -> PathBuf {
    ok(
        dir,
        &[
            "generate",
            "--count",
            "120",
            "--seed",
            "3",
            "--noise",
            "0.05",
            "--missing-rate",
            "0.01",
            "--out",
            "raw.csv",
        ],
    );
    ok(
        dir,
        &[
            "select", "--data", "raw.csv", "--preset", "table3", "--out", "red.csv", "--report",
            "sel.json",
        ],
    );
    dir.join("red.csv")
}

#[test]
fn preset_selection_keeps_fourteen_columns_in_order() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    reduced_dataset(p);
    let header = String::from_utf8(read(p, "red.csv"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(
        header,
        "PRF1,PRF2,PRF3,PRF4,PRF6,PRF8,PRF10,PRF11,CAD1,CAD2,CAD3,FB4,FB5,FB10,class"
    );
    let sel: SelectionFile = serde_json::from_slice(&read(p, "sel.json")).unwrap();
    assert_eq!(sel.method, "preset:table3");
    assert_eq!(
        sel.indices,
        vec![0, 1, 2, 3, 5, 7, 9, 10, 11, 12, 13, 17, 18, 23]
    );

    ok(
        p,
        &[
            "select",
            "--data",
            "red.csv",
            "--preset",
            "table3",
            "--out",
            "again.csv",
        ],
    );
    assert_eq!(read(p, "again.csv"), read(p, "red.csv"));
    let ds = load_csv(&p.join("raw.csv")).unwrap();
    let without = ds
        .select_columns(&(0..26).filter(|&i| i != 5).collect::<Vec<_>>())
        .unwrap();
    save_csv(&without, &p.join("no6.csv")).unwrap();
    let err = fails(
        p,
        &[
            "select", "--data", "no6.csv", "--preset", "table3", "--out", "x.csv",
        ],
    );
    assert!(err.contains("PRF6"), "{err}");
    let err = fails(
        p,
        &[
            "select", "--data", "raw.csv", "--preset", "table9", "--out", "x.csv",
        ],
    );
    assert!(err.contains("unknown preset `table9`"), "{err}");
}

#[test]
fn cfs_on_a_toy_set_matches_the_exhaustive_optimum() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let names: Vec<String> = (0..8).map(|i| format!("t{i}")).collect();
    let samples = (0..60)
        .map(|i| {
            let g = Grade::ALL[i % 5];
            let k = g.code() as f64;
            let wobble = ((i * 37) % 11) as f64 / 11.0;
            Sample {
                features: vec![
                    k + wobble,
                    wobble,
                    k * 0.5,
                    (i % 7) as f64,
                    k + (i % 3) as f64,
                    wobble * k,
                    1.0 - wobble,
                    (i % 4) as f64,
                ],
                label: g,
            }
        })
        .collect();
    let ds = Dataset::new(FeatureSchema::new(names).unwrap(), samples).unwrap();
    save_csv(&ds, &p.join("toy.csv")).unwrap();
    ok(
        p,
        &[
            "select",
            "--data",
            "toy.csv",
            "--cfs",
            "--out",
            "toy_red.csv",
            "--report",
            "toy_sel.json",
        ],
    );
    let sel: SelectionFile = serde_json::from_slice(&read(p, "toy_sel.json")).unwrap();
    let best = exhaustive_search(&CorrelationTable::from_dataset(&ds).unwrap()).unwrap();
    assert_eq!(sel.merit, Some(best.merit));
    assert_eq!(
        load_csv(&p.join("toy_red.csv")).unwrap().feature_count(),
        sel.indices.len()
    );
}

#[test]
fn hidden_sizes_set_the_model_dimension() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    reduced_dataset(p);
    let quick = ["--max-epochs", "2", "--particles", "4"];
    for (hidden, lines) in [("12,8", 293 + 2), ("8", 129 + 2)] {
        let model = format!("m{lines}.txt");
        let mut args = vec![
            "train",
            "--data",
            "red.csv",
            "--hidden",
            hidden,
            "--model",
            model.as_str(),
        ];
        args.extend_from_slice(&quick);
        ok(p, &args);
        let text = String::from_utf8(read(p, &model)).unwrap();
        assert_eq!(text.lines().count(), lines);
        let trace = String::from_utf8(read(p, &format!("{model}.trace.csv"))).unwrap();
        assert_eq!(trace.lines().count(), 1 + 3);
    }
}

#[test]
fn train_then_evaluate_both_modes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    reduced_dataset(p);
    ok(
        p,
        &[
            "train",
            "--data",
            "red.csv",
            "--trainer",
            "bp",
            "--lr",
            "0.3",
            "--momentum",
            "0.9",
            "--max-epochs",
            "30",
            "--hidden",
            "6",
            "--model",
            "bp.txt",
            "--trace",
            "bp.csv",
            "--stats",
            "stats.json",
            "--test-out",
            "test.csv",
        ],
    );
    let trace = String::from_utf8(read(p, "bp.csv")).unwrap();
    assert!(trace.starts_with("epoch,mse\n1,"));
    assert!(trace.lines().count() <= 31);

    ok(
        p,
        &[
            "evaluate",
            "--model",
            "bp.txt",
            "--data",
            "test.csv",
            "--mode",
            "both",
            "--out",
            "both.json",
            "--text",
            "both.txt",
        ],
    );
    let doc: ReportDocument = serde_json::from_slice(&read(p, "both.json")).unwrap();
    let set = &doc.sets[0];
    assert_eq!(set.reports.len(), 2);
    assert!(set.comparison.as_ref().unwrap().difference >= 0.0);
    assert!(doc.caveat.is_some());
    let text = String::from_utf8(read(p, "both.txt")).unwrap();
    assert!(text.contains("CCI (%)") && text.contains("Confusion matrix"));

    // raw data scored through the saved statistics
    ok(
        p,
        &[
            "evaluate",
            "--model",
            "bp.txt",
            "--data",
            "red.csv",
            "--stats",
            "stats.json",
            "--mode",
            "strict",
            "--out",
            "raw.json",
        ],
    );
    let err = fails(
        p,
        &[
            "evaluate", "--model", "bp.txt", "--data", "raw.csv", "--out", "bad.json",
        ],
    );
    assert!(
        err.contains("expects 14 inputs") && err.contains("26"),
        "{err}"
    );

    ok(
        p,
        &[
            "evaluate", "--model", "bp.txt", "--data", "test.csv", "--mode", "strict", "--out",
            "s.json",
        ],
    );
    ok(
        p,
        &[
            "evaluate", "--model", "bp.txt", "--data", "test.csv", "--mode", "tolerant", "--out",
            "t.json",
        ],
    );
    let out = ok(
        p,
        &[
            "compare",
            "--strict",
            "s.json",
            "--tolerant",
            "t.json",
            "--out",
            "cmp.json",
        ],
    );
    assert!(out.contains("difference"));
    let cmp: serde_json::Value = serde_json::from_slice(&read(p, "cmp.json")).unwrap();
    assert_eq!(
        cmp["difference"],
        set.comparison.as_ref().unwrap().difference
    );
    let err = fails(
        p,
        &[
            "compare",
            "--strict",
            "t.json",
            "--tolerant",
            "t.json",
            "--out",
            "cmp2.json",
        ],
    );
    assert!(err.contains("no strict report"), "{err}");
    let err = fails(
        p,
        &[
            "compare",
            "--strict",
            "s.json",
            "--tolerant",
            "raw.json",
            "--out",
            "cmp3.json",
        ],
    );
    assert!(err.contains("no tolerant report"), "{err}");
}

#[test]
fn compare_rejects_reports_over_different_samples() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    reduced_dataset(p);
    ok(
        p,
        &[
            "train",
            "--data",
            "red.csv",
            "--hidden",
            "3",
            "--max-epochs",
            "2",
            "--particles",
            "4",
            "--model",
            "m.txt",
            "--test-out",
            "test.csv",
            "--train-out",
            "train.csv",
        ],
    );
    ok(
        p,
        &[
            "evaluate", "--model", "m.txt", "--data", "test.csv", "--mode", "strict", "--out",
            "s.json",
        ],
    );
    ok(
        p,
        &[
            "evaluate",
            "--model",
            "m.txt",
            "--data",
            "train.csv",
            "--mode",
            "tolerant",
            "--out",
            "t.json",
        ],
    );
    let err = fails(
        p,
        &[
            "compare",
            "--strict",
            "s.json",
            "--tolerant",
            "t.json",
            "--out",
            "c.json",
        ],
    );
    assert!(err.contains("compared reports"), "{err}");
}

#[test]
fn perfect_model_scores_full_marks_in_both_modes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    // every sample is class C; the output neuron ignores its inputs and emits 0.3
    let logit = (0.3f64 / 0.7).ln();
    let model = format!("swarmnet-model v1\n2,1,1\n0\n0\n0\n0\n{logit:.16e}\n");
    std::fs::write(p.join("perfect.txt"), model).unwrap();
    std::fs::write(
        p.join("c.csv"),
        "a,b,class\n0.1,0.2,C\n0.9,0.4,C\n0.5,0.5,C\n",
    )
    .unwrap();
    ok(
        p,
        &[
            "evaluate",
            "--model",
            "perfect.txt",
            "--data",
            "c.csv",
            "--out",
            "r.json",
        ],
    );
    let doc: ReportDocument = serde_json::from_slice(&read(p, "r.json")).unwrap();
    for r in &doc.sets[0].reports {
        assert_eq!((r.cci, r.mae, r.rmse), (100.0, 0.0, 0.0), "{}", r.mode);
    }
    assert_eq!(doc.sets[0].comparison.as_ref().unwrap().difference, 0.0);
}

#[test]
fn usage_errors_exit_nonzero() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    fails(p, &["train", "--data", "missing.csv", "--model", "m.txt"]);
    fails(
        p,
        &[
            "train",
            "--data",
            "x.csv",
            "--model",
            "m.txt",
            "--trainer",
            "sgd",
        ],
    );
    fails(p, &["select", "--data", "x.csv", "--out", "y.csv"]);
    fails(p, &["frobnicate"]);
}
