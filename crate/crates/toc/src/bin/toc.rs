//! Command-line surface: dataset generation, training, evaluation, attacks,
//! SNR-grid sweeps, and report rendering.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 invalid
//! config. Failures print one machine-readable JSON line to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use toc::attack::{
    eval_backdoor, eval_evasion, poison_dataset, BackdoorConfig, EvasionConfig, Perturber,
    TauDenominator,
};
use toc::harness::{
    aggregate, parse_csv, render_csv, render_json, render_svg, run_sweep, GroupField,
    SweepConfig, SweepResult,
};
use toc::pipeline::{
    evaluate, load_pipeline, save_pipeline, train, PipelineKind, TrainConfig,
};
use toc::signal::{
    export_csv, load_dataset, make_dataset, noise_sigma, save_dataset, SensingConfig,
};
use toc::{Error, Result};

#[derive(Parser)]
#[command(name = "toc", version, about = "Task-oriented communications simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a modulated I/Q dataset with sensing-channel noise.
    GenData(GenDataArgs),
    /// Train one pipeline on a dataset.
    Train(TrainArgs),
    /// Evaluate a stored pipeline on a dataset's test split.
    Eval(EvalArgs),
    /// Run an attack against a pipeline.
    Attack {
        #[command(subcommand)]
        which: AttackCmd,
    },
    /// Run an SNR-grid sweep from a JSON config.
    Sweep(SweepArgs),
    /// Re-render stored sweep results as CSV, JSON, or SVG plots.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum AttackCmd {
    /// Poison the training data with a phase trigger, retrain, evaluate.
    Backdoor(BackdoorArgs),
    /// Gradient-sign (or Gaussian baseline) test-time perturbation.
    Fgsm(FgsmArgs),
}

#[derive(Args)]
struct GenDataArgs {
    /// JSON file with defaults for these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    snr_s: Option<f64>,
    #[arg(long)]
    phase_impairment: bool,
    /// Master seed (mandatory: generation is stochastic).
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export an inspection CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GenDataConfig {
    n: Option<usize>,
    snr_s: Option<f64>,
    phase_impairment: Option<bool>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// one of: no_channel, approach1, approach2, toc
    #[arg(long)]
    pipeline: Option<String>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    snr_c: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TrainFileConfig {
    pipeline: Option<String>,
    data: Option<PathBuf>,
    snr_c: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    lr: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct BackdoorArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    /// Trigger phase shift in radians.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    victim: Option<u8>,
    #[arg(long)]
    target: Option<u8>,
    /// victim_class or all_train
    #[arg(long)]
    denominator: Option<String>,
    #[arg(long)]
    pipeline: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    snr_c: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: u64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BackdoorFileConfig {
    data: Option<PathBuf>,
    tau: Option<f64>,
    theta: Option<f64>,
    victim: Option<u8>,
    target: Option<u8>,
    denominator: Option<String>,
    pipeline: Option<String>,
    snr_c: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    lr: Option<f64>,
}

#[derive(Args)]
struct FgsmArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pnr: Option<f64>,
    /// targeted or non_targeted
    #[arg(long)]
    mode: Option<String>,
    /// fgsm or gaussian
    #[arg(long)]
    perturber: Option<String>,
    #[arg(long)]
    target: Option<u8>,
    #[arg(long)]
    seed: u64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FgsmFileConfig {
    model: Option<PathBuf>,
    data: Option<PathBuf>,
    pnr: Option<f64>,
    mode: Option<String>,
    perturber: Option<String>,
    target: Option<u8>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config JSON (schema version 1).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated seed overrides.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// A sweep output directory, results.json, or results.csv.
    #[arg(long)]
    results: PathBuf,
    /// csv, json, or svg
    #[arg(long)]
    kind: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated grouping fields for an aggregated summary.csv
    /// (pipeline, snr_s, snr_c, seed, attack, param, metric).
    #[arg(long)]
    group_by: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = match &err {
                Error::Config(_) | Error::Json(_) | Error::Version { .. } => (3u8, "config"),
                _ => (1u8, "runtime"),
            };
            eprintln!("{}", serde_json::json!({ "error": err.to_string(), "kind": kind }));
            ExitCode::from(code)
        }
    }
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required option --{flag}")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::GenData(args) => {
            let file: GenDataConfig = load_config(&args.config)?;
            let cfg = SensingConfig {
                n_samples: args.n.or(file.n).unwrap_or(5000),
                snr_s_db: require(args.snr_s.or(file.snr_s), "snr-s")?,
                phase_impairment: args.phase_impairment
                    || file.phase_impairment.unwrap_or(false),
                seed: args.seed,
            };
            let out = require(args.out.or(file.out), "out")?;
            let ds = make_dataset(&cfg)?;
            save_dataset(&ds, &out)?;
            if let Some(csv) = args.csv.or(file.csv) {
                export_csv(&ds, &csv)?;
            }
            println!(
                "{}",
                serde_json::json!({
                    "out": out,
                    "n_train": ds.meta.n_train,
                    "n_test": ds.meta.n_test,
                    "snr_s_db": ds.meta.snr_s_db,
                    "seed": ds.meta.seed,
                })
            );
            Ok(())
        }
        Cmd::Train(args) => {
            let file: TrainFileConfig = load_config(&args.config)?;
            let kind = parse_pipeline(&require(args.pipeline.or(file.pipeline), "pipeline")?)?;
            let data = require(args.data.or(file.data), "data")?;
            let out = require(args.out.or(file.out), "out")?;
            let defaults = TrainConfig::default();
            let cfg = TrainConfig {
                epochs: args.epochs.or(file.epochs).unwrap_or(defaults.epochs),
                batch_size: args.batch_size.or(file.batch_size).unwrap_or(defaults.batch_size),
                lr: args.lr.or(file.lr).unwrap_or(defaults.lr),
                seed: args.seed,
                snr_c_db: args.snr_c.or(file.snr_c).unwrap_or(defaults.snr_c_db),
            };
            let ds = load_dataset(&data)?;
            let tp = train(kind, &ds, &cfg)?;
            save_pipeline(&tp, &cfg, &out)?;
            println!(
                "{}",
                serde_json::json!({
                    "out": out,
                    "pipeline": kind.as_str(),
                    "param_count": tp.param_count(),
                    "final_loss": tp.history.last(),
                })
            );
            Ok(())
        }
        Cmd::Eval(args) => {
            let tp = load_pipeline(&args.model)?;
            let ds = load_dataset(&args.data)?;
            let report = evaluate(&tp, &ds.test, args.seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Cmd::Attack { which } => match which {
            AttackCmd::Backdoor(args) => run_backdoor(args),
            AttackCmd::Fgsm(args) => run_fgsm(args),
        },
        Cmd::Sweep(args) => run_sweep_cmd(args),
        Cmd::Report(args) => run_report(args),
    }
}

fn run_backdoor(args: BackdoorArgs) -> Result<()> {
    let file: BackdoorFileConfig = load_config(&args.config)?;
    let data = require(args.data.or(file.data), "data")?;
    let kind = parse_pipeline(
        &args.pipeline.or(file.pipeline).unwrap_or_else(|| "toc".into()),
    )?;
    let denominator = match args
        .denominator
        .or(file.denominator)
        .unwrap_or_else(|| "victim_class".into())
        .as_str()
    {
        "victim_class" => TauDenominator::VictimClass,
        "all_train" => TauDenominator::AllTrain,
        other => return Err(Error::Config(format!("unknown denominator {other:?}"))),
    };
    let bd = BackdoorConfig {
        victim: args.victim.or(file.victim).unwrap_or(0),
        target: args.target.or(file.target).unwrap_or(1),
        theta: require(args.theta.or(file.theta), "theta")?,
        tau: require(args.tau.or(file.tau), "tau")?,
        seed: args.seed,
        denominator,
    };
    let defaults = TrainConfig::default();
    let cfg = TrainConfig {
        epochs: args.epochs.or(file.epochs).unwrap_or(defaults.epochs),
        batch_size: args.batch_size.or(file.batch_size).unwrap_or(defaults.batch_size),
        lr: args.lr.or(file.lr).unwrap_or(defaults.lr),
        seed: args.seed,
        snr_c_db: args.snr_c.or(file.snr_c).unwrap_or(defaults.snr_c_db),
    };
    let ds = load_dataset(&data)?;
    let (poisoned, mask) = poison_dataset(&ds, &bd)?;
    let tp = train(kind, &poisoned, &cfg)?;
    let report = eval_backdoor(&tp, &ds.test, &bd, args.seed)?;
    println!(
        "{}",
        serde_json::json!({
            "attack": "backdoor",
            "params": { "tau": bd.tau, "theta": bd.theta, "victim": bd.victim, "target": bd.target, "n_poisoned": mask.len() },
            "snr_s": ds.meta.snr_s_db,
            "snr_c": cfg.snr_c_db,
            "seed": args.seed,
            "metrics": report,
        })
    );
    Ok(())
}

fn run_fgsm(args: FgsmArgs) -> Result<()> {
    let file: FgsmFileConfig = load_config(&args.config)?;
    let model = require(args.model.or(file.model), "model")?;
    let data = require(args.data.or(file.data), "data")?;
    let pnr_db = require(args.pnr.or(file.pnr), "pnr")?;
    let target = args.target.or(file.target).unwrap_or(1);
    let mode = match args.mode.or(file.mode).unwrap_or_else(|| "non_targeted".into()).as_str()
    {
        "targeted" => toc::attack::EvasionMode::Targeted { target },
        "non_targeted" | "non-targeted" => toc::attack::EvasionMode::NonTargeted,
        other => return Err(Error::Config(format!("unknown mode {other:?}"))),
    };
    let perturber = match args
        .perturber
        .or(file.perturber)
        .unwrap_or_else(|| "fgsm".into())
        .as_str()
    {
        "fgsm" => Perturber::Fgsm,
        "gaussian" => Perturber::GaussianNoise,
        other => return Err(Error::Config(format!("unknown perturber {other:?}"))),
    };
    let tp = load_pipeline(&model)?;
    let ds = load_dataset(&data)?;
    let cfg = EvasionConfig { mode, pnr_db, perturber, seed: args.seed };
    let sigma = noise_sigma(ds.meta.snr_s_db);
    let accuracy = eval_evasion(&tp, &ds.test, &cfg, sigma)?;
    println!(
        "{}",
        serde_json::json!({
            "attack": match perturber { Perturber::Fgsm => "fgsm", Perturber::GaussianNoise => "gaussian" },
            "params": { "pnr_db": pnr_db, "mode": match mode { toc::attack::EvasionMode::Targeted{..} => "targeted", _ => "non_targeted" } },
            "snr_s": ds.meta.snr_s_db,
            "snr_c": tp.snr_c_db,
            "seed": args.seed,
            "metrics": { "accuracy": accuracy },
        })
    );
    Ok(())
}

fn run_sweep_cmd(args: SweepArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(dir) = args.output_dir {
        cfg.output_dir = dir;
    }
    if let Ok(dir) = std::env::var("TCOMM_OUT") {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(seeds) = args.seeds {
        cfg.seeds = seeds
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("bad seed {s:?}")))
            })
            .collect::<Result<Vec<u64>>>()?;
    }
    if let Some(workers) = args.workers {
        cfg.workers = Some(workers);
    }
    if let Some(epochs) = args.epochs {
        cfg.train.epochs = epochs;
    }
    let res = run_sweep(&cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    render_csv(&res, &cfg.output_dir.join("results.csv"))?;
    render_json(&res, &cfg.output_dir.join("results.json"))?;
    let plots = render_svg(&res, &cfg.output_dir)?;
    println!(
        "{}",
        serde_json::json!({
            "output_dir": cfg.output_dir,
            "records": res.records.len(),
            "plots": plots.len(),
        })
    );
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<()> {
    let res = load_results(&args.results)?;
    let out = args.out.clone().unwrap_or_else(|| {
        if args.results.is_dir() {
            args.results.clone()
        } else {
            args.results.parent().unwrap_or(Path::new(".")).to_path_buf()
        }
    });
    std::fs::create_dir_all(&out)?;
    let written: Vec<PathBuf> = match args.kind.as_str() {
        "csv" => {
            let path = out.join("results.csv");
            render_csv(&res, &path)?;
            vec![path]
        }
        "json" => {
            let path = out.join("results.json");
            render_json(&res, &path)?;
            vec![path]
        }
        "svg" => render_svg(&res, &out)?,
        other => return Err(Error::Config(format!("unknown report kind {other:?}"))),
    };
    if let Some(group_by) = args.group_by {
        let fields = group_by
            .split(',')
            .map(|f| {
                GroupField::from_str(f.trim())
                    .ok_or_else(|| Error::Config(format!("unknown group field {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = aggregate(&res, &fields)?;
        let mut text = String::from("group,mean,std,n\n");
        for row in rows {
            text.push_str(&format!(
                "{},{:.6},{:.6},{}\n",
                row.key.join("|"),
                row.mean,
                row.std,
                row.n
            ));
        }
        let path = out.join("summary.csv");
        std::fs::write(&path, text)?;
    }
    println!("{}", serde_json::json!({ "written": written }));
    Ok(())
}

fn load_results(path: &Path) -> Result<SweepResult> {
    let file = if path.is_dir() {
        let json = path.join("results.json");
        if json.exists() {
            json
        } else {
            path.join("results.csv")
        }
    } else {
        path.to_path_buf()
    };
    match file.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(serde_json::from_str(&std::fs::read_to_string(&file)?)?),
        Some("csv") => parse_csv(&file),
        _ => Err(Error::Config(format!("cannot read results from {}", file.display()))),
    }
}

fn parse_pipeline(name: &str) -> Result<PipelineKind> {
    PipelineKind::from_str(name)
        .ok_or_else(|| Error::Config(format!("unknown pipeline {name:?}")))
}
