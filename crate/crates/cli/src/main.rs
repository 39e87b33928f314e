use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use proxkit::harness::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
use proxkit::problems::{read_instance, SubgradientOracle};
use proxkit::sampler::{run_chains, stepsize_holder, stepsize_hybrid};
use proxkit::{apbm_run, solve_prox, ApbmParams, ProxParams, Rng};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Proximal bundle solver, adaptive optimizer, and proximal sampler.
#[derive(Parser)]
#[command(name = "proxkit", version)]
struct Cli {
    /// JSON object whose keys (flag names) override the command-line values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one prox subproblem to a certified tolerance.
    Prox(ProxArgs),
    /// Minimize with the adaptive proximal bundle method.
    Optimize(OptimizeArgs),
    /// Run alternating-sampling chains with the exact rejection oracle.
    Sample(SampleArgs),
    /// Reproduce an experiment and write its curves as CSV.
    Bench(BenchArgs),
    /// Run the quadrature, special-function, and brute-force validation suite.
    Validate(ValidateArgs),
}

#[derive(Args, Serialize, Deserialize)]
struct ProxArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    /// Prox center as comma-separated values; standard normal from the seed if absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<f64>>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, env = "PROXKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Per-iteration trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct OptimizeArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    eta0: f64,
    #[arg(long, default_value_t = 0.5)]
    beta0: f64,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    max_outer: usize,
    /// Per-cycle trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct SampleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// `auto` picks the Hölder or hybrid stepsize from the instance.
    #[arg(long, default_value = "auto")]
    eta: String,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    burn_in: u64,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    #[arg(long, env = "PROXKIT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct BenchArgs {
    /// prox_qp, prox_lp, apbm, sample_holder, or sample_hybrid.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Experiment parameter as key=value; values are parsed as JSON when possible.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, env = "PROXKIT_SEED")]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize)]
struct ValidateArgs {
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    points: u64,
    #[arg(long, env = "PROXKIT_SEED", default_value_t = 7)]
    seed: u64,
}

/// Overlays the config file on the parsed flags. Keys may use dashes or underscores.
fn merge<T: Serialize + DeserializeOwned>(args: T, config: Option<&Map<String, Value>>) -> Result<T> {
    let Some(config) = config else { return Ok(args) };
    let mut v = serde_json::to_value(args)?;
    let obj = v.as_object_mut().expect("argument structs serialize to objects");
    for (k, val) in config {
        let key = k.replace('-', "_");
        if !obj.contains_key(&key) {
            bail!("config key {k:?} is not an option of this command");
        }
        obj.insert(key, val.clone());
    }
    serde_json::from_value(v).context("config value has the wrong type")
}

fn load_config(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match serde_json::from_str(&text)? {
        Value::Object(m) => Ok(m),
        _ => bail!("{} must contain a JSON object", path.display()),
    }
}

fn oracle_from(path: &Path) -> Result<SubgradientOracle<f64>> {
    let file = read_instance::<f64>(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(file.instance.oracle()?)
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn prox(args: ProxArgs) -> Result<ExitCode> {
    let oracle = oracle_from(&args.instance)?;
    let d = oracle.dim();
    let y = match args.y {
        Some(y) => y,
        None => Rng::new(args.seed).split(1).normal_vec(d),
    };
    if y.len() != d {
        bail!("--y has {} entries, the instance has dimension {d}", y.len());
    }
    let mut params = ProxParams::new(args.eta, args.delta);
    params.max_iters = args.max_iters;
    let r = solve_prox(&oracle, &y, &params, None)?;
    if let Some(path) = &args.trace {
        r.write_trace_csv(BufWriter::new(File::create(path)?))?;
    }
    println!("iterations={}", r.iters);
    println!("converged={}", r.converged);
    println!("final_delta={}", r.final_delta());
    println!("f_eta_best={}", r.f_eta_best);
    println!("x_best={}", join(&r.x_best));
    Ok(if r.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn optimize(args: OptimizeArgs) -> Result<ExitCode> {
    let oracle = oracle_from(&args.instance)?;
    let params = ApbmParams::new(args.eta0, args.beta0, args.epsilon, args.max_outer);
    let y0 = vec![0.0; oracle.dim()];
    let (trace, failure) = match apbm_run(&oracle, &y0, &params) {
        Ok(t) => (t, None),
        Err(e) => (e.trace, Some(e.source)),
    };
    if let Some(path) = &args.trace {
        trace.write_csv(BufWriter::new(File::create(path)?))?;
    }
    println!("cycles={}", trace.outer.len());
    println!("best_value={}", trace.best_value);
    println!("eta_final={}", trace.eta_final);
    println!("oracle_calls={}", trace.oracle_calls);
    println!("best_point={}", join(&trace.best_point));
    match failure {
        None => Ok(ExitCode::SUCCESS),
        Some(e) => {
            eprintln!("inner solver failed: {e}");
            Ok(ExitCode::from(2))
        }
    }
}

fn sample(args: SampleArgs) -> Result<ExitCode> {
    let oracle = oracle_from(&args.instance)?;
    let d = oracle.dim();
    let eta = if args.eta == "auto" {
        let spec = oracle.holder_spec().context("instance has no Hölder metadata")?;
        if spec.is_single() {
            stepsize_holder(&spec, d)?
        } else {
            stepsize_hybrid(&spec, d)
        }
    } else {
        args.eta
            .parse()
            .with_context(|| format!("--eta must be `auto` or a number, got {:?}", args.eta))?
    };
    let run = run_chains(&oracle, &vec![0.0; d], eta, args.delta, args.burn_in, args.steps, args.chains, args.seed)?;
    run.write_csv(BufWriter::new(File::create(&args.out)?))?;
    let n: usize = run.records.iter().map(Vec::len).sum();
    let trials: u64 = run.records.iter().flatten().map(|r| r.trials).sum();
    println!("eta={eta}");
    println!("samples={n}");
    println!("mean_trials={}", trials as f64 / n.max(1) as f64);
    Ok(ExitCode::SUCCESS)
}

fn print_report(rep: &ExperimentReport) {
    for c in &rep.curves {
        println!(
            "{}\t{}\titerations={}\tconverged={}\tfinal={}\t{}",
            c.name, c.file, c.iterations, c.converged, c.final_value, c.note
        );
    }
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let kind: ExperimentKind = args.kind.parse()?;
    if kind == ExperimentKind::Validate {
        bail!("use the validate subcommand");
    }
    let mut cfg = ExperimentConfig::new(kind, args.output_dir);
    cfg.instance_path = args.instance;
    for p in &args.params {
        let (k, v) = p.split_once('=').with_context(|| format!("--param expects KEY=VALUE, got {p:?}"))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        cfg = cfg.with_param(k, v);
    }
    if let Some(seed) = args.seed {
        cfg = cfg.with_param("seed", seed);
    }
    let rep = run_experiment(&cfg)?;
    print_report(&rep);
    Ok(ExitCode::SUCCESS)
}

fn validate(args: ValidateArgs) -> Result<ExitCode> {
    let cfg = ExperimentConfig::new(ExperimentKind::Validate, args.output_dir)
        .with_param("points", args.points)
        .with_param("seed", args.seed);
    let rep = run_experiment(&cfg)?;
    print_report(&rep);
    Ok(if rep.all_converged() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let config = cli.config.as_deref().map(load_config).transpose()?;
    let config = config.as_ref();
    match cli.command {
        Command::Prox(a) => prox(merge(a, config)?),
        Command::Optimize(a) => optimize(merge(a, config)?),
        Command::Sample(a) => sample(merge(a, config)?),
        Command::Bench(a) => bench(merge(a, config)?),
        Command::Validate(a) => validate(merge(a, config)?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
