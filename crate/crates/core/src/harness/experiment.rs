//! Experiment drivers. Each run writes one CSV per curve, a `summary.csv`, and a
//! gnuplot script into the output directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::apbm::{apbm_run, ApbmParams};
use crate::error::{Error, Result};
use crate::harness::csv::Table;
use crate::harness::quadrature::{gaussian_integral, gaussian_integral_check, wendel_bounds};
use crate::harness::stats::moment_diagnostics;
use crate::harness::validation::brute_force_prox;
use crate::linalg::Matrix;
use crate::problems::{
    make_lp_oracle, make_qp_oracle, qp_minimizer, qp_prox_closed_form, read_instance, Instance,
    LpRegressionInstance, QpInstance, SubgradientOracle,
};
use crate::prox::{prox_objective, solve_prox, ProxParams};
use crate::sampler::{run_chains, stepsize_holder, stepsize_hybrid, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ProxQp,
    ProxLp,
    Apbm,
    SampleHolder,
    SampleHybrid,
    Validate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ProxQp => "prox_qp",
            Self::ProxLp => "prox_lp",
            Self::Apbm => "apbm",
            Self::SampleHolder => "sample_holder",
            Self::SampleHybrid => "sample_hybrid",
            Self::Validate => "validate",
        }
    }

    pub fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            Self::ProxQp => &["etas", "delta", "dim", "full_scale", "seed", "max_iters"],
            Self::ProxLp => &["exponents", "eta", "delta", "rows", "dim", "normalize", "seed", "max_iters"],
            Self::Apbm => &["eta0", "beta0", "epsilon", "max_outer", "dim", "seed", "target_gap"],
            Self::SampleHolder => &["eta", "delta", "chains", "steps", "burn_in", "dim", "rows", "p", "seed"],
            Self::SampleHybrid => &["eta", "delta", "chains", "steps", "burn_in", "dim", "rows", "exponents", "seed"],
            Self::Validate => &["points", "seed"],
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::InvalidParameter(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub instance_path: Option<PathBuf>,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            kind,
            instance_path: None,
            parameters: BTreeMap::new(),
            output_dir: output_dir.into(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn with_instance(mut self, path: impl Into<PathBuf>) -> Self {
        self.instance_path = Some(path.into());
        self
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.kind.allowed_keys();
        if let Some(k) = self.parameters.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "parameter {k:?} is not accepted by {}; allowed: {}",
                self.kind.name(),
                allowed.join(", ")
            )));
        }
        if let Some(p) = &self.instance_path {
            if !p.is_file() {
                return Err(Error::InvalidParameter(format!("instance file {} does not exist", p.display())));
            }
        }
        // Type-check every value up front so a run never fails halfway on a typo.
        for (k, v) in &self.parameters {
            let ok = match k.as_str() {
                "etas" | "exponents" => v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(Value::is_number)),
                "full_scale" | "normalize" => v.is_boolean(),
                "seed" | "dim" | "rows" | "max_iters" | "max_outer" | "chains" | "steps" | "burn_in" | "points" => {
                    v.as_u64().is_some()
                }
                "eta" => v.is_number() || v.as_str() == Some("auto"),
                _ => v.as_f64().is_some_and(|x| x > 0.0),
            };
            if !ok {
                return Err(Error::InvalidParameter(format!("parameter {k:?} has an invalid value {v}")));
            }
        }
        Ok(())
    }

    fn num(&self, key: &str, default: f64) -> f64 {
        self.parameters.get(key).and_then(Value::as_f64).unwrap_or(default)
    }

    fn int(&self, key: &str, default: u64) -> u64 {
        self.parameters.get(key).and_then(Value::as_u64).unwrap_or(default)
    }

    fn flag(&self, key: &str, default: bool) -> bool {
        self.parameters.get(key).and_then(Value::as_bool).unwrap_or(default)
    }

    fn list(&self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.parameters.get(key).and_then(Value::as_array) {
            Some(a) => a.iter().filter_map(Value::as_f64).collect(),
            None => default.to_vec(),
        }
    }

    fn opt_int(&self, key: &str) -> Option<usize> {
        self.parameters.get(key).and_then(Value::as_u64).map(|v| v as usize)
    }

    fn instance(&self) -> Result<Option<Instance<f64>>> {
        self.instance_path
            .as_ref()
            .map(|p| read_instance::<f64>(p).map(|f| f.instance))
            .transpose()
    }
}

/// Outcome of one curve (or one table, for the non-iterative kinds).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSummary {
    pub name: String,
    pub file: String,
    pub iterations: usize,
    pub converged: bool,
    pub final_value: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub curves: Vec<CurveSummary>,
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn all_converged(&self) -> bool {
        self.curves.iter().all(|c| c.converged)
    }
}

/// Instance and prox center of the QP experiment: `Q = AAᵀ/‖AAᵀ‖_∞`, `c` and `y`
/// standard normal, all drawn from `seed`.
pub fn qp_experiment_instance(d: usize, seed: u64) -> (QpInstance<f64>, Vec<f64>) {
    let master = Rng::new(seed);
    let inst = QpInstance::random(d, &mut master.split(0));
    let y = master.split(1).normal_vec(d);
    (inst, y)
}

/// Data of the regression experiment with the given exponents (cycled over the rows).
pub fn lp_experiment_instance(
    n: usize,
    d: usize,
    exponents: &[f64],
    seed: u64,
) -> Result<(LpRegressionInstance<f64>, Vec<f64>)> {
    if exponents.is_empty() {
        return Err(Error::InvalidParameter("at least one exponent is required".into()));
    }
    let master = Rng::new(seed);
    let p: Vec<f64> = (0..n).map(|i| exponents[i % exponents.len()]).collect();
    let inst = LpRegressionInstance::random(n, d, p, &mut master.split(0))?;
    let y = master.split(1).normal_vec(d);
    Ok((inst, y))
}

fn fmt_param(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let curves = match cfg.kind {
        ExperimentKind::ProxQp => prox_qp(cfg)?,
        ExperimentKind::ProxLp => prox_lp(cfg)?,
        ExperimentKind::Apbm => apbm(cfg)?,
        ExperimentKind::SampleHolder | ExperimentKind::SampleHybrid => sample(cfg)?,
        ExperimentKind::Validate => validate(cfg)?,
    };
    let mut summary = Table::new(["name", "file", "iterations", "converged", "final_value", "note"]);
    for c in &curves {
        summary.push([
            c.name.clone(),
            c.file.clone(),
            c.iterations.to_string(),
            (c.converged as u8).to_string(),
            c.final_value.to_string(),
            c.note.clone(),
        ])?;
    }
    let dir = &cfg.output_dir;
    summary.write(dir.join("summary.csv"))?;
    let script = gnuplot_script(cfg.kind, &curves);
    std::fs::write(dir.join("plot.gp"), script)?;
    let mut files: Vec<PathBuf> = curves.iter().map(|c| dir.join(&c.file)).collect();
    files.push(dir.join("summary.csv"));
    files.push(dir.join("plot.gp"));
    Ok(ExperimentReport {
        kind: cfg.kind,
        curves,
        files,
    })
}

fn gnuplot_script(kind: ExperimentKind, curves: &[CurveSummary]) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    let (x, y, log) = match kind {
        ExperimentKind::ProxQp => ("1", "2", true),
        ExperimentKind::ProxLp => ("1", "2", true),
        ExperimentKind::Apbm => ("1", "4", false),
        ExperimentKind::SampleHolder | ExperimentKind::SampleHybrid => ("2", "3", false),
        ExperimentKind::Validate => ("0", "5", false),
    };
    if log {
        s.push_str("set logscale y\n");
    }
    let _ = writeln!(s, "set output '{}.png'\nset terminal pngcairo", kind.name());
    let plots: Vec<String> = curves
        .iter()
        .map(|c| format!("'{}' using {x}:{y} with lines title '{}'", c.file, c.name))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

fn write_in(dir: &Path, file: &str, table: &Table) -> Result<()> {
    table.write(dir.join(file))
}

/// `f_y^η(x̃_j) − f_y^η(x*)` against `j` for each η, with `x*` in closed form.
fn prox_qp(cfg: &ExperimentConfig) -> Result<Vec<CurveSummary>> {
    let seed = cfg.int("seed", 7);
    let d = if cfg.flag("full_scale", false) { 1000 } else { cfg.int("dim", 50) as usize };
    let (inst, y) = match cfg.instance()? {
        Some(Instance::Qp(q)) => {
            let y = Rng::new(seed).split(1).normal_vec(q.dim());
            (q, y)
        }
        Some(Instance::Lp(_)) => return Err(Error::InvalidParameter("prox_qp needs a qp instance".into())),
        None => qp_experiment_instance(d, seed),
    };
    let delta = cfg.num("delta", 1e-6);
    let max_iters = cfg.opt_int("max_iters");
    let etas = cfg.list("etas", &[0.1, 1.0, 10.0]);
    let oracle = make_qp_oracle(inst.clone())?;
    etas.par_iter()
        .map(|&eta| {
            let name = format!("eta={eta}");
            let file = format!("prox_qp_eta_{}.csv", fmt_param(eta));
            let x_star = qp_prox_closed_form(&inst, &y, eta)?;
            let f_star = prox_objective(inst.value(&x_star), &x_star, &y, eta);
            let mut params = ProxParams::new(eta, delta);
            params.max_iters = max_iters;
            let mut table = Table::new(["iter", "gap_to_optimum", "delta_j"]);
            let o = oracle.fork();
            match solve_prox(&o, &y, &params, None) {
                Ok(r) => {
                    for s in &r.trace {
                        table.push([s.iter as f64, s.f_eta_best - f_star, s.delta_j])?;
                    }
                    write_in(&cfg.output_dir, &file, &table)?;
                    Ok(CurveSummary {
                        name,
                        file,
                        iterations: r.iters,
                        converged: r.converged,
                        final_value: r.f_eta_best - f_star,
                        note: if r.converged { String::new() } else { format!("budget of {} exhausted", r.max_iters) },
                    })
                }
                Err(e) => {
                    write_in(&cfg.output_dir, &file, &table)?;
                    Ok(failed(name, file, &e))
                }
            }
        })
        .collect()
}

fn failed(name: String, file: String, e: &Error) -> CurveSummary {
    CurveSummary {
        name,
        file,
        iterations: 0,
        converged: false,
        final_value: f64::NAN,
        note: e.to_string(),
    }
}

/// `δ_j` against `j` for each exponent `p` at a common center.
fn prox_lp(cfg: &ExperimentConfig) -> Result<Vec<CurveSummary>> {
    let seed = cfg.int("seed", 7);
    let (base, y) = match cfg.instance()? {
        Some(Instance::Lp(l)) => {
            let y = Rng::new(seed).split(1).normal_vec(l.dim());
            (l, y)
        }
        Some(Instance::Qp(_)) => return Err(Error::InvalidParameter("prox_lp needs an lp instance".into())),
        None => {
            let n = cfg.int("rows", 100) as usize;
            let d = cfg.int("dim", 20) as usize;
            let (inst, y) = lp_experiment_instance(n, d, &[2.0], seed)?;
            (inst.with_normalize(cfg.flag("normalize", false)), y)
        }
    };
    let eta = cfg.num("eta", 1.0);
    let delta = cfg.num("delta", 1e-6);
    let max_iters = cfg.opt_int("max_iters");
    let ps = cfg.list("exponents", &[1.2, 1.5, 1.8, 2.0]);
    ps.par_iter()
        .map(|&p| {
            let name = format!("p={p}");
            let file = format!("prox_lp_p_{}.csv", fmt_param(p));
            let inst = LpRegressionInstance::uniform(base.a.clone(), base.b.clone(), p)?.with_normalize(base.normalize);
            let oracle = make_lp_oracle(inst)?;
            let mut params = ProxParams::new(eta, delta);
            params.max_iters = max_iters;
            let mut table = Table::new(["iter", "delta_j"]);
            match solve_prox(&oracle, &y, &params, None) {
                Ok(r) => {
                    for s in &r.trace {
                        table.push([s.iter as f64, s.delta_j])?;
                    }
                    write_in(&cfg.output_dir, &file, &table)?;
                    Ok(CurveSummary {
                        name,
                        file,
                        iterations: r.iters,
                        converged: r.converged,
                        final_value: r.final_delta(),
                        note: if r.converged { String::new() } else { format!("budget of {} exhausted", r.max_iters) },
                    })
                }
                Err(e) => {
                    write_in(&cfg.output_dir, &file, &table)?;
                    Ok(failed(name, file, &e))
                }
            }
        })
        .collect()
}

fn apbm(cfg: &ExperimentConfig) -> Result<Vec<CurveSummary>> {
    let seed = cfg.int("seed", 7);
    let (oracle, f_star): (SubgradientOracle<f64>, Option<f64>) = match cfg.instance()? {
        Some(Instance::Qp(q)) => {
            let f = qp_minimizer(&q).ok().map(|x| q.value(&x));
            (make_qp_oracle(q)?, f)
        }
        Some(inst @ Instance::Lp(_)) => (inst.oracle()?, None),
        None => {
            let (q, _) = qp_experiment_instance(cfg.int("dim", 50) as usize, seed);
            let f = qp_minimizer(&q).ok().map(|x| q.value(&x));
            (make_qp_oracle(q)?, f)
        }
    };
    let epsilon = cfg.num("epsilon", 1e-4);
    let mut params = ApbmParams::new(
        cfg.num("eta0", 1e6),
        cfg.num("beta0", 0.5),
        epsilon,
        cfg.int("max_outer", 500) as usize,
    );
    if let (Some(f), Some(gap)) = (f_star, cfg.parameters.get("target_gap").and_then(Value::as_f64)) {
        params = params.with_target(f + gap);
    }
    let y0 = vec![0.0; oracle.dim()];
    let file = "apbm.csv".to_string();
    let (trace, error) = match apbm_run(&oracle, &y0, &params) {
        Ok(t) => (t, None),
        Err(e) => (e.trace, Some(e.source)),
    };
    let mut table = Table::new(["k", "eta", "f_at_ytilde", "best_value", "gap_to_optimum", "inner_iters", "halved"]);
    let mut best = f64::INFINITY;
    for r in &trace.outer {
        best = best.min(r.f_at_ytilde);
        let gap = f_star.map_or(f64::NAN, |f| best - f);
        table.push([
            r.k as f64,
            r.eta,
            r.f_at_ytilde,
            best,
            gap,
            r.inner_iters as f64,
            r.halved as u8 as f64,
        ])?;
    }
    write_in(&cfg.output_dir, &file, &table)?;
    let final_gap = f_star.map_or(trace.best_value, |f| trace.best_value - f);
    Ok(vec![CurveSummary {
        name: "apbm".into(),
        file,
        iterations: trace.outer.len(),
        converged: error.is_none() && f_star.is_none_or(|_| final_gap <= epsilon),
        final_value: final_gap,
        note: error.map(|e| e.to_string()).unwrap_or_default(),
    }])
}

fn sample(cfg: &ExperimentConfig) -> Result<Vec<CurveSummary>> {
    let seed = cfg.int("seed", 7);
    let hybrid = cfg.kind == ExperimentKind::SampleHybrid;
    let oracle = match cfg.instance()? {
        Some(inst) => inst.oracle()?,
        None => {
            let n = cfg.int("rows", 20) as usize;
            let d = cfg.int("dim", 2) as usize;
            let exps = if hybrid {
                cfg.list("exponents", &[1.0, 1.5, 2.0])
            } else {
                vec![cfg.num("p", 1.5)]
            };
            let (inst, _) = lp_experiment_instance(n, d, &exps, seed)?;
            make_lp_oracle(inst)?
        }
    };
    let d = oracle.dim();
    let spec = oracle
        .holder_spec()
        .ok_or_else(|| Error::InvalidParameter("sampling needs Hölder metadata".into()))?;
    let eta = match cfg.parameters.get("eta").and_then(Value::as_f64) {
        Some(e) => e,
        None if hybrid => stepsize_hybrid(&spec, d),
        None => stepsize_holder(&spec, d)?,
    };
    let delta = cfg.num("delta", 0.1);
    let chains = cfg.int("chains", 4) as usize;
    let steps = cfg.int("steps", 1000);
    let burn_in = cfg.int("burn_in", 100);
    let file = format!("{}.csv", cfg.kind.name());
    let run = run_chains(&oracle, &vec![0.0; d], eta, delta, burn_in, steps, chains, seed)?;
    let mut buf = Vec::new();
    run.write_csv(&mut buf)?;
    std::fs::write(cfg.output_dir.join(&file), buf)?;
    let pooled = run.pooled_states();
    let moments = moment_diagnostics(&pooled)?;
    let trials: u64 = run.records.iter().flatten().map(|r| r.trials).sum();
    let mean_trials = trials as f64 / pooled.len() as f64;
    Ok(vec![CurveSummary {
        name: format!("eta={eta}"),
        file,
        iterations: pooled.len(),
        converged: true,
        final_value: mean_trials,
        note: format!("pooled mean {:?}", moments.mean),
    }])
}

/// Quadrature sweep of the integral lower bounds, Wendel's inequality, and brute-force
/// checks of the prox solver in one and two dimensions.
fn validate(cfg: &ExperimentConfig) -> Result<Vec<CurveSummary>> {
    let seed = cfg.int("seed", 7);
    let points = cfg.int("points", 200) as usize;
    let dir = &cfg.output_dir;
    let mut out = Vec::new();

    let mut rng = Rng::new(seed).split(0);
    let mut quad = Table::new([
        "d",
        "eta",
        "terms",
        "integral",
        "lower_bound",
        "provable_lower_bound",
        "condition_holds",
        "bound_respected",
    ]);
    let mut violations = 0;
    let mut provable_violations = 0;
    for i in 0..points {
        let d = 1 + i % 3;
        let eta = 10f64.powf(-2.0 + 3.0 * rng.uniform());
        let terms = if i % 2 == 0 { 1 } else { 2 + i % 2 };
        let comps: Vec<(f64, f64)> = (0..terms)
            .map(|_| (10f64.powf(-3.0 + 3.0 * rng.uniform()), rng.uniform()))
            .collect();
        let rep = gaussian_integral_check(d, eta, &comps)?;
        violations += (!rep.bound_respected()) as usize;
        provable_violations += (!rep.provable_bound_respected()) as usize;
        quad.push([
            d as f64,
            eta,
            terms as f64,
            rep.integral_estimate,
            rep.lower_bound,
            rep.provable_lower_bound,
            rep.condition_holds as u8 as f64,
            rep.bound_respected() as u8 as f64,
        ])?;
    }
    write_in(dir, "quadrature.csv", &quad)?;
    out.push(CurveSummary {
        name: "integral lower bounds".into(),
        file: "quadrature.csv".into(),
        iterations: points,
        converged: violations == 0,
        final_value: violations as f64,
        note: format!("{violations} violations of the stated bound, {provable_violations} of the provable one"),
    });

    let mut gauss = Table::new(["d", "eta", "quadrature", "closed_form", "rel_error"]);
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        for eta in [0.1, 1.0, 10.0] {
            let rep = gaussian_integral_check(d, eta, &[(0.0, 0.0)])?;
            let exact = gaussian_integral(d, eta);
            let rel = (rep.integral_estimate - exact).abs() / exact;
            worst = worst.max(rel);
            gauss.push([d as f64, eta, rep.integral_estimate, exact, rel])?;
        }
    }
    write_in(dir, "gaussian.csv", &gauss)?;
    out.push(CurveSummary {
        name: "gaussian closed form".into(),
        file: "gaussian.csv".into(),
        iterations: 9,
        converged: worst <= 1e-8,
        final_value: worst,
        note: String::new(),
    });

    let mut wendel = Table::new(["t", "s", "lower", "ratio", "upper"]);
    let mut ok = true;
    for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
        for s in [0.25, 0.5, 0.75] {
            let (lo, mid, hi) = wendel_bounds(t, s);
            ok &= lo <= mid && mid <= hi;
            wendel.push([t, s, lo, mid, hi])?;
        }
    }
    write_in(dir, "wendel.csv", &wendel)?;
    out.push(CurveSummary {
        name: "wendel".into(),
        file: "wendel.csv".into(),
        iterations: 15,
        converged: ok,
        final_value: ok as u8 as f64,
        note: String::new(),
    });

    let mut prox = Table::new(["case", "d", "eta", "delta", "f_eta_solver", "f_eta_grid", "excess"]);
    let mut rng = Rng::new(seed).split(1);
    let mut bad = 0;
    for case in 0..20 {
        let d = 1 + case % 2;
        let eta = 10f64.powf(-1.0 + 2.0 * rng.uniform());
        let delta = 1e-4;
        let a = Matrix::from_row_major(3, d, rng.normal_vec(3 * d))?;
        let b = rng.normal_vec(3);
        let inst = LpRegressionInstance::uniform(a, b, 1.0 + rng.uniform())?;
        let oracle = make_lp_oracle(inst)?;
        let y: Vec<f64> = rng.normal_vec(d);
        let r = solve_prox(&oracle, &y, &ProxParams::new(eta, delta), None)?;
        let x_grid = brute_force_prox(&oracle, &y, eta, 4.0 * (1.0 + eta), 201)?;
        let f_grid = prox_objective(oracle.function().value(&x_grid), &x_grid, &y, eta);
        let excess = r.f_eta_best - f_grid;
        bad += (excess > delta + 1e-8) as usize;
        prox.push([case as f64, d as f64, eta, delta, r.f_eta_best, f_grid, excess])?;
    }
    write_in(dir, "prox_check.csv", &prox)?;
    out.push(CurveSummary {
        name: "prox vs brute force".into(),
        file: "prox_check.csv".into(),
        iterations: 20,
        converged: bad == 0,
        final_value: bad as f64,
        note: format!("{bad} certificate violations"),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_and_mistyped_keys() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::new(ExperimentKind::ProxQp, dir.path()).with_param("p", 1.5);
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::ProxQp, dir.path()).with_param("dim", -3);
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::ProxQp, dir.path()).with_instance("/nonexistent.json");
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::ProxQp, dir.path()).with_param("etas", vec![0.5]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn config_from_json() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"kind": "prox_lp", "parameters": {"exponents": [1.5], "dim": 3}, "output_dir": "/tmp/x"}"#,
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::ProxLp);
        assert_eq!(cfg.list("exponents", &[]), vec![1.5]);
        assert!("sample_hybrid".parse::<ExperimentKind>().is_ok());
        assert!("bogus".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn small_prox_qp_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::new(ExperimentKind::ProxQp, dir.path())
            .with_param("dim", 5)
            .with_param("etas", vec![0.1, 1.0]);
        let rep = run_experiment(&cfg).unwrap();
        assert!(rep.all_converged());
        for f in &rep.files {
            assert!(f.is_file(), "{}", f.display());
        }
        let t = Table::read(dir.path().join("prox_qp_eta_1.csv")).unwrap();
        assert!(*t.column("gap_to_optimum").unwrap().last().unwrap() <= 1e-6);
    }

    #[test]
    fn budget_exhaustion_is_recorded_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::new(ExperimentKind::ProxLp, dir.path())
            .with_param("dim", 4)
            .with_param("rows", 10)
            .with_param("max_iters", 2)
            .with_param("exponents", vec![1.2, 2.0]);
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.curves.len(), 2);
        assert!(rep.curves.iter().any(|c| !c.converged && !c.note.is_empty()));
        let s = Table::read(dir.path().join("summary.csv")).unwrap();
        assert_eq!(s.len(), 2);
    }
}
