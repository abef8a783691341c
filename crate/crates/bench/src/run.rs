//! Executes a [`BenchConfig`] cell by cell.

use std::path::Path;
use std::time::Instant;

use submax_core::exact::max_brute_m;
use submax_core::localsearch::LocalMaxMode;
use submax_core::tolerance::approx_ge;
use submax_core::{
    alg, brute_force_opt, check_submodular, double_greedy_det, double_greedy_rand, is_approx_local_max,
    ls_approx_local_max, node_optima, ratio, verify_trace, AlgConfig, CheckMode, ExactResult, Instance, LsConfig, Rng,
    Verdict,
};

use crate::config::{Algorithm, BenchConfig};
use crate::error::{BenchError, Result};
use crate::report::{Row, RunReport};

/// Largest instance for which `verify` runs the exhaustive checks.
pub const MAX_VERIFY_M: usize = 12;

/// Runs `config`, resolving relative instance paths against the working directory.
pub fn run(config: &BenchConfig) -> Result<RunReport> {
    run_in(config, Path::new("."))
}

/// Reads a JSON config and runs it relative to the config file's directory.
pub fn run_config_file(path: &Path) -> Result<(BenchConfig, RunReport)> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = BenchConfig::from_json(&text).map_err(|e| match e {
        BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let report = run_in(&config, base)?;
    Ok((config, report))
}

pub fn run_in(config: &BenchConfig, base_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    let mut loaded = Vec::with_capacity(config.instances.len());
    for (i, src) in config.instances.iter().enumerate() {
        let (id, inst) = src.load(i, base_dir)?;
        if loaded.iter().any(|(other, _): &(String, Instance)| *other == id) {
            return Err(BenchError::config(format!("instance source #{i}: duplicate id {id:?}")));
        }
        loaded.push((id, inst));
    }

    let mut rows = Vec::new();
    for (id, inst) in &loaded {
        rows.extend(run_instance(config, id, inst));
    }
    Ok(RunReport::assemble(rows, config.timing))
}

struct InstanceContext {
    exact: Option<ExactResult>,
    /// Outcome of the exhaustive submodularity check, when it ran.
    submodular: Option<std::result::Result<(), String>>,
    verify: bool,
}

fn run_instance(config: &BenchConfig, id: &str, inst: &Instance) -> Vec<Row> {
    let m = inst.m;
    let verify = config.verify && m <= MAX_VERIFY_M;
    let exact = if m <= max_brute_m() {
        brute_force_opt(&inst.oracle()).ok()
    } else {
        None
    };
    let submodular =
        verify.then(
            || match check_submodular(&inst.oracle(), CheckMode::Exhaustive, 0, &mut Rng::new(0)) {
                Ok(Verdict::Pass { .. }) => Ok(()),
                Ok(Verdict::Fail(w)) => Err(format!("not submodular: {w:?}")),
                Err(e) => Err(e.to_string()),
            },
        );
    let ctx = InstanceContext {
        exact,
        submodular,
        verify,
    };

    let mut rows = Vec::new();
    for &algo in &config.algorithms {
        let epsilons: Vec<Option<f64>> = if algo.uses_epsilon() {
            config.epsilons.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        for eps in epsilons {
            let mut row = Row::new(id, m, algo, eps);
            row.opt = ctx.exact.as_ref().map(|e| e.opt_value);
            let start = Instant::now();
            if let Err(e) = run_cell(config, inst, &ctx, &mut row) {
                row.error = Some(e.to_string());
            }
            row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(row);
        }
    }
    rows
}

fn run_cell(config: &BenchConfig, inst: &Instance, ctx: &InstanceContext, row: &mut Row) -> submax_core::Result<()> {
    let oracle = inst.oracle();
    let mut checks: Vec<(bool, String)> = Vec::new();
    match row.algorithm {
        Algorithm::Alg(depth) => {
            let cfg = AlgConfig::new(row.epsilon.expect("alg rows carry epsilon"), depth)?;
            let out = alg(&oracle, &cfg)?;
            row.value = Some(out.value);
            row.queries = Some(oracle.ledger().count());
            row.moves = Some(out.trace.total_moves());
            if ctx.verify {
                let exact = node_optima(&inst.oracle(), &out.trace)?;
                let report = verify_trace(&out.trace, &exact, cfg.epsilon)?;
                for f in report.failures() {
                    checks.push((false, format!("{:?} failed at {} (slack {})", f.kind, f.path, f.slack)));
                }
            }
            if config.traces {
                row.trace = Some(out.trace);
            }
        }
        Algorithm::Ls => {
            let eps = row.epsilon.expect("ls rows carry epsilon");
            let shifted = oracle.shift()?;
            let ls = ls_approx_local_max(&shifted, &LsConfig::new(eps)?)?;
            row.queries = Some(oracle.ledger().count());
            row.moves = Some(ls.moves);
            row.value = Some(inst.oracle().evaluate(&ls.set)?);
            if ctx.verify {
                let fresh = inst.oracle().shift()?;
                let ok = is_approx_local_max(&fresh, &ls.set, eps, LocalMaxMode::Exhaustive)?;
                checks.push((ok, format!("{:?} is not a {eps}-approximate local maximum", ls.set)));
            }
        }
        Algorithm::DgDet => {
            let (_, value) = double_greedy_det(&oracle)?;
            row.value = Some(value);
            row.queries = Some(oracle.ledger().count());
            row.moves = Some(0);
            if let (true, Some(ex)) = (ctx.verify, &ctx.exact) {
                let ok = approx_ge(value, ex.opt_value / 3.0);
                checks.push((ok, format!("value {value} below OPT/3 = {}", ex.opt_value / 3.0)));
            }
        }
        Algorithm::DgRand => {
            let n = config.trials;
            let mut values = Vec::with_capacity(n);
            for i in 0..n {
                let mut rng = Rng::new(Rng::derive_seed(config.base_seed, i as u64));
                values.push(double_greedy_rand(&oracle, &mut rng)?.1);
            }
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            row.value = Some(mean);
            row.std = Some(std);
            row.trials = Some(n);
            row.queries = Some(oracle.ledger().count() / n as u64);
            row.moves = Some(0);
            if let (true, Some(ex), true) = (ctx.verify, &ctx.exact, n > 1) {
                let bound = 0.5 * ex.opt_value - 3.0 * std / (n as f64).sqrt();
                checks.push((
                    approx_ge(mean, bound),
                    format!("mean {mean} below OPT/2 - 3 std/sqrt(n) = {bound}"),
                ));
            }
        }
        Algorithm::Brute => {
            let ex = brute_force_opt(&oracle)?;
            row.value = Some(ex.opt_value);
            row.queries = Some(ex.evaluations);
            row.moves = Some(0);
        }
    }
    if let (Some(ex), Some(v)) = (&ctx.exact, row.value) {
        row.ratio = Some(ratio(v, ex)?);
    }
    if ctx.verify {
        let mut ok = true;
        if let Some(Err(msg)) = &ctx.submodular {
            ok = false;
            row.failures.push(msg.clone());
        }
        for (pass, msg) in checks {
            if !pass {
                ok = false;
                row.failures.push(msg);
            }
        }
        row.verified = Some(ok);
    }
    Ok(())
}
