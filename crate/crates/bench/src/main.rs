use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use submax_bench::{
    emit, run_config_file, scaling_experiment_with, Algorithm, BenchError, Family, OutputFormat, MAX_VERIFY_M,
};
use submax_core::exact::max_brute_m;
use submax_core::instance::MAX_EXHAUSTIVE_CHECK_M;
use submax_core::{
    alg, brute_force_opt, check_submodular, double_greedy_det, double_greedy_rand, ls_approx_local_max, node_optima,
    parse, random_instance, serialize, verify_trace, AlgConfig, CheckMode, Instance, InstanceKind, LsConfig,
    RandomParams, Rng, Verdict,
};

#[derive(Parser)]
#[command(name = "submax", version, about = "Unconstrained submodular maximization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark suite described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output format.
        #[arg(long)]
        format: Option<String>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on one instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// alg, ls, dg-det, dg-rand or brute.
        #[arg(long, default_value = "alg")]
        algo: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Seed for dg-rand.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the recursion trace.
        #[arg(long)]
        trace: bool,
    },
    /// Check an instance and the algorithm's guarantees on it.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Sampled submodularity triples for instances too large to check exhaustively.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a random instance.
    Gen(GenArgs),
    /// Fit the query-count growth of the algorithm over a size sweep.
    Scale {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    edge_probability: Option<f64>,
    #[arg(long)]
    weight_min: Option<f64>,
    #[arg(long)]
    weight_max: Option<f64>,
    #[arg(long)]
    universe: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
}

/// Failures split by exit status.
enum Failure {
    Config(String),
    Verification(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Run { config, format, out } => {
            let (cfg, report) = run_config_file(&config)?;
            let format = match format {
                Some(f) => f.parse::<OutputFormat>()?,
                None => cfg.format,
            };
            write_output(out.as_deref(), &emit(&report, format))?;
            Ok(report.exit_code() as u8)
        }
        Command::Solve {
            instance,
            algo,
            depth,
            epsilon,
            seed,
            trace,
        } => {
            let inst = load_instance(&instance)?;
            let algo = match algo.as_str() {
                "alg" => Algorithm::Alg(depth),
                other => other.parse()?,
            };
            let oracle = inst.oracle();
            let mut out =
                json!({ "instance": instance.display().to_string(), "m": inst.m, "algorithm": algo.to_string() });
            let (set, value, moves) = match algo {
                Algorithm::Alg(d) => {
                    let res = alg(&oracle, &AlgConfig::new(epsilon, d).map_err(config_err)?).map_err(config_err)?;
                    out["epsilon"] = json!(epsilon);
                    if trace {
                        out["trace"] = serde_json::to_value(&res.trace).expect("trace serializes");
                    }
                    let moves = res.trace.total_moves();
                    (res.set, res.value, moves)
                }
                Algorithm::Ls => {
                    let cfg = LsConfig::new(epsilon).map_err(config_err)?;
                    let res = ls_approx_local_max(&oracle.shift().map_err(config_err)?, &cfg).map_err(config_err)?;
                    out["epsilon"] = json!(epsilon);
                    let value = inst.oracle().evaluate(&res.set).map_err(config_err)?;
                    (res.set, value, res.moves)
                }
                Algorithm::DgDet => {
                    let (s, v) = double_greedy_det(&oracle).map_err(config_err)?;
                    (s, v, 0)
                }
                Algorithm::DgRand => {
                    out["seed"] = json!(seed);
                    let (s, v) = double_greedy_rand(&oracle, &mut Rng::new(seed)).map_err(config_err)?;
                    (s, v, 0)
                }
                Algorithm::Brute => {
                    let ex = brute_force_opt(&oracle).map_err(config_err)?;
                    (ex.opt_set, ex.opt_value, 0)
                }
            };
            out["set"] = json!(set.members());
            out["value"] = json!(value);
            out["queries"] = json!(oracle.ledger().count());
            out["moves"] = json!(moves);
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            Ok(0)
        }
        Command::Verify {
            instance,
            epsilon,
            depth,
            trials,
            seed,
        } => verify(&load_instance(&instance)?, epsilon, depth, trials, seed),
        Command::Gen(args) => {
            let kind: InstanceKind = args.kind.parse().map_err(config_err)?;
            let mut params = RandomParams::default();
            if let Some(p) = args.edge_probability {
                params.edge_probability = p;
            }
            if let Some(w) = args.weight_min {
                params.weight_range.0 = w;
            }
            if let Some(w) = args.weight_max {
                params.weight_range.1 = w;
            }
            if let Some(u) = args.universe {
                params.universe = u;
            }
            if let Some(d) = args.density {
                params.density = d;
            }
            let inst = random_instance(kind, args.m, args.seed, &params).map_err(config_err)?;
            write_output(args.out.as_deref(), &(serialize(&inst) + "\n"))?;
            Ok(0)
        }
        Command::Scale {
            family,
            sizes,
            epsilon,
            depth,
            seed,
            json,
        } => {
            let family: Family = family.parse()?;
            let fit = scaling_experiment_with(family, &sizes, epsilon, depth, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&fit).expect("json"));
            } else {
                println!("m,queries,residual");
                for (p, r) in fit.points.iter().zip(&fit.residuals) {
                    println!("{},{},{r}", p.m, p.queries);
                }
                println!("slope {} intercept {}", fit.slope, fit.intercept);
            }
            Ok(0)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(inst: &Instance, epsilon: f64, depth: usize, trials: u64, seed: u64) -> Result<u8, Failure> {
    let oracle = inst.oracle();
    let (mode, label) = if inst.m <= MAX_EXHAUSTIVE_CHECK_M {
        (CheckMode::Exhaustive, "exhaustive")
    } else {
        (CheckMode::Sampled, "sampled")
    };
    match check_submodular(&oracle, mode, trials, &mut Rng::new(seed)).map_err(config_err)? {
        Verdict::Pass { triples_checked } => println!("submodular ({label}): ok, {triples_checked} triples"),
        Verdict::Fail(w) => return Err(Failure::Verification(format!("not submodular: {w:?}"))),
    }

    let cfg = AlgConfig::new(epsilon, depth).map_err(config_err)?;
    let oracle = inst.oracle();
    let out = alg(&oracle, &cfg).map_err(config_err)?;
    println!(
        "alg@{depth} eps={epsilon}: value {} with {} queries",
        out.value,
        oracle.ledger().count()
    );
    if inst.m > MAX_VERIFY_M || inst.m > max_brute_m() {
        println!("trace checks skipped (m = {} > {MAX_VERIFY_M})", inst.m);
        return Ok(0);
    }
    let exact = node_optima(&inst.oracle(), &out.trace).map_err(config_err)?;
    println!("opt {}", exact.opt);
    let report = verify_trace(&out.trace, &exact, epsilon).map_err(config_err)?;
    let failures: Vec<String> = report
        .failures()
        .map(|f| format!("{:?} at {} (slack {})", f.kind, f.path, f.slack))
        .collect();
    if failures.is_empty() {
        println!("trace checks: ok, {} outcomes", report.outcomes.len());
        Ok(0)
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}
