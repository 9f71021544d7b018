use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sbcim::baselines::{GwParams, LocalSearchParams};
use sbcim::bench::{
    cmd_baseline, cmd_bench, cmd_gen, cmd_oracle, cmd_solve, cmd_sweep, BenchConfig, EngineKind,
    GenerateConfig, IterationStats, OracleMethod,
};
use sbcim::{Error, Result};

const WORKERS_ENV: &str = "SBCIM_WORKERS";

/// Simulated-bifurcation MAXCUT solver and SRAM compute-in-memory chip model.
#[derive(Parser, Debug)]
#[command(name = "sbcim", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed (trial seeds for solve/bench/sweep, generator seed for gen,
    /// restart seed for oracle/baseline).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    engine: Option<EngineKind>,
    /// Trials per instance.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// SB iterations per trial.
    #[arg(long, global = true)]
    iterations: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate random binary instances and a manifest.
    Gen {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Run trials on one instance.
    Solve { instance: PathBuf },
    /// Run the full benchmark and write the report.
    Bench { instances: Vec<PathBuf> },
    /// Scan the parameter grid from the config's [sweep] table.
    Sweep { instances: Vec<PathBuf> },
    /// Compute best-known cuts and store them in the instance files.
    Oracle {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = OracleMethod::Auto)]
        method: OracleMethod,
        #[arg(long, default_value_t = 1000)]
        restarts: usize,
    },
    /// Report GW and local-search cuts for one instance.
    Baseline {
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        roundings: usize,
        #[arg(long, default_value_t = 1000)]
        restarts: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = raw
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| Error::Validation(format!("{WORKERS_ENV}={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn load_config(g: &Global) -> Result<BenchConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let mut cfg = BenchConfig::load(path)?;
            let base = path.parent().unwrap_or(Path::new(""));
            for p in &mut cfg.bench.instances {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            cfg
        }
        None => BenchConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.bench.base_seed = s;
    }
    if let Some(e) = g.engine {
        cfg.bench.engine = e;
    }
    if let Some(t) = g.trials {
        cfg.bench.trials = t;
    }
    if let Some(k) = g.iterations {
        cfg.bench.iterations = k;
    }
    if let Some(o) = &g.out {
        cfg.bench.out_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn instance_list(cfg: &BenchConfig, given: Vec<PathBuf>) -> Vec<PathBuf> {
    if given.is_empty() {
        cfg.bench.instances.clone()
    } else {
        given
    }
}

fn checkpoints(curve: &[IterationStats]) -> impl Iterator<Item = &IterationStats> {
    let last = curve.len();
    curve.iter().filter(move |s| s.iteration % 5 == 0 || s.iteration == last)
}

fn print_curve(thresholds: &[f64], curve: &[IterationStats]) {
    print!("{:>5} {:>9} {:>8}", "iter", "mean_acc", "std_acc");
    for t in thresholds {
        print!(" {:>8}", format!("P>={t}"));
    }
    println!(" {:>12}", "hw_time_s");
    for s in checkpoints(curve) {
        print!("{:>5} {:>9.4} {:>8.4}", s.iteration, s.mean_acc, s.std_acc);
        for p in &s.p_ge {
            print!(" {p:>8.3}");
        }
        println!(" {:>12.3e}", s.hardware_equivalent_time_s);
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_workers()?;
    let g = cli.global;
    match cli.command {
        Command::Gen { n, density, count } => {
            let cfg = load_config(&g)?;
            let base = cfg.generate.unwrap_or(GenerateConfig {
                n: 60,
                density: 0.5,
                count: 10,
                seed: 0,
            });
            let spec = GenerateConfig {
                n: n.unwrap_or(base.n),
                density: density.unwrap_or(base.density),
                count: count.unwrap_or(base.count),
                seed: g.seed.unwrap_or(base.seed),
            };
            let out = &cfg.bench.out_dir;
            let manifest = cmd_gen(&spec, out)?;
            for e in &manifest.instances {
                println!("{}  edges={}  seed={:#018x}", out.join(&e.file).display(), e.edges, e.seed);
            }
        }
        Command::Solve { instance } => {
            let cfg = load_config(&g)?;
            let s = cmd_solve(&cfg, &instance, &cfg.bench.out_dir)?;
            println!(
                "{}: engine={} trials={} best_cut={} mean_best_cut={:.2}",
                s.instance_id, s.engine, s.trials, s.best_cut, s.mean_best_cut
            );
            match (&s.best_known_cut, &s.denominator_provenance) {
                (Some(d), Some(p)) => {
                    println!("denominator {d} ({p}); time is hardware-equivalent");
                    print_curve(&cfg.bench.thresholds, &s.curve);
                }
                _ => println!("no denominator; run `sbcim oracle` for accuracies"),
            }
        }
        Command::Bench { instances } => {
            let cfg = load_config(&g)?;
            let paths = instance_list(&cfg, instances);
            let r = cmd_bench(&cfg, &paths, &cfg.bench.out_dir)?;
            println!(
                "{} instances x {} trials, engine={}, denominators: {}",
                r.instances.len(),
                r.trials_per_instance,
                r.engine,
                r.denominator_provenance
            );
            print_curve(&r.thresholds, &r.aggregate);
            for c in &r.success_comparison {
                println!(
                    "P(acc >= {}): {:.3} at {} iterations, {:.3} at {}",
                    c.threshold, c.p_a, c.iteration_a, c.p_b, c.iteration_b
                );
            }
            for i in &r.instances {
                if let Some(gw) = &i.gw {
                    let cross = gw
                        .crossover_iteration
                        .map_or_else(|| "never".to_string(), |k| format!("iteration {k}"));
                    println!(
                        "{}: GW expected {:.4} best {:.4}, SB mean passes GW expected at {cross}",
                        i.instance_id, gw.expected_accuracy, gw.best_accuracy
                    );
                }
            }
            println!(
                "final accuracy {:.4} +/- {:.4}; wrote {}",
                r.histogram.mean,
                r.histogram.std,
                cfg.bench.out_dir.display()
            );
        }
        Command::Sweep { instances } => {
            let cfg = load_config(&g)?;
            let paths = instance_list(&cfg, instances);
            let r = cmd_sweep(&cfg, &paths, &cfg.bench.out_dir)?;
            let p = r.best_point;
            println!(
                "best point alpha={} beta={} A0={} decay_rate={}: mean accuracy {:.4}",
                p.alpha, p.beta, p.amplitude0, p.decay_rate, r.best_mean
            );
            for i in &r.per_instance {
                println!(
                    "{}: shared point {:.4}, own best {:.4}, gap {:.4}",
                    i.instance_id, i.shared_point_accuracy, i.best_accuracy, i.gap
                );
            }
            println!("max gap {:.4}; wrote {}", r.max_gap, cfg.bench.out_dir.display());
        }
        Command::Oracle {
            instances,
            method,
            restarts,
        } => {
            let local = LocalSearchParams {
                restarts,
                max_flips: None,
                seed: g.seed.unwrap_or(0),
            };
            for path in &instances {
                let rec = cmd_oracle(path, method, &local)?;
                println!("{}", serde_json::to_string(&rec).expect("record serializes"));
            }
        }
        Command::Baseline {
            instance,
            roundings,
            restarts,
        } => {
            let seed = g.seed.unwrap_or(0);
            let gw = GwParams {
                roundings,
                seed,
                ..GwParams::default()
            };
            let local = LocalSearchParams {
                restarts,
                max_flips: None,
                seed,
            };
            let rec = cmd_baseline(&instance, &gw, &local)?;
            println!("{}", serde_json::to_string(&rec).expect("record serializes"));
        }
    }
    Ok(())
}
