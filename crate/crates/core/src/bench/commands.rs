use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{BenchConfig, EngineKind, GenerateConfig};
use super::report::{self, BenchReport, InstanceReport, IterationStats, TIME_LABEL};
use super::run::{check_provenance_mix, Denominator, NamedInstance, Solver, TrialRecord};
use crate::baselines::{gw_solve, local_search_best, GwParams, LocalSearchParams};
use crate::error::{Error, Result};
use crate::ising::{
    brute_force_ground_state, random_graph, save_instance, write_instance, Provenance, BRUTE_FORCE_CAP,
};
use crate::sb::TrialResult;
use crate::seed;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn trials_jsonl<'a>(rows: impl IntoIterator<Item = (&'a str, &'a TrialResult)>) -> String {
    let mut out = String::new();
    for (id, t) in rows {
        out.push_str(&serde_json::to_string(&TrialRecord::new(id, t)).expect("trial records serialize"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub n: usize,
    pub density: f64,
    pub count: usize,
    pub seed: u64,
    pub instances: Vec<ManifestEntry>,
}

/// Write `count` random instances plus `manifest.json` into `out`.
///
/// Instance `i` uses seed `split(seed, i)`.
pub fn cmd_gen(g: &GenerateConfig, out: &Path) -> Result<Manifest> {
    if g.count == 0 {
        return Err(Error::invalid("count", "must be >= 1"));
    }
    let width = g.count.saturating_sub(1).to_string().len().max(2);
    let mut instances = Vec::with_capacity(g.count);
    for i in 0..g.count {
        let seed = seed::split(g.seed, i as u64);
        let p = random_graph(g.n, g.density, seed)?;
        let file = format!("g{i:0width$}.txt");
        write_file(&out.join(&file), &write_instance(&p))?;
        instances.push(ManifestEntry {
            file,
            seed,
            edges: p.coupling.edge_count(),
        });
    }
    let manifest = Manifest {
        n: g.n,
        density: g.density,
        count: g.count,
        seed: g.seed,
        instances,
    };
    write_file(&out.join("manifest.json"), &to_json(&manifest))?;
    Ok(manifest)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveSummary {
    pub instance_id: String,
    pub engine: String,
    pub trials: usize,
    pub iterations: usize,
    pub best_known_cut: Option<u64>,
    pub denominator_provenance: Option<String>,
    pub best_cut: u64,
    pub mean_best_cut: f64,
    /// Empty when the instance has no denominator.
    pub curve: Vec<IterationStats>,
}

impl SolveSummary {
    pub fn final_stats(&self) -> Option<&IterationStats> {
        self.curve.last()
    }

    pub fn csv(&self) -> String {
        let (acc, std) = self
            .final_stats()
            .map_or((String::new(), String::new()), |s| (s.mean_acc.to_string(), s.std_acc.to_string()));
        format!(
            "instance_id,engine,trials,iterations,best_known_cut,provenance,best_cut,mean_best_cut,mean_acc,std_acc\n{},{},{},{},{},{},{},{},{acc},{std}\n",
            self.instance_id,
            self.engine,
            self.trials,
            self.iterations,
            self.best_known_cut.map_or(String::new(), |c| c.to_string()),
            self.denominator_provenance.as_deref().unwrap_or(""),
            self.best_cut,
            self.mean_best_cut,
        )
    }
}

/// Run the configured engine on one instance; writes `trials.jsonl` and
/// `summary.csv`. Instances without a stored denominator that fit the
/// exhaustive oracle are scored against their exact ground state.
pub fn cmd_solve(cfg: &BenchConfig, instance: &Path, out: &Path) -> Result<SolveSummary> {
    let solver = Solver::from_config(cfg)?;
    let named = NamedInstance::load(instance)?;
    let p = &named.instance;
    let trials = solver.run(p, cfg.bench.trials, cfg.bench.base_seed)?;

    let denominator = match named.denominator() {
        Ok(d) => Some(d),
        Err(Error::MissingDenominator(_)) if p.n() <= BRUTE_FORCE_CAP && p.coupling.edge_count() > 0 => {
            Some(Denominator {
                cut: brute_force_ground_state(&p.coupling)?.cut,
                provenance: Some(Provenance::Exact),
            })
        }
        Err(Error::MissingDenominator(_)) => {
            log::warn!("{}: no best-known cut; reporting raw cuts only", named.id);
            None
        }
        Err(e) => return Err(e),
    };
    let iterations = solver.iterations();
    let curve = denominator.as_ref().map_or_else(Vec::new, |d| {
        let m = report::accuracy_matrix(&trials, d.cut, iterations);
        report::curve(&m, &cfg.bench.thresholds, |k| solver.hardware_time(k))
    });
    let summary = SolveSummary {
        instance_id: named.id.clone(),
        engine: solver.engine.to_string(),
        trials: trials.len(),
        iterations,
        best_known_cut: denominator.as_ref().map(|d| d.cut),
        denominator_provenance: denominator.as_ref().map(Denominator::label),
        best_cut: trials.iter().map(|t| t.best_cut).max().unwrap_or(0),
        mean_best_cut: trials.iter().map(|t| t.best_cut as f64).sum::<f64>() / trials.len() as f64,
        curve,
    };
    write_file(
        &out.join("trials.jsonl"),
        &trials_jsonl(trials.iter().map(|t| (named.id.as_str(), t))),
    )?;
    write_file(&out.join("summary.csv"), &summary.csv())?;
    Ok(summary)
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<(NamedInstance, Denominator)>> {
    if paths.is_empty() {
        return Err(Error::Validation(
            "no instances given; list them under [bench] instances or on the command line".into(),
        ));
    }
    let loaded = paths
        .iter()
        .map(|path| {
            let named = NamedInstance::load(path)?;
            let d = named.denominator()?;
            Ok((named, d))
        })
        .collect::<Result<Vec<_>>>()?;
    check_provenance_mix(loaded.iter().map(|(n, d)| (n.id.as_str(), d)))?;
    Ok(loaded)
}

/// Full benchmark: every instance, trials, GW references and the aggregate
/// report. Writes `trials.jsonl`, `report.csv` and `report.json`.
pub fn cmd_bench(cfg: &BenchConfig, instances: &[PathBuf], out: &Path) -> Result<BenchReport> {
    let solver = Solver::from_config(cfg)?;
    let loaded = load_all(instances)?;
    let class = check_provenance_mix(loaded.iter().map(|(n, d)| (n.id.as_str(), d)))?;
    let b = &cfg.bench;
    let iterations = solver.iterations();
    let time = |k: usize| solver.hardware_time(k);
    let gw_params = GwParams::default();

    let mut all_trials = Vec::with_capacity(loaded.len());
    let mut reports: Vec<InstanceReport> = Vec::with_capacity(loaded.len());
    let mut matrix = Vec::with_capacity(loaded.len() * b.trials);
    for (named, d) in &loaded {
        let p = &named.instance;
        let trials = solver.run(p, b.trials, b.base_seed)?;
        let (mut rep, m) = report::instance_report(
            &named.id,
            p.n(),
            p.coupling.edge_count(),
            d,
            &trials,
            iterations,
            &b.thresholds,
            time,
        );
        if b.gw {
            let gw = gw_solve(p, &gw_params)?;
            rep.gw = Some(report::gw_reference(&gw, gw_params.roundings, d.cut, &rep.curve));
        }
        matrix.extend(m);
        reports.push(rep);
        all_trials.push(trials);
    }

    let aggregate = report::curve(&matrix, &b.thresholds, time);
    let last: Vec<f64> = matrix.iter().map(|row| row[iterations - 1]).collect();
    let total_trials = all_trials.iter().map(Vec::len).sum();
    debug_assert_eq!(total_trials, loaded.len() * b.trials);
    let report = BenchReport {
        engine: solver.engine.to_string(),
        trials_per_instance: b.trials,
        iterations,
        thresholds: b.thresholds.clone(),
        denominator_provenance: class.to_string(),
        time_label: TIME_LABEL,
        iteration_latency_s: solver.setup.array.iteration_latency(),
        total_trials,
        success_comparison: report::success_comparison(&aggregate, &b.thresholds, 15, 20),
        histogram: report::histogram(&last, iterations),
        aggregate,
        instances: reports,
        gw_variant: b.gw.then(|| {
            format!(
                "Burer-Monteiro rank ceil(sqrt(2n)) relaxation; expected = mean over {0} hyperplane roundings, best = max over the same {0}",
                gw_params.roundings
            )
        }),
    };

    let rows = loaded
        .iter()
        .zip(&all_trials)
        .flat_map(|((named, _), ts)| ts.iter().map(move |t| (named.id.as_str(), t)));
    write_file(&out.join("trials.jsonl"), &trials_jsonl(rows))?;
    write_file(&out.join("report.csv"), &report::report_csv(&report))?;
    write_file(&out.join("report.json"), &to_json(&report))?;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub beta: f64,
    pub amplitude0: f64,
    pub decay_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    /// Mean final accuracy per instance, in instance order.
    pub per_instance: Vec<f64>,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceBest {
    pub instance_id: String,
    pub best_point: SweepPoint,
    pub best_accuracy: f64,
    /// Accuracy of the overall best point on this instance.
    pub shared_point_accuracy: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub iterations: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub instance_ids: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub best_point: SweepPoint,
    pub best_mean: f64,
    pub per_instance: Vec<InstanceBest>,
    pub max_gap: f64,
}

impl SweepReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("alpha,beta,amplitude0,decay_rate,instance_id,mean_acc\n");
        for r in &self.rows {
            let p = r.point;
            let prefix = format!("{},{},{},{}", p.alpha, p.beta, p.amplitude0, p.decay_rate);
            for (id, acc) in self.instance_ids.iter().zip(&r.per_instance) {
                out.push_str(&format!("{prefix},{id},{acc}\n"));
            }
            out.push_str(&format!("{prefix},all,{}\n", r.mean));
        }
        out
    }
}

/// Grid scan over `(alpha, beta, A_0, decay_rate)` with the ideal engine.
///
/// Every point reuses the same trial seeds. Writes `sweep.csv` and
/// `sweep.json`.
pub fn cmd_sweep(cfg: &BenchConfig, instances: &[PathBuf], out: &Path) -> Result<SweepReport> {
    if cfg.bench.engine != EngineKind::Ideal || cfg.bench.lockstep {
        return Err(Error::Validation("sweep runs the ideal engine without lockstep".into()));
    }
    let g = &cfg.sweep;
    if [&g.alphas, &g.betas, &g.amplitudes, &g.decay_rates].iter().any(|v| v.is_empty()) {
        return Err(Error::Validation("sweep grid has an empty axis".into()));
    }
    let loaded = load_all(instances)?;
    let iterations = cfg.bench.iterations;

    let mut rows = Vec::new();
    for &alpha in &g.alphas {
        for &beta in &g.betas {
            for &amplitude0 in &g.amplitudes {
                for &decay_rate in &g.decay_rates {
                    let mut point_cfg = cfg.clone();
                    point_cfg.sb.alpha = alpha;
                    point_cfg.sb.beta = beta;
                    point_cfg.noise.amplitude0 = amplitude0;
                    point_cfg.noise.decay_rate = decay_rate;
                    point_cfg.dac.decay_rate = decay_rate;
                    let solver = Solver::from_config(&point_cfg)?;
                    let per_instance = loaded
                        .iter()
                        .map(|(named, d)| {
                            let trials = solver.run(&named.instance, cfg.bench.trials, cfg.bench.base_seed)?;
                            let m = report::accuracy_matrix(&trials, d.cut, iterations);
                            let last: Vec<f64> = m.iter().map(|r| r[iterations - 1]).collect();
                            Ok(report::column_stats(&last, &[]).0)
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    let mean = per_instance.iter().sum::<f64>() / per_instance.len() as f64;
                    rows.push(SweepRow {
                        point: SweepPoint {
                            alpha,
                            beta,
                            amplitude0,
                            decay_rate,
                        },
                        per_instance,
                        mean,
                    });
                }
            }
        }
    }

    let best = rows
        .iter()
        .reduce(|a, b| if b.mean > a.mean { b } else { a })
        .expect("non-empty grid");
    let per_instance: Vec<InstanceBest> = loaded
        .iter()
        .enumerate()
        .map(|(i, (named, _))| {
            let top = rows
                .iter()
                .reduce(|a, b| if b.per_instance[i] > a.per_instance[i] { b } else { a })
                .expect("non-empty grid");
            InstanceBest {
                instance_id: named.id.clone(),
                best_point: top.point,
                best_accuracy: top.per_instance[i],
                shared_point_accuracy: best.per_instance[i],
                gap: top.per_instance[i] - best.per_instance[i],
            }
        })
        .collect();
    let report = SweepReport {
        iterations,
        trials: cfg.bench.trials,
        base_seed: cfg.bench.base_seed,
        instance_ids: loaded.iter().map(|(n, _)| n.id.clone()).collect(),
        best_point: best.point,
        best_mean: best.mean,
        max_gap: per_instance.iter().map(|p| p.gap).fold(0.0, f64::max),
        per_instance,
        rows,
    };
    write_file(&out.join("sweep.csv"), &report.csv())?;
    write_file(&out.join("sweep.json"), &to_json(&report))?;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleMethod {
    /// Exact below the size cap, local search above it.
    Auto,
    Exact,
    LocalSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRecord {
    pub instance_id: String,
    pub n: usize,
    pub cut: u64,
    pub provenance: String,
    /// Value stored in the file after the update.
    pub stored_cut: u64,
    pub stored_provenance: Option<String>,
    pub updated: bool,
}

/// Compute a denominator and write it back into the instance file. The
/// stored value is never lowered.
pub fn cmd_oracle(path: &Path, method: OracleMethod, local: &LocalSearchParams) -> Result<OracleRecord> {
    let mut named = NamedInstance::load(path)?;
    let p = &mut named.instance;
    let n = p.n();
    let exact = match method {
        OracleMethod::Auto => n <= BRUTE_FORCE_CAP,
        OracleMethod::Exact => true,
        OracleMethod::LocalSearch => false,
    };
    let (cut, provenance) = if exact {
        (brute_force_ground_state(&p.coupling)?.cut, Provenance::Exact)
    } else {
        let r = local_search_best(p, local)?;
        (
            r.cut,
            Provenance::LocalSearch {
                restarts: local.restarts,
            },
        )
    };
    let updated = p.offer_best_known(cut, provenance.clone())?;
    if updated {
        save_instance(p, path)?;
    }
    let stored = p.best_known.as_ref().expect("offer always leaves a record");
    Ok(OracleRecord {
        instance_id: named.id.clone(),
        n,
        cut,
        provenance: provenance.to_string(),
        stored_cut: stored.cut,
        stored_provenance: stored.provenance.as_ref().map(ToString::to_string),
        updated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineRecord {
    pub instance_id: String,
    pub n: usize,
    pub edges: usize,
    pub gw_expected_cut: f64,
    pub gw_best_cut: u64,
    pub gw_roundings: usize,
    pub gw_relaxation: f64,
    pub gw_converged: bool,
    pub local_search_cut: u64,
    pub local_search_restarts: usize,
}

/// GW and local-search cuts for one instance.
pub fn cmd_baseline(path: &Path, gw: &GwParams, local: &LocalSearchParams) -> Result<BaselineRecord> {
    let named = NamedInstance::load(path)?;
    let p = &named.instance;
    let g = gw_solve(p, gw)?;
    let ls = local_search_best(p, local)?;
    Ok(BaselineRecord {
        instance_id: named.id.clone(),
        n: p.n(),
        edges: p.coupling.edge_count(),
        gw_expected_cut: g.expected_cut,
        gw_best_cut: g.best_cut,
        gw_roundings: gw.roundings,
        gw_relaxation: g.relaxation,
        gw_converged: g.converged,
        local_search_cut: ls.cut,
        local_search_restarts: local.restarts,
    })
}
