//! Aggregation of trial results into accuracy curves, success
//! probabilities, histograms and the plot-ready report.
//!
//! Accuracy at iteration `k` is the best cut found in the first `k`
//! iterations divided by the instance's best-known cut, so every curve is
//! non-decreasing in `k`.

use std::fmt::Write as _;

use serde::Serialize;

use super::run::Denominator;
use crate::baselines::GwResult;
use crate::sb::TrialResult;

pub const HISTOGRAM_BINS: usize = 100;
pub const TIME_LABEL: &str = "hardware-equivalent time";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    /// 1-based iteration count.
    pub iteration: usize,
    pub mean_acc: f64,
    /// Population standard deviation over trials.
    pub std_acc: f64,
    /// `P(accuracy >= threshold)`, one entry per threshold.
    pub p_ge: Vec<f64>,
    pub hardware_equivalent_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GwReference {
    /// Mean cut over the hyperplane roundings.
    pub expected_cut: f64,
    pub expected_accuracy: f64,
    /// Best cut over the hyperplane roundings.
    pub best_cut: u64,
    pub best_accuracy: f64,
    pub roundings: usize,
    pub relaxation: f64,
    /// First iteration whose mean accuracy reaches the expected GW accuracy.
    pub crossover_iteration: Option<usize>,
    pub crossover_hardware_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub instance_id: String,
    pub n: usize,
    pub edges: usize,
    pub best_known_cut: u64,
    pub denominator_provenance: String,
    pub trials: usize,
    /// Best cut over all trials and iterations.
    pub best_cut: u64,
    pub curve: Vec<IterationStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gw: Option<GwReference>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub iteration: usize,
    pub bin_width: f64,
    /// Lower edge of each bin; the last bin also holds accuracies >= 1.
    pub lower_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessComparison {
    pub threshold: f64,
    pub iteration_a: usize,
    pub p_a: f64,
    pub iteration_b: usize,
    pub p_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub engine: String,
    pub trials_per_instance: usize,
    pub iterations: usize,
    pub thresholds: Vec<f64>,
    pub denominator_provenance: String,
    pub time_label: &'static str,
    pub iteration_latency_s: f64,
    pub total_trials: usize,
    pub instances: Vec<InstanceReport>,
    pub aggregate: Vec<IterationStats>,
    pub histogram: Histogram,
    pub success_comparison: Vec<SuccessComparison>,
    /// How the GW numbers were produced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gw_variant: Option<String>,
}

/// Best-so-far accuracy of each trial at each iteration `1..=iterations`.
pub fn accuracy_matrix(trials: &[TrialResult], denominator: u64, iterations: usize) -> Vec<Vec<f64>> {
    trials
        .iter()
        .map(|t| {
            let mut best = t.best_so_far();
            if let Some(&last) = best.last() {
                best.resize(iterations.max(best.len()), last);
            }
            best[..iterations]
                .iter()
                .map(|&c| c as f64 / denominator as f64)
                .collect()
        })
        .collect()
}

/// Mean, population std and threshold probabilities of one column of accuracies.
pub fn column_stats(accs: &[f64], thresholds: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = accs.len() as f64;
    let mean = accs.iter().sum::<f64>() / n;
    let var = accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let p = thresholds
        .iter()
        .map(|&tau| accs.iter().filter(|&&a| a >= tau).count() as f64 / n)
        .collect();
    (mean, var.sqrt(), p)
}

/// Per-iteration statistics over the rows of an accuracy matrix.
pub fn curve(matrix: &[Vec<f64>], thresholds: &[f64], time: impl Fn(usize) -> f64) -> Vec<IterationStats> {
    let iterations = matrix.first().map_or(0, Vec::len);
    (0..iterations)
        .map(|k| {
            let column: Vec<f64> = matrix.iter().map(|row| row[k]).collect();
            let (mean_acc, std_acc, p_ge) = column_stats(&column, thresholds);
            IterationStats {
                iteration: k + 1,
                mean_acc,
                std_acc,
                p_ge,
                hardware_equivalent_time_s: time(k + 1),
            }
        })
        .collect()
}

pub fn histogram(accs: &[f64], iteration: usize) -> Histogram {
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    for &a in accs {
        let bin = ((a * HISTOGRAM_BINS as f64).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1);
        counts[bin] += 1;
    }
    let (mean, std, _) = column_stats(accs, &[]);
    Histogram {
        iteration,
        bin_width: 1.0 / HISTOGRAM_BINS as f64,
        lower_edges: (0..HISTOGRAM_BINS).map(|b| b as f64 / HISTOGRAM_BINS as f64).collect(),
        counts,
        mean,
        std,
    }
}

pub fn gw_reference(gw: &GwResult, roundings: usize, denominator: u64, curve: &[IterationStats]) -> GwReference {
    let expected_accuracy = gw.expected_cut / denominator as f64;
    let crossover = curve.iter().find(|s| s.mean_acc >= expected_accuracy);
    GwReference {
        expected_cut: gw.expected_cut,
        expected_accuracy,
        best_cut: gw.best_cut,
        best_accuracy: gw.best_cut as f64 / denominator as f64,
        roundings,
        relaxation: gw.relaxation,
        crossover_iteration: crossover.map(|s| s.iteration),
        crossover_hardware_time_s: crossover.map(|s| s.hardware_equivalent_time_s),
    }
}

/// Per-instance report for one set of trials.
#[allow(clippy::too_many_arguments)]
pub fn instance_report(
    instance_id: &str,
    n: usize,
    edges: usize,
    denominator: &Denominator,
    trials: &[TrialResult],
    iterations: usize,
    thresholds: &[f64],
    time: impl Fn(usize) -> f64,
) -> (InstanceReport, Vec<Vec<f64>>) {
    let matrix = accuracy_matrix(trials, denominator.cut, iterations);
    let report = InstanceReport {
        instance_id: instance_id.to_string(),
        n,
        edges,
        best_known_cut: denominator.cut,
        denominator_provenance: denominator.label(),
        trials: trials.len(),
        best_cut: trials.iter().map(|t| t.best_cut).max().unwrap_or(0),
        curve: curve(&matrix, thresholds, time),
        gw: None,
    };
    (report, matrix)
}

/// Success probabilities at `a` and `b` iterations for every threshold.
pub fn success_comparison(aggregate: &[IterationStats], thresholds: &[f64], a: usize, b: usize) -> Vec<SuccessComparison> {
    let at = |k: usize| aggregate.iter().find(|s| s.iteration == k);
    match (at(a), at(b)) {
        (Some(sa), Some(sb)) => thresholds
            .iter()
            .enumerate()
            .map(|(i, &threshold)| SuccessComparison {
                threshold,
                iteration_a: a,
                p_a: sa.p_ge[i],
                iteration_b: b,
                p_b: sb.p_ge[i],
            })
            .collect(),
        _ => Vec::new(),
    }
}

pub fn threshold_column(tau: f64) -> String {
    format!("p_ge_{tau}")
}

/// CSV with one row per (instance, iteration) followed by the aggregate
/// rows under instance id `all`.
pub fn report_csv(report: &BenchReport) -> String {
    let mut out = String::from("instance_id,iteration,mean_acc,std_acc");
    for &tau in &report.thresholds {
        out.push(',');
        out.push_str(&threshold_column(tau));
    }
    out.push('\n');
    let rows = report
        .instances
        .iter()
        .map(|i| (i.instance_id.as_str(), &i.curve))
        .chain(std::iter::once(("all", &report.aggregate)));
    for (id, curve) in rows {
        for s in curve {
            write!(out, "{id},{},{},{}", s.iteration, s.mean_acc, s.std_acc).unwrap();
            for p in &s.p_ge {
                write!(out, ",{p}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}
