//! Goemans-Williamson style MAXCUT baseline.
//!
//! The SDP relaxation `max sum_{m<n} J_mn (1 - v_m . v_n) / 2` over unit
//! vectors is solved in a rank-`r` Burer-Monteiro factorization by projected
//! gradient ascent: each step moves every row along its gradient
//! `-1/2 sum_j J_ij v_j` and renormalizes it. A step that would lower the
//! objective is retried with half the step size, so the objective is
//! non-decreasing. The relaxed solution is rounded with random hyperplanes.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{cut_unchecked, CouplingMatrix, ProblemInstance, SpinVector};
use crate::seed;

const ROUNDING_STREAM: u64 = 0x524F_554E;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GwParams {
    /// Embedding dimension; `None` means `ceil(sqrt(2n))`.
    pub rank: Option<usize>,
    pub max_iters: usize,
    pub step_size: f64,
    /// Relative objective change below which the ascent is converged.
    pub tolerance: f64,
    pub roundings: usize,
    pub seed: u64,
}

impl Default for GwParams {
    fn default() -> Self {
        Self {
            rank: None,
            max_iters: 2000,
            step_size: 0.5,
            tolerance: 1e-10,
            roundings: 100,
            seed: 0,
        }
    }
}

impl GwParams {
    pub fn rank_for(&self, n: usize) -> usize {
        self.rank
            .unwrap_or_else(|| ((2 * n) as f64).sqrt().ceil() as usize)
            .max(2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank.is_some_and(|r| r < 2) {
            return Err(Error::invalid("rank", "must be >= 2"));
        }
        if self.roundings == 0 {
            return Err(Error::invalid("roundings", "must be >= 1"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::invalid("step_size", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GwResult {
    /// Best cut over all hyperplane roundings.
    pub best_cut: u64,
    pub best_spins: SpinVector,
    /// Mean cut over all hyperplane roundings.
    pub expected_cut: f64,
    /// Relaxation objective at the returned embedding (an upper-bound estimate).
    pub relaxation: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Low-rank factorized SDP state: one unit row per node.
pub struct BmRelaxation<'a> {
    j: &'a CouplingMatrix,
    rank: usize,
    rows: Vec<f64>,
    objective: f64,
    step: f64,
}

impl<'a> BmRelaxation<'a> {
    pub fn new(j: &'a CouplingMatrix, rank: usize, step: f64, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let mut rows: Vec<f64> = (0..j.n() * rank)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        for row in rows.chunks_mut(rank) {
            normalize(row);
        }
        let objective = relaxation_value(j, &rows, rank);
        Self {
            j,
            rank,
            rows,
            objective,
            step,
        }
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.rank..(i + 1) * self.rank]
    }

    /// One accepted ascent step; returns the objective gain (0 if no step
    /// size in the backtracking range improved it).
    pub fn step(&mut self) -> f64 {
        let (n, r) = (self.j.n(), self.rank);
        let mut neighbor_sum = vec![0.0; n * r];
        for i in 0..n {
            let acc = &mut neighbor_sum[i * r..(i + 1) * r];
            for &m in self.j.neighbors(i) {
                let m = m as usize;
                for (a, v) in acc.iter_mut().zip(&self.rows[m * r..(m + 1) * r]) {
                    *a += v;
                }
            }
        }
        let mut eta = self.step;
        for _ in 0..40 {
            let mut cand = self.rows.clone();
            for (row, sum) in cand.chunks_mut(r).zip(neighbor_sum.chunks(r)) {
                let old = row.to_vec();
                for (v, s) in row.iter_mut().zip(sum) {
                    *v -= 0.5 * eta * s;
                }
                if !normalize(row) {
                    row.copy_from_slice(&old);
                }
            }
            let value = relaxation_value(self.j, &cand, r);
            if value >= self.objective {
                let gain = value - self.objective;
                self.rows = cand;
                self.objective = value;
                self.step = (eta * 1.25).min(1e3);
                return gain;
            }
            eta *= 0.5;
        }
        0.0
    }

    /// Hyperplane rounding with normal vector `plane`.
    pub fn round(&self, plane: &[f64]) -> SpinVector {
        SpinVector::from_raw(
            (0..self.j.n())
                .map(|i| {
                    let dot: f64 = self.row(i).iter().zip(plane).map(|(a, b)| a * b).sum();
                    if dot >= 0.0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        )
    }
}

fn normalize(row: &mut [f64]) -> bool {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    row.iter_mut().for_each(|v| *v /= norm);
    true
}

fn relaxation_value(j: &CouplingMatrix, rows: &[f64], r: usize) -> f64 {
    j.edges()
        .map(|(m, c)| {
            let dot: f64 = rows[m * r..(m + 1) * r]
                .iter()
                .zip(&rows[c * r..(c + 1) * r])
                .map(|(a, b)| a * b)
                .sum();
            (1.0 - dot) / 2.0
        })
        .sum()
}

pub fn gw_solve(instance: &ProblemInstance, params: &GwParams) -> Result<GwResult> {
    params.validate()?;
    let j = &instance.coupling;
    let rank = params.rank_for(j.n());
    let mut bm = BmRelaxation::new(j, rank, params.step_size, params.seed);

    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iters {
        iterations += 1;
        let gain = bm.step();
        if gain <= params.tolerance * bm.objective().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("GW ascent stopped at max_iters = {} before converging", params.max_iters);
    }

    let round_seed = seed::split(params.seed, ROUNDING_STREAM);
    let cuts: Vec<(u64, SpinVector)> = (0..params.roundings as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::split(round_seed, t));
            let plane: Vec<f64> = (0..rank).map(|_| StandardNormal.sample(&mut rng)).collect();
            let x = bm.round(&plane);
            (cut_unchecked(j, x.as_slice()), x)
        })
        .collect();

    let expected_cut = cuts.iter().map(|(c, _)| *c as f64).sum::<f64>() / cuts.len() as f64;
    let (best_cut, best_spins) = cuts
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("roundings >= 1");

    Ok(GwResult {
        best_cut,
        best_spins,
        expected_cut,
        relaxation: bm.objective(),
        converged,
        iterations,
    })
}
