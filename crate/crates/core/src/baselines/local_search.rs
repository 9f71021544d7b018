//! Multi-start steepest-ascent single-flip local search.
//!
//! Each restart begins from a uniformly random assignment and repeatedly flips
//! the node with the largest cut gain until no flip improves the cut or the
//! flip budget runs out. The gain of flipping `i` is `x_i * h_i` with
//! `h_i = sum_m J_im x_m`, and a flip updates the neighbors' fields in
//! O(degree).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{cut_size, CouplingMatrix, ProblemInstance, SpinVector};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSearchParams {
    pub restarts: usize,
    /// Flip budget per restart; `None` means `10 * n`.
    #[serde(default)]
    pub max_flips: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl LocalSearchParams {
    /// Budget used when local search supplies the accuracy denominator.
    pub fn oracle_default() -> Self {
        Self {
            restarts: 1000,
            max_flips: None,
            seed: 0,
        }
    }

    fn flips_for(&self, n: usize) -> usize {
        self.max_flips.unwrap_or(10 * n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSearchResult {
    pub cut: u64,
    pub spins: SpinVector,
    /// Restart index that produced the best cut.
    pub restart: usize,
}

pub fn local_search_best(
    instance: &ProblemInstance,
    params: &LocalSearchParams,
) -> Result<LocalSearchResult> {
    if params.restarts == 0 {
        return Err(Error::invalid("restarts", "must be >= 1"));
    }
    let j = &instance.coupling;
    let flips = params.flips_for(j.n());
    let (cut, restart, spins) = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng(seed::split(params.seed, r as u64));
            let mut climb = Climber::new(j, SpinVector::random(j.n(), &mut rng));
            climb.run(flips, false);
            (climb.cut, r, climb.spins())
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("at least one restart");
    debug_assert_eq!(cut_size(j, &spins).unwrap(), cut);
    Ok(LocalSearchResult {
        cut,
        spins,
        restart,
    })
}

/// Whether no single flip increases the cut.
pub fn is_one_flip_optimal(j: &CouplingMatrix, x: &SpinVector) -> bool {
    let xs = x.as_slice();
    (0..j.n()).all(|i| xs[i] as i32 * j.local_field(i, xs) <= 0)
}

pub(crate) struct Climber<'a> {
    j: &'a CouplingMatrix,
    x: Vec<i8>,
    field: Vec<i32>,
    pub cut: u64,
    pub flips: usize,
}

impl<'a> Climber<'a> {
    pub fn new(j: &'a CouplingMatrix, start: SpinVector) -> Self {
        let x: Vec<i8> = start.into();
        let field = (0..j.n()).map(|i| j.local_field(i, &x)).collect();
        let cut = crate::ising::cut_unchecked(j, &x);
        Self {
            j,
            x,
            field,
            cut,
            flips: 0,
        }
    }

    fn best_move(&self) -> Option<(usize, i32)> {
        let mut best: Option<(usize, i32)> = None;
        for i in 0..self.x.len() {
            let gain = self.x[i] as i32 * self.field[i];
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        best
    }

    fn flip(&mut self, i: usize, gain: i32) {
        let old = self.x[i];
        self.x[i] = -old;
        self.cut = (self.cut as i64 + gain as i64) as u64;
        let delta = -2 * old as i32;
        for &m in self.j.neighbors(i) {
            self.field[m as usize] += delta;
        }
        self.flips += 1;
    }

    /// Climb until 1-flip optimal or out of budget. With `verify`, every 64th
    /// flip checks the incremental cut against a full recount.
    pub fn run(&mut self, budget: usize, verify: bool) {
        while self.flips < budget {
            let Some((i, gain)) = self.best_move() else {
                break;
            };
            self.flip(i, gain);
            if verify && self.flips.is_multiple_of(64) {
                assert_eq!(self.cut, crate::ising::cut_unchecked(self.j, &self.x));
            }
        }
    }

    pub fn spins(&self) -> SpinVector {
        SpinVector::from_raw(self.x.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::random_graph;

    #[test]
    fn result_is_one_flip_optimal() {
        for s in 0..10 {
            let p = random_graph(40, 0.5, s).unwrap();
            let r = local_search_best(
                &p,
                &LocalSearchParams {
                    restarts: 5,
                    max_flips: None,
                    seed: s,
                },
            )
            .unwrap();
            assert!(is_one_flip_optimal(&p.coupling, &r.spins));
            assert_eq!(cut_size(&p.coupling, &r.spins).unwrap(), r.cut);
        }
    }

    #[test]
    fn incremental_cut_matches_recount() {
        let p = random_graph(200, 0.5, 3).unwrap();
        let start = SpinVector::uniform(200, 1);
        let initial = cut_size(&p.coupling, &start).unwrap();
        let mut c = Climber::new(&p.coupling, start);
        c.run(usize::MAX, true);
        assert!(c.flips >= 64, "only {} flips", c.flips);
        assert!(c.cut >= initial);
        assert_eq!(c.cut, cut_size(&p.coupling, &c.spins()).unwrap());
    }

    #[test]
    fn deterministic_per_seed() {
        let p = random_graph(30, 0.5, 8).unwrap();
        let params = LocalSearchParams {
            restarts: 20,
            max_flips: None,
            seed: 4,
        };
        assert_eq!(
            local_search_best(&p, &params).unwrap(),
            local_search_best(&p, &params).unwrap()
        );
    }

    #[test]
    fn zero_restarts_rejected() {
        let p = random_graph(5, 0.5, 0).unwrap();
        let params = LocalSearchParams {
            restarts: 0,
            max_flips: None,
            seed: 0,
        };
        assert!(local_search_best(&p, &params).is_err());
    }
}
