//! MAXCUT instances as binary Ising problems.
//!
//! The cut of a spin assignment `x` on the binary coupling matrix `J` is
//!
//! ```text
//! C(x) = sum_{m<n} J_mn (1 - x_m x_n) / 2
//! ```
//!
//! and the Ising energy is `H(x) = sum_{m<n} J_mn x_m x_n`, so that
//! `C(x) = (|E| - H(x)) / 2`. Maximizing the cut minimizes `H`. All values in
//! this module are exact integers.

mod io;
mod oracle;

use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub use io::{import_edge_list, load_instance, parse_instance, save_instance, write_instance};
pub use oracle::{brute_force_ground_state, GroundState, BRUTE_FORCE_CAP};

/// Symmetric 0/1 edge matrix with zero diagonal, stored densely.
#[derive(Clone, PartialEq, Eq)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<u8>,
    neighbors: Vec<Vec<u32>>,
    edges: usize,
}

impl CouplingMatrix {
    /// Build from an edge list over nodes `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", format!("need at least 2 nodes, got {n}")));
        }
        let mut entries = vec![0u8; n * n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Validation(format!(
                    "edge ({a},{b}) out of range for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("nonzero diagonal at ({a},{a})")));
            }
            if entries[a * n + b] != 0 {
                return Err(Error::Validation(format!("duplicate edge ({a},{b})")));
            }
            entries[a * n + b] = 1;
            entries[b * n + a] = 1;
        }
        Ok(Self::from_valid_entries(n, entries))
    }

    /// Build from dense rows, checking every matrix invariant.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::invalid("n", format!("need at least 2 nodes, got {n}")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (m, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!(
                    "row {m} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::Validation(format!(
                        "entry ({m},{c}) = {v} is not binary"
                    )));
                }
            }
            entries.extend_from_slice(row);
        }
        for m in 0..n {
            if entries[m * n + m] != 0 {
                return Err(Error::Validation(format!("nonzero diagonal at ({m},{m})")));
            }
            for c in (m + 1)..n {
                if entries[m * n + c] != entries[c * n + m] {
                    return Err(Error::Validation(format!("asymmetric at ({m},{c})")));
                }
            }
        }
        Ok(Self::from_valid_entries(n, entries))
    }

    fn from_valid_entries(n: usize, entries: Vec<u8>) -> Self {
        let neighbors: Vec<Vec<u32>> = (0..n)
            .map(|m| {
                (0..n)
                    .filter(|&c| entries[m * n + c] != 0)
                    .map(|c| c as u32)
                    .collect()
            })
            .collect();
        let edges = neighbors.iter().map(Vec::len).sum::<usize>() / 2;
        Self {
            n,
            entries,
            neighbors,
            edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn get(&self, m: usize, c: usize) -> u8 {
        self.entries[m * self.n + c]
    }

    pub fn row(&self, m: usize) -> &[u8] {
        &self.entries[m * self.n..(m + 1) * self.n]
    }

    /// Indices of nodes adjacent to `m`, ascending.
    #[inline]
    pub fn neighbors(&self, m: usize) -> &[u32] {
        &self.neighbors[m]
    }

    /// Edges `(m, c)` with `m < c`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |m| {
            self.neighbors[m]
                .iter()
                .map(|&c| c as usize)
                .filter(move |&c| c > m)
                .map(move |c| (m, c))
        })
    }

    /// Local field `sum_m J_im x_m` at node `i`.
    #[inline]
    pub fn local_field(&self, i: usize, x: &[i8]) -> i32 {
        self.neighbors[i].iter().map(|&m| x[m as usize] as i32).sum()
    }

    fn check_dims(&self, x: &SpinVector) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for CouplingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CouplingMatrix")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

/// Node states over {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::Validation(format!(
                "spin {pos} is {}, expected -1 or +1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    pub fn uniform(n: usize, spin: i8) -> Self {
        assert!(spin == 1 || spin == -1);
        Self(vec![spin; n])
    }

    /// Uniformly random assignment.
    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    /// Assignment from the low `n` bits of `bits`: bit set means -1.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self((0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }

    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        Self(spins)
    }
}

impl TryFrom<Vec<i8>> for SpinVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(s: SpinVector) -> Self {
        s.0
    }
}

impl std::ops::Index<usize> for SpinVector {
    type Output = i8;

    fn index(&self, i: usize) -> &i8 {
        &self.0[i]
    }
}

/// Where an instance's best-known cut came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Provenance {
    /// Exhaustive ground state.
    Exact,
    /// Best of a multi-start local search with the given restart budget.
    LocalSearch { restarts: usize },
    /// Best rounded Goemans-Williamson cut.
    Gw,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Exact => f.write_str("exact"),
            Provenance::LocalSearch { restarts } => write!(f, "local-search(restarts={restarts})"),
            Provenance::Gw => f.write_str("gw"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Provenance::Exact),
            "gw" => Ok(Provenance::Gw),
            _ => s
                .strip_prefix("local-search(restarts=")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.parse().ok())
                .map(|restarts| Provenance::LocalSearch { restarts })
                .ok_or_else(|| Error::Validation(format!("unknown provenance `{s}`"))),
        }
    }
}

impl From<Provenance> for String {
    fn from(p: Provenance) -> Self {
        p.to_string()
    }
}

impl TryFrom<String> for Provenance {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Best-known cut value with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestKnown {
    pub cut: u64,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub coupling: CouplingMatrix,
    pub seed: u64,
    pub density: f64,
    pub best_known: Option<BestKnown>,
}

impl ProblemInstance {
    pub fn new(coupling: CouplingMatrix, seed: u64, density: f64) -> Self {
        Self {
            coupling,
            seed,
            density,
            best_known: None,
        }
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    pub fn best_known_cut(&self) -> Option<u64> {
        self.best_known.as_ref().map(|b| b.cut)
    }

    /// Record a best-known cut. Never lowers an existing value.
    ///
    /// Returns whether the stored record changed.
    pub fn offer_best_known(&mut self, cut: u64, provenance: Provenance) -> Result<bool> {
        if cut > self.coupling.edge_count() as u64 {
            return Err(Error::Validation(format!(
                "best-known cut {cut} exceeds edge count {}",
                self.coupling.edge_count()
            )));
        }
        let replace = match &self.best_known {
            None => true,
            Some(b) => cut > b.cut || (cut == b.cut && provenance == Provenance::Exact),
        };
        if replace {
            let next = BestKnown {
                cut,
                provenance: Some(provenance),
            };
            let changed = self.best_known.as_ref() != Some(&next);
            self.best_known = Some(next);
            return Ok(changed);
        }
        Ok(false)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::Validation(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        if let Some(b) = &self.best_known {
            if b.cut > self.coupling.edge_count() as u64 {
                return Err(Error::Validation(format!(
                    "best_known {} exceeds edge count {}",
                    b.cut,
                    self.coupling.edge_count()
                )));
            }
        }
        Ok(())
    }
}

/// Number of edges whose endpoints carry different spins.
pub fn cut_size(j: &CouplingMatrix, x: &SpinVector) -> Result<u64> {
    j.check_dims(x)?;
    Ok(cut_unchecked(j, x.as_slice()))
}

pub(crate) fn cut_unchecked(j: &CouplingMatrix, x: &[i8]) -> u64 {
    j.edges().filter(|&(m, c)| x[m] != x[c]).count() as u64
}

/// Ising energy `sum_{m<n} J_mn x_m x_n`.
pub fn ising_energy(j: &CouplingMatrix, x: &SpinVector) -> Result<i64> {
    j.check_dims(x)?;
    let xs = x.as_slice();
    Ok(j
        .edges()
        .map(|(m, c)| (xs[m] as i64) * (xs[c] as i64))
        .sum())
}

/// Erdős–Rényi binary graph: each pair is an edge with probability `density`.
pub fn random_graph(n: usize, density: f64, seed: u64) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 nodes, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::invalid(
            "density",
            format!("{density} outside (0, 1]"),
        ));
    }
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for m in 0..n {
        for c in (m + 1)..n {
            if density >= 1.0 || rng.random_bool(density) {
                edges.push((m, c));
            }
        }
    }
    Ok(ProblemInstance::new(
        CouplingMatrix::from_edges(n, &edges)?,
        seed,
        density,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> CouplingMatrix {
        CouplingMatrix::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn spins(v: &[i8]) -> SpinVector {
        SpinVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn triangle_cut_and_energy() {
        let j = k3();
        assert_eq!(cut_size(&j, &spins(&[1, 1, 1])).unwrap(), 0);
        assert_eq!(cut_size(&j, &spins(&[1, 1, -1])).unwrap(), 2);
        assert_eq!(ising_energy(&j, &spins(&[1, 1, 1])).unwrap(), 3);
        assert_eq!(ising_energy(&j, &spins(&[1, 1, -1])).unwrap(), -1);
    }

    #[test]
    fn dimension_mismatch_reports_both_lengths() {
        let err = cut_size(&k3(), &spins(&[1, 1])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('3') && msg.contains('2'), "{msg}");
    }

    #[test]
    fn asymmetric_rows_rejected() {
        let rows = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 0]];
        let err = CouplingMatrix::from_rows(&rows).unwrap_err();
        assert!(err.to_string().contains("asymmetric at (1,2)"), "{err}");
    }

    #[test]
    fn diagonal_rejected() {
        let rows = vec![vec![1, 0], vec![0, 0]];
        let err = CouplingMatrix::from_rows(&rows).unwrap_err();
        assert!(err.to_string().contains("diagonal"), "{err}");
    }

    #[test]
    fn spin_vector_rejects_zero() {
        assert!(SpinVector::new(vec![1, 0, -1]).is_err());
    }

    #[test]
    fn complete_graph_at_full_density() {
        let p = random_graph(7, 1.0, 99).unwrap();
        assert_eq!(p.coupling.edge_count(), 21);
    }

    #[test]
    fn random_graph_is_deterministic() {
        let a = random_graph(30, 0.5, 5).unwrap();
        let b = random_graph(30, 0.5, 5).unwrap();
        assert_eq!(a, b);
        let c = random_graph(30, 0.5, 6).unwrap();
        assert_ne!(a.coupling, c.coupling);
    }

    #[test]
    fn random_graph_rejects_bad_args() {
        assert!(random_graph(1, 0.5, 0).is_err());
        assert!(random_graph(5, 0.0, 0).is_err());
        assert!(random_graph(5, 1.5, 0).is_err());
    }

    #[test]
    fn best_known_never_lowered() {
        let mut p = random_graph(10, 0.5, 1).unwrap();
        assert!(p.offer_best_known(5, Provenance::Gw).unwrap());
        assert!(!p.offer_best_known(4, Provenance::Exact).unwrap());
        assert_eq!(p.best_known_cut(), Some(5));
        assert!(p.offer_best_known(5, Provenance::Exact).unwrap());
        assert_eq!(p.best_known.unwrap().provenance, Some(Provenance::Exact));
    }

    #[test]
    fn provenance_round_trips() {
        for p in [
            Provenance::Exact,
            Provenance::Gw,
            Provenance::LocalSearch { restarts: 1000 },
        ] {
            assert_eq!(p.to_string().parse::<Provenance>().unwrap(), p);
        }
        assert_eq!(
            Provenance::LocalSearch { restarts: 1000 }.to_string(),
            "local-search(restarts=1000)"
        );
    }
}
