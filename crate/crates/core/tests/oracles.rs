//! Library results checked against independent straight-line reference
//! implementations and known distributions.

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

use sbcim::baselines::{local_search_best, LocalSearchParams};
use sbcim::hw::{NoiseDacConfig, Prbs};
use sbcim::ising::{
    brute_force_ground_state, cut_size, ising_energy, random_graph, CouplingMatrix, SpinVector,
};
use sbcim::sb::{
    sb_step, DecayLaw, NoiseDraw, NoiseKind, NoiseSchedule, NoiseSource, RngNoise, SbParams,
};
use sbcim::seed;

/// Replays a fixed list of draws and records nothing else.
struct Scripted(Vec<NoiseDraw>, usize);

impl NoiseSource for Scripted {
    fn draw(&mut self, levels: u32) -> NoiseDraw {
        let d = self.0[self.1];
        assert!(d.level < levels);
        self.1 += 1;
        d
    }
}

fn dense(j: &CouplingMatrix) -> Vec<Vec<i64>> {
    (0..j.n()).map(|m| (0..j.n()).map(|c| j.get(m, c) as i64).collect()).collect()
}

/// The update rule written out with explicit loops over a dense matrix.
#[allow(clippy::too_many_arguments)]
fn reference_step(
    jd: &[Vec<i64>],
    x: &[i8],
    alpha: f64,
    beta: f64,
    a0: f64,
    rate: f64,
    levels: u32,
    k: usize,
    draws: &[NoiseDraw],
) -> Vec<i8> {
    let n = x.len();
    let amplitude = a0 / (1.0 + rate * k as f64);
    let step = amplitude / (levels - 1) as f64;
    let mut out = vec![0i8; n];
    for i in 0..n {
        let mut field = 0i64;
        for m in 0..n {
            field += jd[i][m] * x[m] as i64;
        }
        let zeta = draws[i].sign as f64 * (draws[i].level as f64 * step);
        let y = alpha * x[i] as f64 - beta * field as f64 + zeta;
        out[i] = if y > 0.0 {
            1
        } else if y < 0.0 {
            -1
        } else {
            x[i]
        };
    }
    out
}

#[test]
fn sb_step_matches_reference_rule() {
    let mut rng = seed::rng(11);
    let mut steps = 0;
    for inst in 0..100u64 {
        let n = 5 + (inst as usize % 40);
        let p = random_graph(n, 0.2 + 0.6 * ((inst % 7) as f64 / 6.0), inst).unwrap();
        let jd = dense(&p.coupling);
        let params = SbParams {
            alpha: 1.0,
            beta: [0.0, 0.05, 0.1, 0.25, 0.5][inst as usize % 5],
            iterations: 30,
            seed: 0,
        };
        let (a0, rate) = (4.0, 0.2);
        let schedule = NoiseSchedule {
            kind: NoiseKind::UniformDecaying,
            amplitude0: a0,
            decay: DecayLaw::Hyperbolic { rate },
            levels: 16,
        };
        let mut x = SpinVector::random(n, &mut rng);
        let mut draw_rng = RngNoise::new(inst);
        for k in 0..params.iterations {
            let draws: Vec<NoiseDraw> = (0..n).map(|_| draw_rng.draw(16)).collect();
            let expected = reference_step(&jd, x.as_slice(), params.alpha, params.beta, a0, rate, 16, k, &draws);
            let got = sb_step(&p.coupling, &x, &params, &schedule, k, &mut Scripted(draws, 0)).unwrap();
            assert_eq!(got.as_slice(), &expected[..], "instance {inst} step {k}");
            x = got;
            steps += 1;
        }
    }
    assert_eq!(steps, 3000);
}

fn enumerate_max_cut(j: &CouplingMatrix) -> u64 {
    let edges: Vec<(usize, usize)> = j.edges().collect();
    let n = j.n();
    (0u64..1 << n)
        .map(|bits| {
            edges
                .iter()
                .filter(|&&(a, b)| ((bits >> a) ^ (bits >> b)) & 1 == 1)
                .count() as u64
        })
        .max()
        .unwrap()
}

#[test]
fn ground_state_matches_plain_enumeration() {
    for s in 0..60u64 {
        let n = 2 + (s as usize % 13);
        let p = random_graph(n, [0.2, 0.5, 0.9][s as usize % 3], s).unwrap();
        let gs = brute_force_ground_state(&p.coupling).unwrap();
        assert_eq!(gs.cut, enumerate_max_cut(&p.coupling), "seed {s}");
        assert_eq!(cut_size(&p.coupling, &gs.spins).unwrap(), gs.cut);
    }
}

#[test]
fn local_search_reaches_small_optima() {
    let mut hits = 0;
    for s in 0..40u64 {
        let p = random_graph(12, 0.5, 100 + s).unwrap();
        let ls = local_search_best(&p, &LocalSearchParams { restarts: 50, max_flips: None, seed: s }).unwrap();
        let opt = enumerate_max_cut(&p.coupling);
        assert!(ls.cut <= opt);
        hits += (ls.cut == opt) as usize;
    }
    assert!(hits >= 38, "{hits}/40");
}

#[test]
fn cut_energy_identity() {
    let mut rng = seed::rng(3);
    for s in 0..50u64 {
        let p = random_graph(30, 0.4, s).unwrap();
        let e = p.coupling.edge_count() as i64;
        for _ in 0..10 {
            let x = SpinVector::random(30, &mut rng);
            let c = cut_size(&p.coupling, &x).unwrap() as i64;
            let h = ising_energy(&p.coupling, &x).unwrap();
            assert_eq!(2 * c, e - h);
        }
    }
}

#[test]
fn edge_counts_are_binomial() {
    let (n, density) = (60usize, 0.5);
    let pairs = (n * (n - 1) / 2) as u64;
    let mean = pairs as f64 * density;
    let sd = (pairs as f64 * density * (1.0 - density)).sqrt();
    let counts: Vec<f64> = (0..200u64)
        .map(|s| random_graph(n, density, seed::split(77, s)).unwrap().coupling.edge_count() as f64)
        .collect();
    for &c in &counts {
        assert!((c - mean).abs() <= 4.0 * sd, "{c} vs {mean} +/- {sd}");
    }
    let sample_mean = counts.iter().sum::<f64>() / counts.len() as f64;
    assert!((sample_mean - mean).abs() <= 4.0 * sd / (counts.len() as f64).sqrt());

    // Small graphs: chi-square of the edge-count histogram against Binomial(6, 0.3).
    let b = Binomial::new(0.3, 6).unwrap();
    let mut hist = [0u64; 7];
    let trials = 20_000u64;
    for s in 0..trials {
        hist[random_graph(4, 0.3, s).unwrap().coupling.edge_count()] += 1;
    }
    let stat: f64 = hist
        .iter()
        .enumerate()
        .map(|(k, &o)| {
            let e = b.pmf(k as u64) * trials as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let p = 1.0 - ChiSquared::new(6.0).unwrap().cdf(stat);
    assert!(p > 1e-3, "chi2 {stat}, p {p}");
}

fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn noise_levels_and_signs_are_uniform() {
    let sources: Vec<(&str, Box<dyn NoiseSource>)> = vec![
        ("rng", Box::new(RngNoise::new(5))),
        ("prbs17", Box::new(Prbs::from_seed(17, 5).unwrap())),
        ("prbs23", Box::new(Prbs::from_seed(23, 5).unwrap())),
    ];
    for (name, mut src) in sources {
        let mut levels = [0u64; 16];
        let mut signs = [0u64; 2];
        for _ in 0..100_000 {
            let d = src.draw(16);
            levels[d.level as usize] += 1;
            signs[(d.sign > 0) as usize] += 1;
        }
        let p = chi_square_uniform(&levels);
        assert!(p > 1e-3, "{name}: level p = {p}");
        let p = chi_square_uniform(&signs);
        assert!(p > 1e-3, "{name}: sign p = {p}");
    }
}

/// A register whose period shares a factor with the bits per draw only
/// reaches a fraction of its states at draw boundaries.
#[test]
fn prbs16_five_bit_draws_are_biased() {
    let mut src = Prbs::from_seed(16, 5).unwrap();
    let mut levels = [0u64; 16];
    for _ in 0..100_000 {
        levels[src.draw(16).level as usize] += 1;
    }
    assert!(chi_square_uniform(&levels) < 1e-3);
}

#[test]
fn noise_values_span_symmetric_grid() {
    let schedule = NoiseSchedule::constant(1.5);
    let mut src = RngNoise::new(8);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..20_000 {
        let z = sbcim::sb::noise_sample(&schedule, 0, &mut src);
        assert!(z.abs() <= 1.5);
        seen.insert((z * 10.0).round() as i64);
    }
    // 16 magnitudes times two signs, with +0 and -0 merged.
    assert_eq!(seen.len(), 31);
    assert_eq!(seen.first(), Some(&-15));
    assert_eq!(seen.last(), Some(&15));
}

#[test]
fn dac_default_levels_match_schedule() {
    assert_eq!(NoiseDacConfig::default().levels(), NoiseSchedule::tuned().levels);
}
