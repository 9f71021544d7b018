use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_sbcim");

fn docs(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs").join(name)
}

fn sbcim(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().unwrap()
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = sbcim(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], cwd: &Path) -> i32 {
    sbcim(args, cwd).status.code().unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).unwrap()
}

fn dataset(dir: &Path, n: &str, count: &str) {
    ok(&["gen", "--n", n, "--density", "0.5", "--count", count, "--seed", "5", "--out", "data"], dir);
}

#[test]
fn gen_complete_graph_file() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--n", "4", "--density", "1", "--count", "1", "--out", "k4"], d.path());
    let text = read(d.path().join("k4/g00.txt"));
    assert!(text.starts_with("ising-maxcut v1\nn=4 density=1 seed="));
    assert!(text.ends_with("1 2 3\n2 3\n3\n\n"), "{text}");
}

#[test]
fn gen_is_reproducible_and_binomial() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--seed", "3", "--out", "a"], d.path());
    ok(&["gen", "--seed", "3", "--out", "b"], d.path());
    let manifest: Value = serde_json::from_str(&read(d.path().join("a/manifest.json"))).unwrap();
    let entries = manifest["instances"].as_array().unwrap();
    assert_eq!(entries.len(), 10);
    let sd = (1770.0f64 * 0.25).sqrt();
    for e in entries {
        let file = e["file"].as_str().unwrap();
        assert_eq!(read(d.path().join("a").join(file)), read(d.path().join("b").join(file)));
        let edges = e["edges"].as_f64().unwrap();
        assert!((edges - 885.0).abs() <= 4.0 * sd, "{edges}");
    }
    assert_eq!(read(d.path().join("a/manifest.json")), read(d.path().join("b/manifest.json")));
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("bad.toml"), "[hw]\nc_bl_farads = -2e-13\n").unwrap();
    let out = sbcim(&["--config", "bad.toml", "gen"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c_bl_farads"));

    fs::write(d.path().join("typo.toml"), "[bench]\ntrails = 3\n").unwrap();
    let out = sbcim(&["--config", "typo.toml", "gen"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trails"));

    assert_eq!(code(&["solve", "missing.txt"], d.path()), 1);
    assert_eq!(code(&["--trials", "0", "solve", "x.txt"], d.path()), 2);
    assert_eq!(code(&["frobnicate"], d.path()), 2);

    dataset(d.path(), "30", "1");
    let out = sbcim(&["bench", "data/g00.txt"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle"));

    let env = Command::new(BIN)
        .args(["gen", "--out", "w"])
        .env("SBCIM_WORKERS", "zero")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
}

#[test]
fn solve_single_trial_single_iteration() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "12", "1");
    ok(&["--trials", "1", "--iterations", "1", "--out", "o", "solve", "data/g00.txt"], d.path());
    let trials = read(d.path().join("o/trials.jsonl"));
    assert_eq!(trials.lines().count(), 1);
    let rec: Value = serde_json::from_str(trials.lines().next().unwrap()).unwrap();
    assert_eq!(rec["trajectory"].as_array().unwrap().len(), 1);
    assert_eq!(rec["best_iteration"], 0);
    let keys: Vec<&str> = rec.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 5);
    for k in ["instance_id", "trial_seed", "trajectory", "best_cut", "best_iteration"] {
        assert!(keys.contains(&k));
    }
    let summary = read(d.path().join("o/summary.csv"));
    assert_eq!(summary.lines().count(), 2);
    // small instance without a stored cut is scored against its exact optimum
    assert!(summary.lines().nth(1).unwrap().contains(",exact,"));
}

#[test]
fn solve_engines_match_under_lockstep_config() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "40", "1");
    let cfg = docs("lockstep.toml");
    let cfg = cfg.to_str().unwrap();
    for engine in ["ideal", "hardware"] {
        ok(
            &["--config", cfg, "--engine", engine, "--trials", "30", "--out", engine, "solve", "data/g00.txt"],
            d.path(),
        );
    }
    assert_eq!(read(d.path().join("ideal/trials.jsonl")), read(d.path().join("hardware/trials.jsonl")));
}

#[test]
fn oracle_provenance_and_monotone_update() {
    let d = tempfile::tempdir().unwrap();
    ok(&["gen", "--n", "12", "--count", "1", "--out", "small"], d.path());
    let rec: Value = serde_json::from_str(&ok(&["oracle", "small/g00.txt"], d.path())).unwrap();
    assert_eq!(rec["provenance"], "exact");
    assert!(read(d.path().join("small/g00.txt")).contains("provenance=exact"));

    ok(&["gen", "--n", "60", "--count", "1", "--out", "big"], d.path());
    let rec: Value = serde_json::from_str(&ok(&["oracle", "big/g00.txt"], d.path())).unwrap();
    assert_eq!(rec["provenance"], "local-search(restarts=1000)");
    let stored = rec["stored_cut"].as_u64().unwrap();

    // A weaker budget cannot lower the stored value.
    let rec: Value =
        serde_json::from_str(&ok(&["oracle", "big/g00.txt", "--restarts", "1", "--seed", "9"], d.path())).unwrap();
    assert!(rec["stored_cut"].as_u64().unwrap() >= stored);
    assert_eq!(rec["updated"], rec["cut"].as_u64().unwrap() > stored);

    // Hand-raised record survives a re-run.
    let path = d.path().join("big/g00.txt");
    let text = read(&path).replace(&format!("best_known={stored}"), &format!("best_known={}", stored + 3));
    fs::write(&path, text).unwrap();
    let rec: Value = serde_json::from_str(&ok(&["oracle", "big/g00.txt"], d.path())).unwrap();
    assert_eq!(rec["stored_cut"].as_u64().unwrap(), stored + 3);
    assert_eq!(rec["updated"], false);

    assert_eq!(code(&["oracle", "--method", "exact", "big/g00.txt"], d.path()), 2);
}

#[test]
fn bench_accounting_and_zero_threshold() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "20", "3");
    ok(&["oracle", "data/g00.txt", "data/g01.txt", "data/g02.txt"], d.path());
    fs::write(d.path().join("b.toml"), "[bench]\ntrials = 7\niterations = 6\nthresholds = [0.0, 0.95]\ngw = false\n")
        .unwrap();
    ok(&["--config", "b.toml", "--out", "r", "bench", "data/g00.txt", "data/g01.txt", "data/g02.txt"], d.path());
    assert_eq!(read(d.path().join("r/trials.jsonl")).lines().count(), 21);
    let csv = read(d.path().join("r/report.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "instance_id,iteration,mean_acc,std_acc,p_ge_0,p_ge_0.95");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 6);
    let mut prev = std::collections::HashMap::new();
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[4], "1");
        let acc: f64 = f[2].parse().unwrap();
        assert!(acc <= 1.0, "exact denominators bound accuracy");
        let p95: f64 = f[5].parse().unwrap();
        let last = prev.insert(f[0].to_string(), (acc, p95));
        if let Some((a, p)) = last {
            assert!(acc >= a && p95 >= p, "curve not monotone: {row}");
        }
    }
    let report: Value = serde_json::from_str(&read(d.path().join("r/report.json"))).unwrap();
    assert_eq!(report["total_trials"], 21);
    assert_eq!(report["denominator_provenance"], "exact");
    assert_eq!(report["time_label"], "hardware-equivalent time");
    assert_eq!(report["histogram"]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum::<u64>(), 21);
}

#[test]
fn bench_rejects_mixed_denominators() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "16", "2");
    ok(&["oracle", "data/g00.txt"], d.path());
    ok(&["oracle", "--method", "local-search", "data/g01.txt"], d.path());
    let out = sbcim(&["bench", "data/g00.txt", "data/g01.txt"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("provenance"));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "30", "2");
    ok(&["oracle", "data/g00.txt", "data/g01.txt"], d.path());
    for (workers, out) in [("1", "one"), ("4", "four")] {
        let run = Command::new(BIN)
            .args(["--trials", "20", "--out", out, "bench", "data/g00.txt", "data/g01.txt"])
            .env("SBCIM_WORKERS", workers)
            .current_dir(d.path())
            .output()
            .unwrap();
        assert!(run.status.success());
    }
    for f in ["trials.jsonl", "report.csv", "report.json"] {
        assert_eq!(read(d.path().join("one").join(f)), read(d.path().join("four").join(f)), "{f}");
    }
}

#[test]
fn single_point_sweep_equals_solve() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "24", "1");
    ok(&["oracle", "data/g00.txt"], d.path());
    fs::write(
        d.path().join("s.toml"),
        "[bench]\ntrials = 15\n[sweep]\nalphas = [1.0]\nbetas = [0.1]\namplitudes = [4.0]\ndecay_rates = [0.2]\n",
    )
    .unwrap();
    ok(&["--config", "s.toml", "--out", "sw", "sweep", "data/g00.txt"], d.path());
    ok(&["--config", "s.toml", "--out", "so", "solve", "data/g00.txt"], d.path());
    let sweep: Value = serde_json::from_str(&read(d.path().join("sw/sweep.json"))).unwrap();
    let sweep_csv = read(d.path().join("sw/sweep.csv"));
    let all = sweep_csv.lines().find(|l| l.contains(",all,")).unwrap();
    let sweep_acc: f64 = all.rsplit(',').next().unwrap().parse().unwrap();
    let summary = read(d.path().join("so/summary.csv"));
    let header: Vec<&str> = summary.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    let idx = header.iter().position(|&h| h == "mean_acc").unwrap();
    let solve_acc: f64 = row[idx].parse().unwrap();
    assert_eq!(sweep_acc, solve_acc);
    assert_eq!(sweep["max_gap"].as_f64().unwrap(), 0.0);
}

#[test]
fn decoupled_sweep_row_behaves_like_random_assignment() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "40", "1");
    ok(&["oracle", "data/g00.txt"], d.path());
    fs::write(d.path().join("s.toml"), "[bench]\ntrials = 200\n[sb]\nbeta = 0.0\n").unwrap();
    ok(&["--config", "s.toml", "--out", "o", "solve", "data/g00.txt"], d.path());
    let text = read(d.path().join("data/g00.txt"));
    let edges: f64 = text.lines().skip(2).map(|l| l.split_whitespace().count() as f64).sum();
    // With the coupling gain at zero each state is a uniform random assignment,
    // whose cut has mean E/2 and variance E/4.
    let cuts: Vec<f64> = read(d.path().join("o/trials.jsonl"))
        .lines()
        .flat_map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            v["trajectory"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect::<Vec<_>>()
        })
        .collect();
    let mean = cuts.iter().sum::<f64>() / cuts.len() as f64;
    let first: Vec<f64> = cuts.iter().step_by(20).copied().collect();
    let first_mean = first.iter().sum::<f64>() / first.len() as f64;
    let sd = (edges / 4.0).sqrt();
    assert!((first_mean - edges / 2.0).abs() < 4.0 * sd / (first.len() as f64).sqrt(), "{first_mean} vs {}", edges / 2.0);
    assert!((mean - edges / 2.0).abs() < 4.0 * sd / 10.0, "{mean} vs {}", edges / 2.0);
}

#[test]
fn shipped_config_runs() {
    let d = tempfile::tempdir().unwrap();
    dataset(d.path(), "20", "1");
    ok(&["oracle", "data/g00.txt"], d.path());
    let cfg = docs("bench.toml");
    ok(&["--config", cfg.to_str().unwrap(), "--trials", "5", "--out", "o", "bench", "data/g00.txt"], d.path());
    ok(&["--config", cfg.to_str().unwrap(), "--engine", "hardware", "--trials", "5", "--out", "h", "bench", "data/g00.txt"], d.path());
    let out = ok(&["baseline", "data/g00.txt", "--restarts", "20"], d.path());
    let rec: Value = serde_json::from_str(&out).unwrap();
    assert!(rec["gw_expected_cut"].as_f64().unwrap() <= rec["gw_best_cut"].as_f64().unwrap());
}
