use std::process::Command;

use iama::experiment::{read_results, run_experiment, RunManifest};
use iama::se::summarize;
use iama::{Precoder, Scheme, SimulationConfig};

fn tiny() -> SimulationConfig {
    SimulationConfig {
        l: 6,
        k: 8,
        n: 2,
        tau_p: 3,
        n_setups: 3,
        n_channel_reals: 100,
        seed: 42,
        ..SimulationConfig::default()
    }
}

fn manifest(config: SimulationConfig, schemes: Vec<Scheme>, out: &std::path::Path) -> RunManifest {
    RunManifest {
        config,
        schemes,
        precoders: Precoder::ALL.to_vec(),
        out_dir: out.to_path_buf(),
    }
}

#[test]
fn runs_are_byte_identical_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_experiment(&manifest(tiny(), Scheme::ALL.to_vec(), &a)).unwrap();
    run_experiment(&manifest(tiny(), Scheme::ALL.to_vec(), &b)).unwrap();
    for file in ["results.csv", "summary.csv", "config.txt"] {
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let rows = read_results(a.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 3 * 5 * 2 * 8);
    let text = std::fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);

    let snapshot: SimulationConfig = std::fs::read_to_string(a.join("config.txt"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(snapshot, tiny());
}

#[test]
fn summary_agrees_with_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&manifest(
        tiny(),
        vec![Scheme::IarSum, Scheme::Random],
        dir.path(),
    ))
    .unwrap();
    assert_eq!(out.summary.len(), 4);
    for s in &out.summary {
        let samples: Vec<f64> = out
            .rows
            .iter()
            .filter(|r| r.scheme == s.scheme && r.precoder == s.precoder)
            .filter_map(|r| r.se)
            .collect();
        let expect = summarize(&samples).unwrap();
        assert_eq!(
            (s.avg_se, s.se90, s.count),
            (expect.average, expect.se90, expect.count)
        );
    }
    let text = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(text.starts_with("scheme,precoder,avg_se,se90,count\n"));
}

#[test]
fn scheme_results_do_not_depend_on_the_other_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let alone = run_experiment(&manifest(
        tiny(),
        vec![Scheme::Scalable],
        &dir.path().join("x"),
    ))
    .unwrap();
    let mixed = run_experiment(&manifest(
        tiny(),
        vec![Scheme::IarMin, Scheme::Scalable, Scheme::Greedy],
        &dir.path().join("y"),
    ))
    .unwrap();
    let pick = |rows: &[iama::experiment::ResultRow]| {
        rows.iter()
            .filter(|r| r.scheme == "scalable")
            .cloned()
            .collect::<Vec<_>>()
    };
    assert_eq!(pick(&alone.rows), pick(&mixed.rows));
}

#[test]
fn seed_changes_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&manifest(
        tiny(),
        vec![Scheme::Random],
        &dir.path().join("a"),
    ))
    .unwrap();
    let b = run_experiment(&manifest(
        SimulationConfig { seed: 43, ..tiny() },
        vec![Scheme::Random],
        &dir.path().join("b"),
    ))
    .unwrap();
    assert_ne!(a.rows, b.rows);
}

#[test]
fn cli_writes_outputs_and_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.txt");
    std::fs::write(
        &config,
        "# tiny run\nL = 6\nK = 8\nN = 2\ntau_p = 3\nn_channel_reals = 100\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_iama-sim"))
        .args(["--config", config.to_str().unwrap()])
        .args([
            "--schemes",
            "iarmin,scalable",
            "--precoder",
            "mr",
            "--setups",
            "2",
            "--seed",
            "7",
        ])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let rows = read_results(out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 8);
    assert!(rows.iter().all(|r| r.precoder == "mr"));
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("iarmin,mr,")));

    let bad = Command::new(env!("CARGO_BIN_EXE_iama-sim"))
        .args(["--schemes", "iarmin,bogus", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bogus"));
}
