use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use doublewell_core::classical::{self, ClassicalParams, IntegrationOptions, PhaseState};
use doublewell_qfi::config::{ExperimentConfig, ExperimentKind, GridSpec, Overrides};
use doublewell_qfi::output::{sha256_hex, MANIFEST_NAME, UNITS_NOTE};
use doublewell_qfi::{run, ExperimentError};

fn resolve(kind: ExperimentKind, toml: &str) -> Result<ExperimentConfig, ExperimentError> {
    ExperimentConfig::resolve(Some(kind), Some(toml), &Overrides::default())
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_owned)
        .collect()
}

fn data_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != MANIFEST_NAME)
        .map(|e| {
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn config_errors_are_reported() {
    use ExperimentKind::*;
    let cases = [
        (Fidelity, "lamda = 1"),
        (Fidelity, "lambda = { min = 1, max = 2, count = 0 }"),
        (Fidelity, "lambda = { min = 3, max = 2, count = 4 }"),
        (Fidelity, "time = { max = 0, samples = 10 }"),
        (Fidelity, "time = { max = 1, samples = 0 }"),
        (Fidelity, "n_particles = 1"),
        (Fidelity, "lambda = -1"),
        (Fidelity, "workers = 0"),
        (Fidelity, "initial_state = { theta = 4, phi = 0 }"),
        (Sweep, "metric = \"f_max\""),
        (Fidelity, "metric = \"jz\""),
        (Fidelity, "experiment = \"qfi-map\""),
        (Fidelity, "time = { max = 1, samples = 3, step = 2 }"),
    ];
    for (kind, text) in cases {
        assert!(resolve(kind, text).is_err(), "accepted: {text}");
    }
    assert!(resolve(Fidelity, "experiment = \"fidelity\"\nlambda = [1, 4]").is_ok());
}

#[test]
fn overrides_take_precedence() {
    let overrides = Overrides {
        lambda: Some("0.5:1.5:3".parse::<GridSpec>().unwrap()),
        n_particles: Some(20),
        time_max: Some(2.0),
        samples: Some(5),
        workers: Some(3),
        output: Some("x".into()),
    };
    let cfg = ExperimentConfig::resolve(
        Some(ExperimentKind::Fidelity),
        Some("n_particles = 50\nlambda = 4\ntime = { max = 9, samples = 9 }\nworkers = 1"),
        &overrides,
    )
    .unwrap();
    assert_eq!(cfg.n_particles, 20);
    assert_eq!(cfg.lambda.values(), vec![0.5, 1.0, 1.5]);
    assert_eq!((cfg.time.max, cfg.time.samples), (2.0, 5));
    assert_eq!(cfg.workers, 3);
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            ExperimentKind::Sweep,
            "n_particles = 30\nlambda = { min = 0.5, max = 3, count = 6 }\n\
             time = { max = 5, samples = 40 }\nmetric = \"f_bar_max\"",
        ),
        (
            ExperimentKind::QfiMap,
            "n_particles = 30\nlambda = { min = 0.2, max = 4, count = 5 }\n\
             time = { max = 10, samples = 30 }\nmatrix = true",
        ),
        (
            ExperimentKind::PhasePortrait,
            "lambda = [4, 1, 2]\nlattice = 3\ntime = { max = 3, samples = 30 }",
        ),
    ];
    for (kind, text) in cases {
        let mut outputs = Vec::new();
        for workers in [1usize, 8] {
            let mut cfg = resolve(kind, text).unwrap();
            cfg.workers = workers;
            cfg.output = dir.path().join(format!("{kind}-{workers}"));
            run(&cfg).unwrap();
            outputs.push(data_files(&cfg.output));
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{kind}");
    }
}

#[test]
fn manifest_lists_every_file_with_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(
        ExperimentKind::QfiMap,
        "n_particles = 20\nlambda = [1, 4]\ntime = { max = 6, samples = 7 }\nmatrix = true",
    )
    .unwrap();
    cfg.output = dir.path().to_path_buf();
    let report = run(&cfg).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report.manifest).unwrap()).unwrap();
    let listed: BTreeMap<String, String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            (
                f["name"].as_str().unwrap().to_owned(),
                f["sha256"].as_str().unwrap().to_owned(),
            )
        })
        .collect();
    let on_disk = data_files(dir.path());
    assert_eq!(on_disk.len(), 4);
    assert_eq!(listed.len(), on_disk.len());
    for (name, bytes) in &on_disk {
        assert_eq!(listed[name], sha256_hex(bytes), "{name}");
    }
    assert_eq!(manifest["config"]["n_particles"], 20);
    assert_eq!(manifest["config_sha256"], cfg.content_hash());
    assert!(manifest["version"].is_string());
    assert!(manifest["timestamp_unix"].as_u64().unwrap() > 0);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn every_csv_has_metadata_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(
        ExperimentKind::JzSeries,
        "n_particles = 10\ntime = { max = 1, samples = 3 }",
    )
    .unwrap();
    cfg.output = dir.path().to_path_buf();
    run(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join("jz_series.csv")).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.iter().any(|l| l.contains(&cfg.content_hash())));
    assert!(header.iter().any(|l| l.contains(UNITS_NOTE)));
    assert!(header.iter().any(|l| l.contains("round-trip")));
    assert_eq!(
        text.lines().nth(header.len()),
        Some("lambda,kappa_t,jz_expectation")
    );
}

#[test]
fn sweep_reproduces_critical_couplings() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(ExperimentKind::Sweep, "metric = \"lambda_c\"").unwrap();
    cfg.output = dir.path().to_path_buf();
    run(&cfg).unwrap();
    let rows = data_rows(&dir.path().join("sweep.csv"));
    let values: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    let expected = [
        (0.0, 0.0, 1.0),
        (0.0, PI, 1.0),
        (PI / 6.0, 0.0, 1.5),
        (PI / 6.0, PI, 0.5),
    ];
    assert_eq!(values.len(), expected.len());
    for (got, want) in values.iter().zip(expected) {
        assert_eq!((got.0, got.1), (want.0, want.1));
        assert!((got.2 - want.2).abs() < 1e-12, "{got:?} vs {want:?}");
    }
}

#[test]
fn sweep_marks_degenerate_couplings() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(
        ExperimentKind::Sweep,
        "metric = \"lambda_c\"\ntheta0 = 1.5707963267948966\nphi0 = 0",
    )
    .unwrap();
    cfg.output = dir.path().to_path_buf();
    run(&cfg).unwrap();
    let rows = data_rows(&dir.path().join("sweep.csv"));
    assert!(rows[0].ends_with(",indeterminate"), "{rows:?}");
}

#[test]
fn single_point_sweep_matches_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let common = "n_particles = 40\nlambda = 1.5\ntime = { max = 4, samples = 25 }";
    for (kind, metric, file) in [
        (ExperimentKind::Fidelity, "fidelity", "fidelity.csv"),
        (ExperimentKind::JzSeries, "jz", "jz_series.csv"),
    ] {
        let mut direct = resolve(kind, common).unwrap();
        direct.output = dir.path().join(format!("direct-{metric}"));
        run(&direct).unwrap();

        let mut sweep = resolve(
            ExperimentKind::Sweep,
            &format!("{common}\nmetric = \"{metric}\""),
        )
        .unwrap();
        sweep.initial_state = direct.initial_state;
        sweep.output = dir.path().join(format!("sweep-{metric}"));
        run(&sweep).unwrap();

        let a = data_rows(&direct.output.join(file));
        let b = data_rows(&sweep.output.join("sweep.csv"));
        assert_eq!(a.len(), 25);
        assert_eq!(a, b, "{metric}");
    }
}

#[test]
fn phase_portrait_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(
        ExperimentKind::PhasePortrait,
        "lattice = 6\ntime = { max = 10, samples = 101 }",
    )
    .unwrap();
    cfg.output = dir.path().to_path_buf();
    run(&cfg).unwrap();

    let mut fixed: Vec<Vec<String>> = data_rows(&dir.path().join("fixed_points.csv"))
        .iter()
        .map(|r| r.split(',').map(str::to_owned).collect())
        .collect();
    fixed.sort_by(|a, b| a[0].cmp(&b[0]));
    let summary: Vec<(&str, &str)> = fixed
        .iter()
        .map(|r| (r[0].as_str(), r[5].as_str()))
        .collect();
    assert_eq!(
        summary,
        vec![
            ("1", "unstable-saddle"),
            ("1", "stable-center"),
            ("1", "stable-center"),
            ("1", "stable-center"),
            ("4", "stable-center"),
            ("4", "stable-center"),
        ]
    );

    for file in ["trajectories_000.csv", "trajectories_001.csv"] {
        let mut energy: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for row in data_rows(&dir.path().join(file)) {
            let cells: Vec<&str> = row.split(',').collect();
            assert_eq!(cells[4], "complete");
            let h: f64 = cells[8].parse().unwrap();
            let e = energy.entry(cells[1].to_owned()).or_insert((h, h));
            e.0 = e.0.min(h);
            e.1 = e.1.max(h);
        }
        assert_eq!(energy.len(), 36);
        for (k, (lo, hi)) in energy {
            assert!(hi - lo < 1e-8, "{file} trajectory {k}: spread {}", hi - lo);
        }
    }
}

#[test]
fn escape_from_unstable_equator_with_runner_step() {
    let params = ClassicalParams::new(1.0).unwrap();
    let options = IntegrationOptions::new(20.0, IntegrationOptions::DEFAULT_DT);
    let (traj, _) = classical::integrate(PhaseState::new(0.1, 0.0), params, &options).unwrap();
    assert!(traj.max_distance_from(&PhaseState::new(0.0, 0.0)) > 0.5);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_doublewell-qfi");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "lambda = 1\nsampels = 3\n").unwrap();
    let out = Command::new(bin)
        .args(["fidelity", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    assert!(stderr.contains("sampels"), "{stderr}");

    let missing = Command::new(bin)
        .args(["jz-series", "--config", "/nonexistent/cfg.toml"])
        .output()
        .unwrap();
    assert!(!missing.status.success());

    let good = dir.path().join("good.toml");
    fs::write(&good, "n_particles = 10\nlambda = [3, 0.5]\n").unwrap();
    let out_dir = dir.path().join("run");
    let ok = Command::new(bin)
        .args([
            "jz-series",
            "--samples",
            "4",
            "--lambda",
            "1,2,3",
            "--config",
        ])
        .arg(&good)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert_eq!(data_rows(&out_dir.join("jz_series.csv")).len(), 12);
    assert!(out_dir.join(MANIFEST_NAME).exists());
}
