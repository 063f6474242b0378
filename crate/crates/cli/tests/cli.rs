//! End-to-end checks of config validation, run determinism, CSV
//! round-trips, shot statistics, and the binary's error reporting.

use std::fs;
use std::process::Command;

use spinqpt::metrics::chi_trace;
use spinqpt::observables::paramagnetic_reference;
use spinqpt_cli::config::validate_config;
use spinqpt_cli::output::parse_csv_column;
use spinqpt_cli::{run, sample_shots, CliError};

#[test]
fn minimal_config_resolves_experiment_defaults() {
    let cfg = validate_config("topology = \"triangle\"").unwrap();
    assert_eq!(cfg.n, 3);
    assert_eq!(cfg.t_final_ns, 50.0);
    assert_eq!(cfg.delta_max_ghz, 5.0);
    assert_eq!(cfg.j_max_ghz, 5.0);
    assert_eq!(cfg.delta_floor_ghz, 5e-6);
    assert_eq!(cfg.grid_points, 101);
    assert!(cfg.metrics.chi && cfg.metrics.witness && cfg.metrics.macro_measure);
    assert!(!cfg.metrics.dynamics);
}

#[test]
fn unknown_and_invalid_keys_are_named() {
    let err = validate_config("bogus_knob = 1").unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert!(err.to_string().contains("bogus_knob"), "{err}");

    let err = validate_config("grid_points = 1").unwrap_err();
    assert!(err.to_string().contains("grid_points"), "{err}");

    let err = validate_config("topology = \"ring\"").unwrap_err();
    assert!(err.to_string().contains("topology"), "{err}");

    let err = validate_config("topology = \"chain\"\nn = 4\nedges = [[0, 1]]").unwrap_err();
    assert!(err.to_string().contains("edges"), "{err}");

    let err = validate_config("j_factors = [1.0]").unwrap_err();
    assert!(err.to_string().contains("j_factors"), "{err}");
}

fn small_config() -> spinqpt_cli::ExperimentConfig {
    validate_config("topology = \"triangle\"\ngrid_points = 11\nshots = 2000").unwrap()
}

#[test]
fn runs_are_bit_identical() {
    let cfg = small_config();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = run(&cfg, a.path()).unwrap();
    let mb = run(&cfg, b.path()).unwrap();
    assert_eq!(ma.outputs, mb.outputs);
    assert!(!ma.outputs.is_empty());
    for name in &ma.outputs {
        let fa = fs::read(a.path().join(name)).unwrap();
        let fb = fs::read(b.path().join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs between identical runs");
    }
}

#[test]
fn manifest_lists_every_output_and_the_fit() {
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    let manifest = run(&cfg, dir.path()).unwrap();
    for name in [
        "schedule.csv",
        "trajectory.csv",
        "moments.csv",
        "probabilities.csv",
        "witness.csv",
        "macro.csv",
        "chi.csv",
        "shots.csv",
    ] {
        assert!(manifest.outputs.contains(&name.to_string()), "missing {name}");
        assert!(dir.path().join(name).exists(), "{name} not written");
    }
    assert!(manifest.stats.contains_key("fit_alpha"));
    assert!(manifest.stats.contains_key("chi_peak_value"));
    let json = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(json.contains("\"units\""));
}

#[test]
fn chi_csv_round_trips_to_memory() {
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    run(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("chi.csv")).unwrap();
    let s = parse_csv_column(&text, 0);
    let chi = parse_csv_column(&text, 2);
    let net = cfg.network().unwrap();
    let trace = chi_trace(&net, &cfg.schedule(), cfg.grid_points, cfg.delta_s, cfg.gap_tol_ghz)
        .unwrap();
    assert_eq!(s.len(), trace.s.len());
    for k in 0..s.len() {
        assert!((s[k] - trace.s[k]).abs() < 1e-12);
        assert!((chi[k] - trace.chi_overlap[k]).abs() < 1e-12 * (1.0 + trace.chi_overlap[k].abs()));
    }
}

#[test]
fn metrics_off_yields_schedule_only() {
    let cfg = validate_config(
        "grid_points = 5\n[metrics]\nchi = false\nwitness = false\nmacro = false\ndynamics = false",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = run(&cfg, dir.path()).unwrap();
    assert_eq!(manifest.outputs, vec!["schedule.csv".to_string()]);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn memory_budget_rejection_reports_bytes() {
    let cfg = validate_config("topology = \"chain\"\nn = 14\ngrid_points = 3").unwrap();
    std::env::set_var("SPINQPT_MEMORY_BUDGET", "1024");
    let err = run(&cfg, tempfile::tempdir().unwrap().path()).unwrap_err();
    std::env::remove_var("SPINQPT_MEMORY_BUDGET");
    assert_eq!(err.category(), "memory-budget");
    assert!(err.to_string().contains("bytes"), "{err}");
}

#[test]
fn million_shots_match_binomial_within_3_sigma() {
    let h = paramagnetic_reference::<f64>(3);
    let shots = 1_000_000u64;
    let (_, empirical) = sample_shots(&h, shots, 12345).unwrap();
    for (p, q) in h.probabilities().iter().zip(empirical.probabilities()) {
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!(
            (p - q).abs() < 3.0 * sigma,
            "bin off by {} > 3 sigma ({sigma})",
            (p - q).abs()
        );
    }
}

#[test]
fn binary_reports_machine_readable_errors() {
    let bin = env!("CARGO_BIN_EXE_spinqpt");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "grid_points = 0").unwrap();
    let out = Command::new(bin)
        .args(["run", bad.to_str().unwrap(), "--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("\"category\":\"config\""), "{stderr}");
    assert!(stderr.contains("grid_points"), "{stderr}");
}

#[test]
fn binary_witness_subcommand_runs_triangle() {
    let bin = env!("CARGO_BIN_EXE_spinqpt");
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("w");
    let out = Command::new(bin)
        .args(["witness", "--grid", "5", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_dir.join("witness.csv")).unwrap();
    let values = parse_csv_column(&text, 5);
    // paramagnetic end is separable, frustrated end is entangled
    assert!(values.first().unwrap() > &0.0);
    assert!(values.last().unwrap() < &0.0);
}
