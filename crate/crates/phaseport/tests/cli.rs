//! End-to-end checks of the command-line surface: every subcommand, the
//! pinned validation messages and exit codes, file formats, determinism,
//! and the decompose/simulate round trip.

use std::path::{Path, PathBuf};

use phaseport::cli::{main_with_args, run, CliError, EXIT_IO, EXIT_NUMERIC, EXIT_VALIDATION};

fn run_args(args: &[&str]) -> Result<(), CliError> {
    let mut full = vec!["phaseport"];
    full.extend_from_slice(args);
    run(full)
}

fn exit_code(args: &[&str]) -> i32 {
    let mut full = vec!["phaseport"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// Parses the body rows of a retained-distribution CSV into probabilities.
fn parse_distribution(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .filter(|line| line.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .map(|line| line.split(',').nth(2).unwrap().parse().unwrap())
        .collect()
}

fn footer_value(csv: &str, key: &str) -> Option<f64> {
    csv.lines()
        .find(|line| line.starts_with(key))
        .map(|line| line.split(',').nth(1).unwrap().parse().unwrap())
}

const ANALYTIC_CONFIG: &str = r#"
modes = 4
[signal]
kind = "custom"
coefficients = [[1.0, 0.0], [1.0, 0.0]]
[reference]
kind = "binomial"
[network]
kind = "dft"
"#;

#[test]
fn matrix_writes_expected_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dft2.csv");
    run_args(&["matrix", "--dim", "2", "--out", out.to_str().unwrap()]).unwrap();
    let csv = read(&out);
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    let s = std::f64::consts::FRAC_1_SQRT_2; // 0.7071067811865476
    assert_eq!(rows[0], vec![s, 0.0, s, 0.0]);
    assert_eq!(rows[1], vec![s, 0.0, -s, 0.0]);
}

#[test]
fn matrix_dim4_moduli_are_half() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dft4.csv");
    run_args(&["matrix", "--dim", "4", "--out", out.to_str().unwrap()]).unwrap();
    for line in read(&out).lines() {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        for pair in fields.chunks(2) {
            let modulus = (pair[0] * pair[0] + pair[1] * pair[1]).sqrt();
            assert!((modulus - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn matrix_rejects_dimension_one_with_pinned_message() {
    let err = run_args(&["matrix", "--dim", "1"]).unwrap_err();
    assert_eq!(err.to_string(), "dimension must be at least 2");
    assert_eq!(exit_code(&["matrix", "--dim", "1"]), EXIT_VALIDATION);
}

#[test]
fn matrix_check_mode_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    run_args(&[
        "matrix",
        "--dim",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--check",
    ])
    .unwrap();
    assert!(!out.exists());
}

#[test]
fn decompose_emits_triangular_netlists() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("net4.txt");
    run_args(&["decompose", "--dim", "4", "--out", out.to_str().unwrap()]).unwrap();
    let text = read(&out);
    assert!(text.starts_with("DIM 4\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("BS ")).count(), 6);

    let out2 = dir.path().join("net2.txt");
    run_args(&["decompose", "--dim", "2", "--out", out2.to_str().unwrap()]).unwrap();
    let bs_lines: Vec<&str> = read(&out2)
        .lines()
        .filter(|l| l.starts_with("BS "))
        .map(|l| l.to_owned().leak() as &str)
        .collect();
    assert_eq!(bs_lines.len(), 1);
    let transmittance: f64 = bs_lines[0]
        .split_whitespace()
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((transmittance - 0.5).abs() < 1e-12);
}

#[test]
fn decompose_requires_exactly_one_source() {
    assert!(matches!(
        run_args(&["decompose"]),
        Err(CliError::Validation(_))
    ));
    let err = run_args(&["decompose", "--dim", "3", "--netlist-in", "x.txt"]).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
}

#[test]
fn decompose_netlist_roundtrip_matches_dft_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let netlist_path = dir.path().join("net.txt");
    run_args(&[
        "decompose",
        "--dim",
        "4",
        "--out",
        netlist_path.to_str().unwrap(),
    ])
    .unwrap();

    let config_dft = dir.path().join("dft.toml");
    std::fs::write(&config_dft, ANALYTIC_CONFIG).unwrap();
    let config_net = dir.path().join("net.toml");
    std::fs::write(
        &config_net,
        format!(
            "{}\n",
            ANALYTIC_CONFIG.replace(
                "[network]\nkind = \"dft\"",
                &format!(
                    "[network]\nkind = \"netlist\"\npath = {:?}",
                    netlist_path.to_str().unwrap()
                )
            )
        ),
    )
    .unwrap();

    let out_dft = dir.path().join("dft.csv");
    let out_net = dir.path().join("net.csv");
    run_args(&[
        "simulate",
        "--config",
        config_dft.to_str().unwrap(),
        "--out",
        out_dft.to_str().unwrap(),
    ])
    .unwrap();
    run_args(&[
        "simulate",
        "--config",
        config_net.to_str().unwrap(),
        "--out",
        out_net.to_str().unwrap(),
    ])
    .unwrap();

    let p_dft = parse_distribution(&read(&out_dft));
    let p_net = parse_distribution(&read(&out_net));
    assert_eq!(p_dft.len(), 4);
    for (a, b) in p_dft.iter().zip(&p_net) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn simulate_analytic_config_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, ANALYTIC_CONFIG).unwrap();
    let out = dir.path().join("dist.csv");
    run_args(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let csv = read(&out);
    let probabilities = parse_distribution(&csv);
    let expected = [0.5, 0.25, 0.0, 0.25];
    for (p, e) in probabilities.iter().zip(&expected) {
        assert!((p - e).abs() < 1e-10, "{p} vs {e}");
    }
    assert!(footer_value(&csv, "success_probability").unwrap() > 0.0);
    assert!(footer_value(&csv, "max_abs_diff").unwrap() < 1e-10);
}

#[test]
fn simulate_check_mode_validates_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, ANALYTIC_CONFIG).unwrap();
    let out = dir.path().join("never.csv");
    run_args(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--check",
    ])
    .unwrap();
    assert!(!out.exists());
}

#[test]
fn simulate_supports_ensembles_and_lossy_detectors() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        r#"
modes = 3
eta = 0.8

[signal]
kind = "ensemble"

[[signal.components]]
weight = 0.5
kind = "number"
n = 0

[[signal.components]]
weight = 0.5
kind = "custom"
coefficients = [[1.0, 0.0], [0.0, 1.0]]
"#,
    )
    .unwrap();
    let out = dir.path().join("dist.csv");
    run_args(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let csv = read(&out);
    let probabilities = parse_distribution(&csv);
    let total: f64 = probabilities.iter().sum();
    assert!((total - 1.0).abs() < 1e-10);
    // thinned + mixed run carries no oracle line
    assert!(footer_value(&csv, "max_abs_diff").is_none());
}

#[test]
fn sample_rejects_zero_shots_with_pinned_message() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, ANALYTIC_CONFIG).unwrap();
    let err = run_args(&[
        "sample",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "1",
    ])
    .unwrap_err();
    assert_eq!(err.to_string(), "shots must be positive for sample");
    assert_eq!(err.exit_code(), EXIT_VALIDATION);
}

#[test]
fn sample_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, ANALYTIC_CONFIG).unwrap();
    let err = run_args(&[
        "sample",
        "--config",
        config.to_str().unwrap(),
        "--shots",
        "10",
    ])
    .unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
}

#[test]
fn sample_is_byte_identical_per_seed_and_statistically_sound() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, ANALYTIC_CONFIG).unwrap();

    let sample_to = |name: &str| -> PathBuf {
        let out = dir.path().join(name);
        run_args(&[
            "sample",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "4242",
            "--shots",
            "100000",
        ])
        .unwrap();
        out
    };
    let first = read(&sample_to("a.csv"));
    let second = read(&sample_to("b.csv"));
    assert_eq!(
        first, second,
        "same seed must reproduce the CSV byte for byte"
    );

    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "m,theta_m,count,frequency");
    assert!(lines[lines.len() - 2].starts_with("discarded,"));
    assert_eq!(lines[lines.len() - 1], "seed,4242");

    // chi-square of retained counts against the exact conditioned values
    let counts: Vec<f64> = lines[1..=4]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    let retained: f64 = counts.iter().sum();
    let expected = [0.5, 0.25, 0.0, 0.25];
    let chi_square: f64 = counts
        .iter()
        .zip(&expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(o, &e)| (o - e * retained).powi(2) / (e * retained))
        .sum();
    assert!(chi_square < 16.27, "chi-square {chi_square}");
}

#[test]
fn selftest_passes_and_detects_an_injected_sign_fault() {
    run_args(&["selftest"]).unwrap();

    std::env::set_var("PHASEPORT_SELFTEST_FAULT", "kappa2-sign");
    let faulted = run_args(&["selftest"]);
    std::env::remove_var("PHASEPORT_SELFTEST_FAULT");

    let err = faulted.unwrap_err();
    assert_eq!(err.exit_code(), EXIT_NUMERIC);
}

#[test]
fn io_failures_map_to_exit_code_four() {
    let code = exit_code(&["matrix", "--dim", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn zero_success_configs_map_to_exit_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    // vacuum signal and vacuum reference: no pointer event can fire
    std::fs::write(
        &config,
        r#"
modes = 2
[signal]
kind = "number"
n = 0
[reference]
kind = "custom"
coefficients = [[1.0, 0.0]]
"#,
    )
    .unwrap();
    let code = exit_code(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_NUMERIC);
}

#[test]
fn unknown_flags_are_validation_errors() {
    assert_eq!(
        exit_code(&["matrix", "--dim", "2", "--bogus"]),
        EXIT_VALIDATION
    );
    assert_eq!(exit_code(&["frobnicate"]), EXIT_VALIDATION);
}
