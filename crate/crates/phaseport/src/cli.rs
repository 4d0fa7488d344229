//! Batch front-end: configure an experiment in a TOML file, run exact or
//! sampled simulations, emit netlists, matrices, histograms, and the
//! built-in numerical cross-checks.
//!
//! A config names the network either as `dft` — the phase-pointer device,
//! whose photon-amplitude transfer is the *adjoint* of the Fourier mode
//! matrix (see [`crate::measurement::pointer_network`] for why) — or as a
//! `netlist` file listing beam splitters in the order the light traverses
//! them, whose recomposition *is* the transfer matrix. `decompose --dim k`
//! factors the pointer device's photon path, so feeding its output back
//! through `--network netlist` reproduces the `dft` run to rounding.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric or size-limit
//! error, 4 I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::fock::{
    brute_force_evolve, evolve, permanent, permanent_naive, ComplexMatrix, FockError, FockPattern,
    MultimodeState,
};
use crate::measurement::{
    apply_detector_efficiency, outcome_distribution, pointer_amplitudes, pointer_network,
    retained_from_outcomes, Histogram, MeasurementError, RetainedDistribution,
};
use crate::multiport::{
    decompose, dft_matrix, random_unitary, recompose, InterferometerNetlist, MultiportError,
    UnitaryMatrix,
};
use crate::oracle::{
    closed_form_pointer_amplitude, identity_check, projection_distribution, OracleError,
};
use crate::states::{
    assemble_input, binomial_reference, coherent_state, number_state, PhaseGrid, SingleModeState,
    StatesError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<MultiportError> for CliError {
    fn from(e: MultiportError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<StatesError> for CliError {
    fn from(e: StatesError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::ZeroState | FockError::EmptyPattern => CliError::Validation(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<MeasurementError> for CliError {
    fn from(e: MeasurementError) -> Self {
        match e {
            MeasurementError::InvalidEta { .. } | MeasurementError::DimensionMismatch { .. } => {
                CliError::Validation(e.to_string())
            }
            MeasurementError::ZeroSuccess => CliError::Numeric(e.to_string()),
            MeasurementError::Fock(inner) => inner.into(),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::PhaseIndexOutOfRange { .. } => CliError::Validation(e.to_string()),
            OracleError::ZeroSum { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

fn default_modes() -> usize {
    8
}

fn default_eta() -> f64 {
    1.0
}

/// One experiment document. Complex numbers are `[re, im]` pairs.
#[derive(Debug, Deserialize)]
pub struct ExperimentConfig {
    /// Number of modes, `N + 1`.
    #[serde(default = "default_modes")]
    pub modes: usize,
    pub signal: SignalSpec,
    #[serde(default)]
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub network: NetworkSpec,
    /// Detector efficiency in (0, 1].
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// 0 means exact-only; `sample` requires a positive count.
    #[serde(default)]
    pub shots: u64,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Default, Deserialize)]
pub struct OutputPaths {
    pub distribution: Option<PathBuf>,
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignalSpec {
    Number { n: usize, cutoff: Option<usize> },
    Coherent { alpha: [f64; 2], cutoff: usize },
    Custom { coefficients: Vec<[f64; 2]> },
    Ensemble { components: Vec<EnsembleComponent> },
}

#[derive(Debug, Deserialize)]
pub struct EnsembleComponent {
    pub weight: f64,
    #[serde(flatten)]
    pub state: PureStateSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PureStateSpec {
    Number { n: usize, cutoff: Option<usize> },
    Coherent { alpha: [f64; 2], cutoff: usize },
    Custom { coefficients: Vec<[f64; 2]> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReferenceSpec {
    #[default]
    Binomial,
    Custom {
        coefficients: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NetworkSpec {
    #[default]
    Dft,
    Netlist {
        path: PathBuf,
    },
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect()
}

fn build_pure_state(spec: &PureStateSpec) -> Result<SingleModeState, CliError> {
    match spec {
        PureStateSpec::Number { n, cutoff } => Ok(number_state(*n, cutoff.unwrap_or(*n))?),
        PureStateSpec::Coherent { alpha, cutoff } => {
            Ok(coherent_state(Complex64::new(alpha[0], alpha[1]), *cutoff)?)
        }
        PureStateSpec::Custom { coefficients } => {
            Ok(SingleModeState::new(to_complex(coefficients))?)
        }
    }
}

/// A fully prepared run: grid, weighted signal components, reference, and
/// the photon-amplitude transfer matrix of the configured network.
pub struct Experiment {
    pub grid: PhaseGrid,
    pub components: Vec<(f64, SingleModeState)>,
    pub reference: SingleModeState,
    pub reference_is_binomial: bool,
    pub transfer: UnitaryMatrix,
    pub eta: f64,
    pub shots: u64,
    pub seed: Option<u64>,
    pub output: OutputPaths,
}

pub fn prepare(config: ExperimentConfig) -> Result<Experiment, CliError> {
    if config.modes < 2 {
        return Err(CliError::Validation("modes must be at least 2".to_string()));
    }
    if !(config.eta > 0.0 && config.eta <= 1.0) {
        return Err(CliError::Validation(format!(
            "eta must lie in (0, 1], got {}",
            config.eta
        )));
    }
    let grid = PhaseGrid::new(config.modes - 1);

    let components = match &config.signal {
        SignalSpec::Number { n, cutoff } => vec![(
            1.0,
            build_pure_state(&PureStateSpec::Number {
                n: *n,
                cutoff: *cutoff,
            })?,
        )],
        SignalSpec::Coherent { alpha, cutoff } => vec![(
            1.0,
            build_pure_state(&PureStateSpec::Coherent {
                alpha: *alpha,
                cutoff: *cutoff,
            })?,
        )],
        SignalSpec::Custom { coefficients } => vec![(
            1.0,
            build_pure_state(&PureStateSpec::Custom {
                coefficients: coefficients.clone(),
            })?,
        )],
        SignalSpec::Ensemble { components } => {
            if components.is_empty() {
                return Err(CliError::Validation(
                    "ensemble needs components".to_string(),
                ));
            }
            let mut built = Vec::with_capacity(components.len());
            let mut total = 0.0;
            for component in components {
                if component.weight < 0.0 {
                    return Err(CliError::Validation(format!(
                        "ensemble weight {} is negative",
                        component.weight
                    )));
                }
                total += component.weight;
                built.push((component.weight, build_pure_state(&component.state)?));
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(CliError::Validation(format!(
                    "ensemble weights must sum to 1 within 1e-9, got {total}"
                )));
            }
            built
        }
    };

    let (reference, reference_is_binomial) = match &config.reference {
        ReferenceSpec::Binomial => (binomial_reference(grid.n()), true),
        ReferenceSpec::Custom { coefficients } => {
            (SingleModeState::new(to_complex(coefficients))?, false)
        }
    };

    let transfer = match &config.network {
        NetworkSpec::Dft => pointer_network(&grid),
        NetworkSpec::Netlist { path } => {
            let text = read_file(path)?;
            let netlist = InterferometerNetlist::from_text(&text)?;
            if netlist.dim() != config.modes {
                return Err(CliError::Validation(format!(
                    "netlist dimension {} does not match modes {}",
                    netlist.dim(),
                    config.modes
                )));
            }
            recompose(&netlist)?
        }
    };

    Ok(Experiment {
        grid,
        components,
        reference,
        reference_is_binomial,
        transfer,
        eta: config.eta,
        shots: config.shots,
        seed: config.seed,
        output: config.output,
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = read_file(path)?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

fn combined_outcomes(exp: &Experiment) -> Result<BTreeMap<FockPattern, f64>, CliError> {
    let mut merged: BTreeMap<FockPattern, f64> = BTreeMap::new();
    for (weight, signal) in &exp.components {
        let input = assemble_input(signal, &exp.reference, &exp.grid)?;
        for (pattern, probability) in outcome_distribution(&exp.transfer, &input)? {
            *merged.entry(pattern).or_insert(0.0) += weight * probability;
        }
    }
    Ok(merged)
}

/// Exact retained distribution of the configured experiment. Ensembles mix
/// the unnormalized pointer probabilities and condition afterwards, matching
/// the trace formula for a mixed input.
pub fn exact_distribution(exp: &Experiment) -> Result<RetainedDistribution, CliError> {
    if exp.eta == 1.0 {
        let modes = exp.grid.modes();
        let mut pointer = vec![0.0; modes];
        let mut success = 0.0;
        for (weight, signal) in &exp.components {
            let input = assemble_input(signal, &exp.reference, &exp.grid)?;
            let amplitudes = pointer_amplitudes(&exp.transfer, &input)?;
            for (bin, amplitude) in pointer.iter_mut().zip(&amplitudes) {
                *bin += weight * amplitude.norm_sqr();
            }
            success += weight * amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
        Ok(RetainedDistribution::new(exp.grid, pointer, success)?)
    } else {
        let outcomes = combined_outcomes(exp)?;
        let thinned = apply_detector_efficiency(&outcomes, exp.eta)?;
        Ok(retained_from_outcomes(&thinned, exp.grid.modes())?)
    }
}

/// Monte Carlo histogram: samples the full outcome map (after detector
/// thinning when `eta < 1`) so discarded shots are tallied realistically.
pub fn sampled_histogram(exp: &Experiment, shots: u64, seed: u64) -> Result<Histogram, CliError> {
    let outcomes = combined_outcomes(exp)?;
    let outcomes = if exp.eta < 1.0 {
        apply_detector_efficiency(&outcomes, exp.eta)?
    } else {
        outcomes
    };
    Ok(crate::measurement::sample_outcomes(
        &outcomes,
        exp.grid.modes(),
        shots,
        seed,
    ))
}

/// max |retained - lattice projection| when the comparison applies
/// (pure signal, binomial reference, ideal detectors).
pub fn oracle_comparison(exp: &Experiment, dist: &RetainedDistribution) -> Option<f64> {
    if exp.components.len() != 1 || !exp.reference_is_binomial || exp.eta != 1.0 {
        return None;
    }
    let projected = projection_distribution(&exp.components[0].1, &exp.grid).ok()?;
    Some(dist.max_probability_distance(&projected))
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

pub fn matrix_csv(matrix: &UnitaryMatrix) -> String {
    let mut out = String::new();
    for i in 0..matrix.dim() {
        let row: Vec<String> = (0..matrix.dim())
            .map(|j| {
                let z = matrix.get(i, j);
                format!("{:.16e},{:.16e}", z.re, z.im)
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn validate_matrix_csv(text: &str, dim: usize) -> Result<(), CliError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != dim {
        return Err(CliError::Validation(format!(
            "matrix CSV has {} rows, expected {dim}",
            lines.len()
        )));
    }
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 * dim {
            return Err(CliError::Validation(format!(
                "matrix CSV row has {} fields, expected {}",
                fields.len(),
                2 * dim
            )));
        }
        for field in fields {
            field.parse::<f64>().map_err(|_| {
                CliError::Validation(format!("matrix CSV field '{field}' is not a real"))
            })?;
        }
    }
    Ok(())
}

pub fn retained_csv(dist: &RetainedDistribution, oracle_max_abs_diff: Option<f64>) -> String {
    let mut out = String::from("m,theta_m,probability\n");
    for m in 0..dist.grid().modes() {
        let _ = writeln!(
            out,
            "{m},{theta:.16e},{p:.16e}",
            theta = dist.grid().theta(m),
            p = dist.probability(m),
        );
    }
    let _ = writeln!(
        out,
        "success_probability,{:.16e}",
        dist.success_probability()
    );
    if let Some(diff) = oracle_max_abs_diff {
        let _ = writeln!(out, "max_abs_diff,{diff:.16e}");
    }
    out
}

fn validate_float_csv(text: &str, header: &str) -> Result<(), CliError> {
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| CliError::Validation("empty CSV".to_string()))?;
    if first != header {
        return Err(CliError::Validation(format!(
            "bad CSV header '{first}', expected '{header}'"
        )));
    }
    for line in lines {
        for field in line.split(',').skip(1) {
            field.parse::<f64>().map_err(|_| {
                CliError::Validation(format!("CSV field '{field}' is not a number"))
            })?;
        }
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes via a sibling temp file and rename, so readers never observe a
/// partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::write(&tmp, contents).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

fn emit(out: Option<&Path>, contents: &str, description: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_atomic(path, contents)?;
            println!("wrote {description} to {}", path.display());
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

pub fn cmd_matrix(dim: usize, out: Option<&Path>, check: bool) -> Result<(), CliError> {
    if dim < 2 {
        return Err(CliError::Validation(
            "dimension must be at least 2".to_string(),
        ));
    }
    let matrix = dft_matrix(dim)?;
    let csv = matrix_csv(&matrix);
    if check {
        validate_matrix_csv(&csv, dim)?;
        println!("ok: {dim}x{dim} matrix CSV is valid");
        return Ok(());
    }
    emit(out, &csv, "matrix CSV")
}

pub fn cmd_decompose(
    dim: Option<usize>,
    netlist_in: Option<&Path>,
    out: Option<&Path>,
    check: bool,
) -> Result<(), CliError> {
    let matrix = match (dim, netlist_in) {
        (Some(dim), None) => {
            if dim < 2 {
                return Err(CliError::Validation(
                    "dimension must be at least 2".to_string(),
                ));
            }
            // the photon path of the pointer device for this port count
            dft_matrix(dim)?.adjoint()
        }
        (None, Some(path)) => {
            let netlist = InterferometerNetlist::from_text(&read_file(path)?)?;
            recompose(&netlist)?
        }
        _ => {
            return Err(CliError::Validation(
                "provide exactly one of --dim or --netlist-in".to_string(),
            ));
        }
    };
    let netlist = decompose(&matrix);
    let text = netlist.to_text();
    if check {
        let reparsed = InterferometerNetlist::from_text(&text)?;
        let rebuilt = recompose(&reparsed)?;
        let deviation = rebuilt.max_entry_distance(&matrix);
        if deviation > 1e-9 {
            return Err(CliError::Numeric(format!(
                "netlist does not reproduce the matrix: deviation {deviation:.3e}"
            )));
        }
        println!(
            "ok: netlist with {} beam splitters reproduces the matrix to {deviation:.3e}",
            netlist.beam_splitter_count()
        );
        return Ok(());
    }
    emit(out, &text, "netlist")
}

pub fn cmd_simulate(config_path: &Path, out: Option<&Path>, check: bool) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    let exp = prepare(config)?;
    let dist = exact_distribution(&exp)?;
    let diff = oracle_comparison(&exp, &dist);
    let csv = retained_csv(&dist, diff);
    if check {
        validate_float_csv(&csv, "m,theta_m,probability")?;
        println!("ok: retained-distribution CSV is valid");
        return Ok(());
    }
    let target = out.or(exp.output.distribution.as_deref());
    emit(target, &csv, "retained distribution")?;
    if target.is_some() {
        println!("success_probability {:.6e}", dist.success_probability());
        if let Some(diff) = diff {
            println!("max_abs_diff {diff:.6e}");
        }
    }
    Ok(())
}

pub fn cmd_sample(
    config_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    shots: Option<u64>,
    check: bool,
) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    let exp = prepare(config)?;
    let shots = shots.unwrap_or(exp.shots);
    if shots == 0 {
        return Err(CliError::Validation(
            "shots must be positive for sample".to_string(),
        ));
    }
    let seed = seed.or(exp.seed).ok_or_else(|| {
        CliError::Validation(
            "a seed is required: pass --seed or set seed in the config".to_string(),
        )
    })?;
    let histogram = sampled_histogram(&exp, shots, seed)?;
    let csv = histogram.to_csv();
    if check {
        validate_float_csv(&csv, "m,theta_m,count,frequency")?;
        println!("ok: histogram CSV is valid");
        return Ok(());
    }
    let target = out.or(exp.output.histogram.as_deref());
    emit(target, &csv, "histogram")?;
    if target.is_some() {
        println!(
            "retained {} of {shots} shots ({} discarded), rng {}",
            shots - histogram.discarded_count(),
            histogram.discarded_count(),
            histogram.rng_algorithm(),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Selftest
// ---------------------------------------------------------------------------

struct SuiteResult {
    name: &'static str,
    cases: usize,
    failures: usize,
}

fn identity_suite() -> SuiteResult {
    let mut rng = ChaCha12Rng::seed_from_u64(0x1D_5EED);
    let cases = 1000;
    let mut failures = 0;
    for _ in 0..cases {
        let n_grid = rng.gen_range(1..=10);
        let m = rng.gen_range(0..=n_grid);
        let x = Complex64::new(rng.gen::<f64>() * 14.0 - 7.0, rng.gen::<f64>() * 14.0 - 7.0);
        let y = Complex64::new(rng.gen::<f64>() * 14.0 - 7.0, rng.gen::<f64>() * 14.0 - 7.0);
        if identity_check(n_grid, x, y, m) >= 1e-9 {
            failures += 1;
        }
    }
    SuiteResult {
        name: "identity",
        cases,
        failures,
    }
}

fn permanent_suite() -> SuiteResult {
    let mut rng = ChaCha12Rng::seed_from_u64(0x9E_5EED);
    let mut cases = 0;
    let mut failures = 0;
    for size in 0..=7 {
        for _ in 0..25 {
            let matrix = ComplexMatrix::from_fn(size, size, |_, _| {
                Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
            });
            cases += 1;
            let fast = permanent(&matrix).expect("size within limits");
            let slow = permanent_naive(&matrix).expect("size within limits");
            if (fast - slow).norm() >= 1e-12 * slow.norm().max(1.0) {
                failures += 1;
            }
        }
    }
    SuiteResult {
        name: "permanent",
        cases,
        failures,
    }
}

fn random_multimode_state(
    modes: usize,
    max_photons: usize,
    rng: &mut ChaCha12Rng,
) -> MultimodeState {
    let mut terms = Vec::new();
    for _ in 0..4 {
        let total = rng.gen_range(0..=max_photons);
        let mut occupations = vec![0usize; modes];
        for _ in 0..total {
            occupations[rng.gen_range(0..modes)] += 1;
        }
        terms.push((
            FockPattern::new(occupations).expect("modes >= 1"),
            Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0),
        ));
    }
    MultimodeState::new(modes, terms).expect("random amplitudes are nonzero")
}

fn evolution_suite() -> SuiteResult {
    let mut rng = ChaCha12Rng::seed_from_u64(0xE0_5EED);
    let cases = 60;
    let mut failures = 0;
    for trial in 0..cases {
        let modes = 2 + trial % 4;
        let network = random_unitary(modes, rng.gen());
        let state = random_multimode_state(modes, 4, &mut rng);
        let fast = evolve(&network, &state).expect("within photon caps");
        let slow = brute_force_evolve(&network, &state).expect("within photon caps");
        if fast.max_amplitude_distance(&slow) >= 1e-10 {
            failures += 1;
        }
    }
    SuiteResult {
        name: "evolution",
        cases,
        failures,
    }
}

fn closed_form_suite(flip_kappa2_sign: bool) -> SuiteResult {
    let mut rng = ChaCha12Rng::seed_from_u64(0xCF_5EED);
    let mut cases = 0;
    let mut failures = 0;
    for n_grid in 1..=5 {
        let grid = PhaseGrid::new(n_grid);
        let network = pointer_network(&grid);
        for _ in 0..4 {
            let random_coeffs = |rng: &mut ChaCha12Rng, cutoff: usize| {
                let coefficients: Vec<Complex64> = (0..=cutoff)
                    .map(|_| {
                        Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
                    })
                    .collect();
                SingleModeState::new(coefficients).expect("nonzero")
            };
            let signal = random_coeffs(&mut rng, n_grid);
            let reference = random_coeffs(&mut rng, n_grid);
            let input = assemble_input(&signal, &reference, &grid).expect("two modes");
            let from_permanents = pointer_amplitudes(&network, &input).expect("within photon caps");
            for (m, expected) in from_permanents.iter().enumerate() {
                cases += 1;
                let mut closed = closed_form_pointer_amplitude(&signal, &reference, &grid, m)
                    .expect("m in range");
                if flip_kappa2_sign {
                    closed = -closed;
                }
                if (closed - expected).norm() >= 1e-10 {
                    failures += 1;
                }
            }
        }
    }
    SuiteResult {
        name: "closed-form",
        cases,
        failures,
    }
}

/// Runs the numerical cross-check sweeps and prints a pass/fail table.
/// Returns an error (exit code 3) if any suite fails.
pub fn cmd_selftest() -> Result<(), CliError> {
    let fault = std::env::var("PHASEPORT_SELFTEST_FAULT").ok();
    let flip_kappa2_sign = fault.as_deref() == Some("kappa2-sign");

    let suites = [
        identity_suite(),
        permanent_suite(),
        evolution_suite(),
        closed_form_suite(flip_kappa2_sign),
    ];

    println!("{:<12} {:>6} {:>9}  status", "suite", "cases", "failures");
    let mut all_ok = true;
    for suite in &suites {
        let ok = suite.failures == 0;
        all_ok &= ok;
        println!(
            "{:<12} {:>6} {:>9}  {}",
            suite.name,
            suite.cases,
            suite.failures,
            if ok { "pass" } else { "FAIL" }
        );
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Numeric("selftest failed".to_string()))
    }
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "phaseport",
    version,
    about = "Multiport phase-measurement simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the Fourier mode matrix as CSV of re,im pairs
    Matrix {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Validate the output format without writing
        #[arg(long)]
        check: bool,
    },
    /// Factor a network into a triangular beam-splitter array
    Decompose {
        /// Decompose the Fourier network of this dimension
        #[arg(long)]
        dim: Option<usize>,
        /// Decompose the network described by an existing netlist file
        #[arg(long = "netlist-in")]
        netlist_in: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Exact run: retained distribution CSV plus oracle comparison
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Monte Carlo run: histogram CSV
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        check: bool,
    },
    /// Run the built-in numerical cross-checks
    Selftest,
}

/// Parses arguments (`args[0]` is the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Validation(e.to_string())),
    };

    match cli.command {
        Command::Matrix { dim, out, check } => cmd_matrix(dim, out.as_deref(), check),
        Command::Decompose {
            dim,
            netlist_in,
            out,
            check,
        } => cmd_decompose(dim, netlist_in.as_deref(), out.as_deref(), check),
        Command::Simulate { config, out, check } => cmd_simulate(&config, out.as_deref(), check),
        Command::Sample {
            config,
            out,
            seed,
            shots,
            check,
        } => cmd_sample(&config, out.as_deref(), seed, shots, check),
        Command::Selftest => cmd_selftest(),
    }
}

/// Entry point for the binary: runs and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
