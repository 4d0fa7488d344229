//! Detector-side of the apparatus: outcome classification, exact
//! post-selected statistics, detector imperfections, and Monte Carlo
//! sampling.
//!
//! The detectors only distinguish zero, one, and many photons per mode. A
//! run is *retained* exactly when every output mode fires once except a
//! single silent mode `m`; that silent detector is the digital pointer and
//! indicates the phase value `θ_m`. Every other pattern is discarded and the
//! statistics are renormalized over the retained events, which is what
//! [`retained_distribution`] computes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::combin::binomial;
use crate::fock::{evolve, transition_amplitude, FockError, FockPattern, MultimodeState};
use crate::multiport::{dft_matrix, UnitaryMatrix};
use crate::states::PhaseGrid;

/// Counter-based generator used for all sampling; recorded so histograms can
/// state how they were produced. Reproducibility is guaranteed per build.
pub const RNG_ALGORITHM: &str = "chacha12";

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("detector efficiency must lie in (0, 1], got {eta}")]
    InvalidEta { eta: f64 },
    #[error("no pointer event has nonzero probability; the retained distribution is undefined")]
    ZeroSuccess,
    #[error("dimension mismatch: expected {expected} modes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// What a single photodetector can report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhotonCount {
    Zero,
    One,
    Many,
}

/// Per-mode detector readings for one shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectorReading(Vec<PhotonCount>);

impl DetectorReading {
    pub fn from_pattern(pattern: &FockPattern) -> Self {
        Self(
            pattern
                .occupations()
                .iter()
                .map(|&n| match n {
                    0 => PhotonCount::Zero,
                    1 => PhotonCount::One,
                    _ => PhotonCount::Many,
                })
                .collect(),
        )
    }

    pub fn counts(&self) -> &[PhotonCount] {
        &self.0
    }

    /// Pointer iff exactly one mode is silent and every other fired once.
    pub fn outcome(&self) -> Outcome {
        let mut silent = None;
        for (mode, &count) in self.0.iter().enumerate() {
            match count {
                PhotonCount::Zero => {
                    if silent.is_some() {
                        return Outcome::Discarded;
                    }
                    silent = Some(mode);
                }
                PhotonCount::One => {}
                PhotonCount::Many => return Outcome::Discarded,
            }
        }
        match silent {
            Some(mode) => Outcome::Pointer(mode),
            None => Outcome::Discarded,
        }
    }
}

/// Result of one shot after classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The silent detector sat in output mode `m`: measured phase `θ_m`.
    Pointer(usize),
    /// Not a pointer pattern; the shot is dropped from the statistics.
    Discarded,
}

pub fn classify(pattern: &FockPattern) -> Outcome {
    DetectorReading::from_pattern(pattern).outcome()
}

/// The retained pattern with the silent detector at `m`: one photon in every
/// mode except `m`.
pub fn pointer_pattern(modes: usize, m: usize) -> FockPattern {
    assert!(m < modes, "pointer index out of range");
    let mut occupations = vec![1usize; modes];
    occupations[m] = 0;
    FockPattern::new(occupations).expect("modes >= 1")
}

/// Photon-amplitude transfer matrix of the phase-pointer interferometer.
///
/// The device is defined by how it transforms creation operators: inside the
/// network `a†_j → Σ_i U_ij a†_i` with `U` the discrete Fourier matrix
/// `ω^{ij}/√(N+1)`, `ω = exp(-i 2π/(N+1))`. Photon *amplitudes* then
/// transform with `U†` (the inverse Fourier transform), which is the matrix
/// returned here and fed to [`crate::fock::evolve`]. This orientation is
/// what makes the silent detector `m` indicate `θ_m`; evolving amplitudes
/// with the forward Fourier matrix instead would relabel the bins
/// `m → N+1-m`.
pub fn pointer_network(grid: &PhaseGrid) -> UnitaryMatrix {
    assert!(grid.n() >= 1, "the apparatus needs at least two modes");
    dft_matrix(grid.modes()).expect("modes >= 2").adjoint()
}

/// Amplitudes of the `N+1` pointer events for an input state sent through
/// `network`. Only the `N`-photon sector of the input contributes.
pub fn pointer_amplitudes(
    network: &UnitaryMatrix,
    input: &MultimodeState,
) -> Result<Vec<Complex64>, MeasurementError> {
    let modes = network.dim();
    if input.modes() != modes {
        return Err(MeasurementError::DimensionMismatch {
            expected: modes,
            got: input.modes(),
        });
    }
    let photons = modes - 1;
    let mut amplitudes = Vec::with_capacity(modes);
    for m in 0..modes {
        let target = pointer_pattern(modes, m);
        let mut amplitude = Complex64::new(0.0, 0.0);
        for (pattern, coefficient) in input.terms() {
            if pattern.total() == photons {
                amplitude += coefficient * transition_amplitude(network, pattern, &target)?;
            }
        }
        amplitudes.push(amplitude);
    }
    Ok(amplitudes)
}

/// The phase distribution over retained events only.
#[derive(Clone, Debug, PartialEq)]
pub struct RetainedDistribution {
    grid: PhaseGrid,
    probabilities: Vec<f64>,
    success_probability: f64,
}

impl RetainedDistribution {
    pub fn new(
        grid: PhaseGrid,
        unnormalized: Vec<f64>,
        success_probability: f64,
    ) -> Result<Self, MeasurementError> {
        assert_eq!(unnormalized.len(), grid.modes(), "one bin per phase value");
        let total: f64 = unnormalized.iter().sum();
        if total <= 0.0 {
            return Err(MeasurementError::ZeroSuccess);
        }
        Ok(Self {
            grid,
            probabilities: unnormalized.into_iter().map(|p| p / total).collect(),
            success_probability,
        })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, m: usize) -> f64 {
        self.probabilities[m]
    }

    /// Total probability mass of retained events before conditioning.
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    pub fn max_probability_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.probabilities.len(), other.probabilities.len());
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact Born-rule probabilities of every output pattern (not just the
/// retained ones), keyed by pattern. Patterns whose amplitude was pruned as
/// numerically zero are absent from the map.
pub fn outcome_distribution(
    network: &UnitaryMatrix,
    input: &MultimodeState,
) -> Result<BTreeMap<FockPattern, f64>, MeasurementError> {
    let evolved = evolve(network, input)?;
    Ok(evolved
        .terms()
        .map(|(pattern, amplitude)| (pattern.clone(), amplitude.norm_sqr()))
        .collect())
}

/// Post-selected phase statistics of the apparatus: `Pr(θ_m) =
/// P(pointer m) / Σ_p P(pointer p)`. Fails with
/// [`MeasurementError::ZeroSuccess`] when no pointer event can occur.
pub fn retained_distribution(
    network: &UnitaryMatrix,
    input: &MultimodeState,
) -> Result<RetainedDistribution, MeasurementError> {
    let amplitudes = pointer_amplitudes(network, input)?;
    let pointer_probs: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let success: f64 = pointer_probs.iter().sum();
    RetainedDistribution::new(PhaseGrid::new(network.dim() - 1), pointer_probs, success)
}

/// Classify-then-normalize reduction of a full outcome map; agrees with
/// [`retained_distribution`] on the same network and input.
pub fn retained_from_outcomes(
    outcomes: &BTreeMap<FockPattern, f64>,
    modes: usize,
) -> Result<RetainedDistribution, MeasurementError> {
    let mut pointer_probs = vec![0.0; modes];
    for (pattern, &probability) in outcomes {
        if let Outcome::Pointer(m) = classify(pattern) {
            pointer_probs[m] += probability;
        }
    }
    let success: f64 = pointer_probs.iter().sum();
    RetainedDistribution::new(PhaseGrid::new(modes - 1), pointer_probs, success)
}

/// Per-photon Bernoulli loss applied to an outcome map before
/// classification: each photon independently reaches the detector with
/// probability `eta`, so each mode's count thins binomially.
pub fn apply_detector_efficiency(
    outcomes: &BTreeMap<FockPattern, f64>,
    eta: f64,
) -> Result<BTreeMap<FockPattern, f64>, MeasurementError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(MeasurementError::InvalidEta { eta });
    }
    if eta == 1.0 {
        return Ok(outcomes.clone());
    }
    let mut thinned: BTreeMap<FockPattern, f64> = BTreeMap::new();
    for (pattern, &probability) in outcomes {
        let occupations = pattern.occupations();
        let mut partial: Vec<(Vec<usize>, f64)> =
            vec![(Vec::with_capacity(occupations.len()), probability)];
        for &count in occupations {
            let mut next = Vec::with_capacity(partial.len() * (count + 1));
            for (prefix, weight) in &partial {
                for kept in 0..=count {
                    let w = binomial(count, kept)
                        * eta.powi(kept as i32)
                        * (1.0 - eta).powi((count - kept) as i32);
                    let mut extended = prefix.clone();
                    extended.push(kept);
                    next.push((extended, weight * w));
                }
            }
            partial = next;
        }
        for (occ, weight) in partial {
            *thinned
                .entry(FockPattern::new(occ).expect("same mode count"))
                .or_insert(0.0) += weight;
        }
    }
    Ok(thinned)
}

/// Tallied shots over the phase bins, plus the discard count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    grid: PhaseGrid,
    counts: Vec<u64>,
    discarded_count: u64,
    total_shots: u64,
    seed: u64,
}

impl Histogram {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn discarded_count(&self) -> u64 {
        self.discarded_count
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng_algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    /// Relative frequency among retained shots.
    pub fn frequency(&self, m: usize) -> f64 {
        let retained = self.total_shots - self.discarded_count;
        if retained == 0 {
            0.0
        } else {
            self.counts[m] as f64 / retained as f64
        }
    }

    /// CSV form: header `m,theta_m,count,frequency`, one row per bin, footer
    /// rows `discarded,<count>` and `seed,<seed>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,theta_m,count,frequency\n");
        for m in 0..self.grid.modes() {
            let _ = writeln!(
                out,
                "{m},{theta:.16e},{count},{freq:.16e}",
                theta = self.grid.theta(m),
                count = self.counts[m],
                freq = self.frequency(m),
            );
        }
        let _ = writeln!(out, "discarded,{}", self.discarded_count);
        let _ = writeln!(out, "seed,{}", self.seed);
        out
    }
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn draw(cumulative: &[f64], rng: &mut ChaCha12Rng) -> usize {
    let total = *cumulative.last().expect("nonempty distribution");
    let r = rng.gen::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= r)
        .min(cumulative.len() - 1)
}

/// Samples the retained distribution directly. Every shot lands in a phase
/// bin, so the discard count is zero.
pub fn sample_retained(distribution: &RetainedDistribution, shots: u64, seed: u64) -> Histogram {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let cum = cumulative(distribution.probabilities().iter().copied());
    let mut counts = vec![0u64; distribution.grid().modes()];
    for _ in 0..shots {
        counts[draw(&cum, &mut rng)] += 1;
    }
    Histogram {
        grid: *distribution.grid(),
        counts,
        discarded_count: 0,
        total_shots: shots,
        seed,
    }
}

/// Samples the full outcome map, classifying each drawn pattern and tallying
/// non-pointer shots as discarded.
pub fn sample_outcomes(
    outcomes: &BTreeMap<FockPattern, f64>,
    modes: usize,
    shots: u64,
    seed: u64,
) -> Histogram {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let classified: Vec<Outcome> = outcomes.keys().map(classify).collect();
    let cum = cumulative(outcomes.values().copied());
    let mut counts = vec![0u64; modes];
    let mut discarded_count = 0u64;
    for _ in 0..shots {
        match classified[draw(&cum, &mut rng)] {
            Outcome::Pointer(m) => counts[m] += 1,
            Outcome::Discarded => discarded_count += 1,
        }
    }
    Histogram {
        grid: PhaseGrid::new(modes - 1),
        counts,
        discarded_count,
        total_shots: shots,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiport::UnitaryMatrix;
    use crate::states::{
        assemble_input, binomial_reference, number_state, theta_state, SingleModeState,
    };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pattern(occ: &[usize]) -> FockPattern {
        FockPattern::new(occ.to_vec()).unwrap()
    }

    #[test]
    fn classify_pinned_cases() {
        assert_eq!(classify(&pattern(&[1, 0, 1, 1])), Outcome::Pointer(1));
        assert_eq!(classify(&pattern(&[0, 0, 1, 1])), Outcome::Discarded);
        assert_eq!(classify(&pattern(&[2, 0, 1, 1])), Outcome::Discarded);
        assert_eq!(classify(&pattern(&[1, 1, 1, 1])), Outcome::Discarded);
        assert_eq!(classify(&pattern(&[0, 1])), Outcome::Pointer(0));
    }

    #[test]
    fn detector_reading_saturates_at_many() {
        let reading = DetectorReading::from_pattern(&pattern(&[0, 1, 5]));
        assert_eq!(
            reading.counts(),
            &[PhotonCount::Zero, PhotonCount::One, PhotonCount::Many]
        );
    }

    #[test]
    fn outcome_distribution_identity_and_vacuum() {
        let u = UnitaryMatrix::identity(3);
        let input = MultimodeState::from_pattern(pattern(&[1, 0, 2]));
        let dist = outcome_distribution(&u, &input).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist[&pattern(&[1, 0, 2])] - 1.0).abs() < 1e-12);

        let vacuum = MultimodeState::from_pattern(FockPattern::vacuum(3));
        let u = crate::multiport::random_unitary(3, 5);
        let dist = outcome_distribution(&u, &vacuum).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist[&FockPattern::vacuum(3)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_distribution_two_photon_interference() {
        let u = dft_matrix(2).unwrap();
        let input = MultimodeState::from_pattern(pattern(&[1, 1]));
        let dist = outcome_distribution(&u, &input).unwrap();
        assert!((dist[&pattern(&[2, 0])] - 0.5).abs() < 1e-12);
        assert!((dist[&pattern(&[0, 2])] - 0.5).abs() < 1e-12);
        assert!(dist.get(&pattern(&[1, 1])).copied().unwrap_or(0.0) < 1e-20);
        let total: f64 = dist.values().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn retained_theta_state_is_deterministic_pointer() {
        let grid = PhaseGrid::new(3);
        let network = pointer_network(&grid);
        let reference = binomial_reference(3);
        for k in 0..=3 {
            let signal = theta_state(&grid, k).unwrap();
            let input = assemble_input(&signal, &reference, &grid).unwrap();
            let retained = retained_distribution(&network, &input).unwrap();
            for m in 0..=3 {
                let expected = if m == k { 1.0 } else { 0.0 };
                assert!(
                    (retained.probability(m) - expected).abs() < 1e-10,
                    "k={k} m={m}: {}",
                    retained.probability(m)
                );
            }
        }
    }

    #[test]
    fn retained_vacuum_signal_is_uniform() {
        let grid = PhaseGrid::new(3);
        let network = pointer_network(&grid);
        let input =
            assemble_input(&number_state(0, 0).unwrap(), &binomial_reference(3), &grid).unwrap();
        let retained = retained_distribution(&network, &input).unwrap();
        for m in 0..=3 {
            assert!((retained.probability(m) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn retained_equal_superposition_pinned_values() {
        let grid = PhaseGrid::new(3);
        let network = pointer_network(&grid);
        let signal = SingleModeState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let input = assemble_input(&signal, &binomial_reference(3), &grid).unwrap();
        let retained = retained_distribution(&network, &input).unwrap();
        let expected = [0.5, 0.25, 0.0, 0.25];
        for (m, e) in expected.iter().enumerate() {
            assert!(
                (retained.probability(m) - e).abs() < 1e-10,
                "m={m}: {}",
                retained.probability(m)
            );
        }
    }

    #[test]
    fn zero_success_is_an_error() {
        let grid = PhaseGrid::new(1);
        let network = pointer_network(&grid);
        let vacuum = number_state(0, 0).unwrap();
        let input = assemble_input(&vacuum, &vacuum, &grid).unwrap();
        assert!(matches!(
            retained_distribution(&network, &input),
            Err(MeasurementError::ZeroSuccess)
        ));
    }

    #[test]
    fn conditioning_paths_agree() {
        let grid = PhaseGrid::new(2);
        let network = pointer_network(&grid);
        let signal = SingleModeState::new(vec![c(0.4, 0.1), c(0.7, -0.2), c(0.1, 0.5)]).unwrap();
        let input = assemble_input(&signal, &binomial_reference(2), &grid).unwrap();
        let direct = retained_distribution(&network, &input).unwrap();
        let outcomes = outcome_distribution(&network, &input).unwrap();
        let reduced = retained_from_outcomes(&outcomes, 3).unwrap();
        assert!(direct.max_probability_distance(&reduced) < 1e-12);
        assert!((direct.success_probability() - reduced.success_probability()).abs() < 1e-12);
    }

    #[test]
    fn efficiency_one_is_identity() {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(pattern(&[1, 2]), 0.75);
        outcomes.insert(pattern(&[0, 0]), 0.25);
        let thinned = apply_detector_efficiency(&outcomes, 1.0).unwrap();
        assert_eq!(thinned, outcomes);
    }

    #[test]
    fn efficiency_pinned_binomial_thinning() {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(pattern(&[1, 0]), 1.0);
        let thinned = apply_detector_efficiency(&outcomes, 0.5).unwrap();
        assert!((thinned[&pattern(&[1, 0])] - 0.5).abs() < 1e-12);
        assert!((thinned[&pattern(&[0, 0])] - 0.5).abs() < 1e-12);

        let mut outcomes = BTreeMap::new();
        outcomes.insert(pattern(&[2, 0]), 1.0);
        let thinned = apply_detector_efficiency(&outcomes, 0.5).unwrap();
        assert!((thinned[&pattern(&[2, 0])] - 0.25).abs() < 1e-12);
        assert!((thinned[&pattern(&[1, 0])] - 0.5).abs() < 1e-12);
        assert!((thinned[&pattern(&[0, 0])] - 0.25).abs() < 1e-12);
        let total: f64 = thinned.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn efficiency_rejects_bad_eta() {
        let outcomes = BTreeMap::new();
        assert!(matches!(
            apply_detector_efficiency(&outcomes, 0.0),
            Err(MeasurementError::InvalidEta { .. })
        ));
        assert!(matches!(
            apply_detector_efficiency(&outcomes, 1.5),
            Err(MeasurementError::InvalidEta { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let grid = PhaseGrid::new(3);
        let dist = RetainedDistribution::new(grid, vec![0.5, 0.25, 0.0, 0.25], 1.0).unwrap();
        let a = sample_retained(&dist, 10_000, 99);
        let b = sample_retained(&dist, 10_000, 99);
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let different = sample_retained(&dist, 10_000, 100);
        assert_ne!(a.counts(), different.counts());
    }

    #[test]
    fn concentrated_distribution_lands_in_one_bin() {
        let grid = PhaseGrid::new(2);
        let dist = RetainedDistribution::new(grid, vec![0.0, 1.0, 0.0], 1.0).unwrap();
        let histogram = sample_retained(&dist, 5_000, 7);
        assert_eq!(histogram.counts(), &[0, 5_000, 0]);
        assert_eq!(histogram.discarded_count(), 0);
    }

    #[test]
    fn sampled_frequencies_pass_chi_square() {
        let grid = PhaseGrid::new(3);
        let probs = [0.5, 0.25, 0.0, 0.25];
        let dist = RetainedDistribution::new(grid, probs.to_vec(), 1.0).unwrap();
        let shots = 100_000u64;
        let histogram = sample_retained(&dist, shots, 424_242);
        let mut chi_square = 0.0;
        for (m, &p) in probs.iter().enumerate() {
            let expected = p * shots as f64;
            if expected > 0.0 {
                let observed = histogram.counts()[m] as f64;
                chi_square += (observed - expected).powi(2) / expected;
            } else {
                assert_eq!(histogram.counts()[m], 0);
            }
        }
        // 99.9% critical value for 3 degrees of freedom
        assert!(chi_square < 16.27, "chi-square statistic {chi_square}");
    }

    #[test]
    fn sample_outcomes_tallies_discards() {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(pattern(&[1, 0, 1]), 0.3); // pointer 1
        outcomes.insert(pattern(&[2, 0, 0]), 0.7); // discarded
        let histogram = sample_outcomes(&outcomes, 3, 20_000, 5);
        assert_eq!(
            histogram.counts().iter().sum::<u64>() + histogram.discarded_count(),
            20_000
        );
        assert!(histogram.discarded_count() > 12_000);
        assert!(histogram.counts()[1] > 4_000);
        assert_eq!(histogram.counts()[0], 0);
        assert_eq!(histogram.counts()[2], 0);
    }

    #[test]
    fn histogram_csv_layout() {
        let grid = PhaseGrid::new(1);
        let dist = RetainedDistribution::new(grid, vec![1.0, 1.0], 0.5).unwrap();
        let histogram = sample_retained(&dist, 10, 3);
        let csv = histogram.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,theta_m,count,frequency");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,0"));
        assert!(lines[3].starts_with("discarded,"));
        assert_eq!(lines[4], "seed,3");
    }
}
