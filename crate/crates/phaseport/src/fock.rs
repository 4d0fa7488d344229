//! Photon-number states on a fixed set of modes and their exact evolution
//! through a linear network.
//!
//! The amplitude to scatter a photon pattern `p` into a pattern `q` through a
//! network `U` is `per(U[q|p]) / √(∏ p_j! ∏ q_i!)`, where `U[q|p]` repeats
//! column `j` of `U` `p_j` times and row `i` `q_i` times. Equivalently,
//! [`evolve`] applies the substitution `a†_j → Σ_i U_ij a†_i` to every input
//! term. Both descriptions are implemented here: [`evolve`] drives matrix
//! permanents through a Gray-code Ryser kernel, while [`brute_force_evolve`]
//! expands the substitution monomial by monomial and shares no code with the
//! permanent path, so each can vouch for the other.
//!
//! Passive networks conserve photon number, so states evolve independently
//! within each fixed-total sector and the per-sector norm is preserved.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::combin::factorial;
use crate::multiport::UnitaryMatrix;

/// Hard cap on total photons for the permanent path (cost `2^n · n`).
pub const MAX_PERMANENT_SIZE: usize = 20;
/// Hard cap on total photons for the brute-force oracle (cost `modes^total`).
pub const MAX_BRUTE_FORCE_PHOTONS: usize = 8;
/// Terms with |amplitude| below this are dropped after evolution.
pub const AMPLITUDE_PRUNE_TOL: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("a photon pattern needs at least one mode")]
    EmptyPattern,
    #[error("permanent needs a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("size {size} exceeds the limit of {max}")]
    SizeLimit { size: usize, max: usize },
    #[error("photon number mismatch: input has {input}, output has {output}")]
    PhotonNumberMismatch { input: usize, output: usize },
    #[error("dimension mismatch: expected {expected} modes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state has no nonzero amplitude")]
    ZeroState,
}

/// Photons per mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockPattern(Vec<usize>);

impl FockPattern {
    pub fn new(occupations: Vec<usize>) -> Result<Self, FockError> {
        if occupations.is_empty() {
            return Err(FockError::EmptyPattern);
        }
        Ok(Self(occupations))
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::new(vec![0; modes]).expect("modes >= 1")
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for FockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// Sparse superposition of photon patterns with a fixed mode count.
/// Terms iterate in lexicographic pattern order, so every downstream
/// computation is reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct MultimodeState {
    modes: usize,
    terms: BTreeMap<FockPattern, Complex64>,
}

impl MultimodeState {
    /// Builds a state from (pattern, amplitude) terms and normalizes it.
    pub fn new(
        modes: usize,
        terms: impl IntoIterator<Item = (FockPattern, Complex64)>,
    ) -> Result<Self, FockError> {
        let mut map: BTreeMap<FockPattern, Complex64> = BTreeMap::new();
        for (pattern, amplitude) in terms {
            if pattern.modes() != modes {
                return Err(FockError::DimensionMismatch {
                    expected: modes,
                    got: pattern.modes(),
                });
            }
            *map.entry(pattern).or_insert(Complex64::new(0.0, 0.0)) += amplitude;
        }
        let norm_sqr: f64 = map.values().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return Err(FockError::ZeroState);
        }
        let scale = 1.0 / norm_sqr.sqrt();
        for amplitude in map.values_mut() {
            *amplitude *= scale;
        }
        Ok(Self { modes, terms: map })
    }

    pub fn from_pattern(pattern: FockPattern) -> Self {
        let modes = pattern.modes();
        let mut terms = BTreeMap::new();
        terms.insert(pattern, Complex64::new(1.0, 0.0));
        Self { modes, terms }
    }

    pub(crate) fn from_raw(modes: usize, terms: BTreeMap<FockPattern, Complex64>) -> Self {
        Self { modes, terms }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockPattern, Complex64)> {
        self.terms.iter().map(|(p, a)| (p, *a))
    }

    pub fn amplitude(&self, pattern: &FockPattern) -> Complex64 {
        self.terms
            .get(pattern)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.terms
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.modes, other.modes, "mode count mismatch");
        self.terms
            .iter()
            .map(|(p, a)| a.conj() * other.amplitude(p))
            .sum()
    }

    /// Largest |amplitude difference| over the union of both term sets.
    pub fn max_amplitude_distance(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (p, a) in self.terms() {
            worst = worst.max((a - other.amplitude(p)).norm());
        }
        for (p, a) in other.terms() {
            worst = worst.max((a - self.amplitude(p)).norm());
        }
        worst
    }
}

/// Free-form complex matrix, the permanent kernel input.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }
}

/// Matrix permanent by Ryser's formula with Gray-code subset updates,
/// `O(2^n · n)`. The permanent of the empty matrix is 1.
pub fn permanent(matrix: &ComplexMatrix) -> Result<Complex64, FockError> {
    if matrix.rows != matrix.cols {
        return Err(FockError::NonSquare {
            rows: matrix.rows,
            cols: matrix.cols,
        });
    }
    let n = matrix.rows;
    if n > MAX_PERMANENT_SIZE {
        return Err(FockError::SizeLimit {
            size: n,
            max: MAX_PERMANENT_SIZE,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev_gray: u64 = 0;
    for t in 1..(1u64 << n) {
        let gray = t ^ (t >> 1);
        let changed = gray ^ prev_gray;
        let col = changed.trailing_zeros() as usize;
        if gray & changed != 0 {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += matrix.get(i, col);
            }
        } else {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= matrix.get(i, col);
            }
        }
        let mut product = Complex64::new(1.0, 0.0);
        for sum in &row_sums {
            product *= *sum;
        }
        // (-1)^n (-1)^{|S|}
        if (n as u32).wrapping_sub(gray.count_ones()) % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
        prev_gray = gray;
    }
    Ok(total)
}

/// Permanent by direct expansion over permutations, `O(n · n!)`. Test oracle
/// for [`permanent`]; kept independent of the Ryser path on purpose.
pub fn permanent_naive(matrix: &ComplexMatrix) -> Result<Complex64, FockError> {
    const MAX_NAIVE: usize = 10;
    if matrix.rows != matrix.cols {
        return Err(FockError::NonSquare {
            rows: matrix.rows,
            cols: matrix.cols,
        });
    }
    let n = matrix.rows;
    if n > MAX_NAIVE {
        return Err(FockError::SizeLimit {
            size: n,
            max: MAX_NAIVE,
        });
    }

    fn expand(matrix: &ComplexMatrix, row: usize, used: u32) -> Complex64 {
        let n = matrix.rows();
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if used & (1 << col) == 0 {
                acc += matrix.get(row, col) * expand(matrix, row + 1, used | (1 << col));
            }
        }
        acc
    }

    Ok(expand(matrix, 0, 0))
}

fn expand_indices(pattern: &FockPattern) -> Vec<usize> {
    let mut indices = Vec::with_capacity(pattern.total());
    for (mode, &count) in pattern.occupations().iter().enumerate() {
        indices.extend(std::iter::repeat_n(mode, count));
    }
    indices
}

/// Scattering amplitude `⟨output| network |input⟩` for a single pair of
/// photon patterns.
///
/// Asking for an amplitude between different photon totals is a caller bug
/// (passive networks conserve photon number) and returns
/// [`FockError::PhotonNumberMismatch`] rather than zero.
pub fn transition_amplitude(
    network: &UnitaryMatrix,
    input: &FockPattern,
    output: &FockPattern,
) -> Result<Complex64, FockError> {
    if input.modes() != network.dim() {
        return Err(FockError::DimensionMismatch {
            expected: network.dim(),
            got: input.modes(),
        });
    }
    if output.modes() != network.dim() {
        return Err(FockError::DimensionMismatch {
            expected: network.dim(),
            got: output.modes(),
        });
    }
    let total = input.total();
    if total != output.total() {
        return Err(FockError::PhotonNumberMismatch {
            input: total,
            output: output.total(),
        });
    }
    if total > MAX_PERMANENT_SIZE {
        return Err(FockError::SizeLimit {
            size: total,
            max: MAX_PERMANENT_SIZE,
        });
    }

    let row_modes = expand_indices(output);
    let col_modes = expand_indices(input);
    let sub = ComplexMatrix::from_fn(total, total, |i, j| network.get(row_modes[i], col_modes[j]));
    let per = permanent(&sub)?;

    let mut norm_sqr = 1.0;
    for &n in input.occupations() {
        norm_sqr *= factorial(n);
    }
    for &n in output.occupations() {
        norm_sqr *= factorial(n);
    }
    Ok(per / norm_sqr.sqrt())
}

/// All patterns of `total` photons over `modes` modes, lexicographic,
/// `C(total + modes - 1, modes - 1)` of them.
pub fn enumerate_sector(modes: usize, total: usize) -> Vec<FockPattern> {
    assert!(modes >= 1, "need at least one mode");
    fn build(modes: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<FockPattern>) {
        if modes == 1 {
            prefix.push(total);
            out.push(FockPattern(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            build(modes - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    build(modes, total, &mut Vec::new(), &mut out);
    out
}

fn check_evolution_input(
    network: &UnitaryMatrix,
    state: &MultimodeState,
    max_photons: usize,
) -> Result<(), FockError> {
    if state.modes() != network.dim() {
        return Err(FockError::DimensionMismatch {
            expected: network.dim(),
            got: state.modes(),
        });
    }
    for (pattern, _) in state.terms() {
        let total = pattern.total();
        if total > max_photons {
            return Err(FockError::SizeLimit {
                size: total,
                max: max_photons,
            });
        }
    }
    Ok(())
}

/// Evolves a state through the network: the output amplitude of pattern `q`
/// is `Σ_p c_p · transition_amplitude(U, p, q)`, summed within each
/// photon-number sector. Terms below [`AMPLITUDE_PRUNE_TOL`] are dropped.
pub fn evolve(
    network: &UnitaryMatrix,
    state: &MultimodeState,
) -> Result<MultimodeState, FockError> {
    check_evolution_input(network, state, MAX_PERMANENT_SIZE)?;
    let modes = state.modes();

    let mut sectors: BTreeMap<usize, Vec<(&FockPattern, Complex64)>> = BTreeMap::new();
    for (pattern, amplitude) in state.terms() {
        sectors
            .entry(pattern.total())
            .or_default()
            .push((pattern, amplitude));
    }

    let mut result = BTreeMap::new();
    for (&total, inputs) in &sectors {
        for target in enumerate_sector(modes, total) {
            let mut amplitude = Complex64::new(0.0, 0.0);
            for &(pattern, coefficient) in inputs {
                amplitude += coefficient * transition_amplitude(network, pattern, &target)?;
            }
            if amplitude.norm() >= AMPLITUDE_PRUNE_TOL {
                result.insert(target, amplitude);
            }
        }
    }
    Ok(MultimodeState::from_raw(modes, result))
}

/// Independent evolution oracle: applies `a†_j → Σ_i U_ij a†_i` one photon at
/// a time and collects terms. Costs `modes^total` per input term, capped at
/// [`MAX_BRUTE_FORCE_PHOTONS`] photons. Shares no code with the permanent
/// path.
pub fn brute_force_evolve(
    network: &UnitaryMatrix,
    state: &MultimodeState,
) -> Result<MultimodeState, FockError> {
    check_evolution_input(network, state, MAX_BRUTE_FORCE_PHOTONS)?;
    let modes = state.modes();

    let mut result: BTreeMap<FockPattern, Complex64> = BTreeMap::new();
    for (pattern, coefficient) in state.terms() {
        // Image of the monomial ∏_j (a†_j)^{p_j} |vac⟩ under the substitution.
        let mut image: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        image.insert(vec![0; modes], Complex64::new(1.0, 0.0));
        for (j, &count) in pattern.occupations().iter().enumerate() {
            for _ in 0..count {
                let mut next: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
                for (occ, weight) in &image {
                    for i in 0..modes {
                        let gain = network.get(i, j) * ((occ[i] + 1) as f64).sqrt();
                        if gain.norm_sqr() == 0.0 {
                            continue;
                        }
                        let mut bumped = occ.clone();
                        bumped[i] += 1;
                        *next.entry(bumped).or_insert(Complex64::new(0.0, 0.0)) += weight * gain;
                    }
                }
                image = next;
            }
        }
        let mut monomial_norm = 1.0;
        for &n in pattern.occupations() {
            monomial_norm *= factorial(n);
        }
        let scale = coefficient / monomial_norm.sqrt();
        for (occ, weight) in image {
            let entry = result
                .entry(FockPattern(occ))
                .or_insert(Complex64::new(0.0, 0.0));
            *entry += scale * weight;
        }
    }
    result.retain(|_, amplitude| amplitude.norm() >= AMPLITUDE_PRUNE_TOL);
    Ok(MultimodeState::from_raw(modes, result))
}
