//! Mode-transformation matrices and their factorization into two-mode optics.
//!
//! A passive linear network on `dim` modes is described by a [`UnitaryMatrix`]
//! whose entry `(i, j)` is the amplitude for a photon entering input mode `j`
//! to leave in output mode `i`. Any such matrix can be realized as a
//! triangular array of beam splitters and phase shifters; [`decompose`]
//! produces that array and [`recompose`] multiplies it back out.
//!
//! The beam-splitter convention is fixed throughout the crate: the
//! transmitted amplitude is real non-negative (`t = √transmittance`), the
//! reflected amplitude carries a `+i` phase (symmetric convention), and each
//! element may apply an extra phase to its first input arm before the
//! splitter. A fully reflecting mirror is a beam splitter with
//! `transmittance = 0`, so the network algebra stays uniform.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::ops::Mul;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Maximum allowed deviation of `U·U†` from the identity, checked on
/// construction. Recomposition of a decomposed network accumulates error
/// below this for the dimensions this crate targets.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MultiportError {
    #[error("dimension must be at least 2")]
    InvalidDimension { dim: usize },
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    ShapeMismatch {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not unitary: max |U·U\u{2020} - I| = {deviation:.3e}")]
    NonUnitaryMatrix { deviation: f64 },
    #[error("mode index {mode} out of range for dimension {dim}")]
    ModeOutOfRange { mode: usize, dim: usize },
    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),
}

/// `omega^r` where `omega = exp(-i 2π / dim)`, with the quadrant cases
/// returned exactly so that e.g. the dim-4 transform has entries in
/// `{±1/2, ±i/2}` without rounding residue.
pub(crate) fn root_of_unity_pow(dim: usize, r: usize) -> Complex64 {
    let r = r % dim;
    if r == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * r == dim {
        Complex64::new(-1.0, 0.0)
    } else if 4 * r == dim {
        Complex64::new(0.0, -1.0)
    } else if 4 * r == 3 * dim {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::from_polar(1.0, -TAU * r as f64 / dim as f64)
    }
}

/// A `dim × dim` unitary mode transformation, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl UnitaryMatrix {
    /// Builds a matrix from row-major entries, rejecting anything that is not
    /// unitary to within [`UNITARITY_TOL`].
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, MultiportError> {
        if dim < 2 {
            return Err(MultiportError::InvalidDimension { dim });
        }
        if entries.len() != dim * dim {
            return Err(MultiportError::ShapeMismatch {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let m = Self { dim, entries };
        let deviation = m.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(MultiportError::NonUnitaryMatrix { deviation });
        }
        Ok(m)
    }

    pub fn from_fn(
        dim: usize,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self, MultiportError> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 2, "identity needs dim >= 2");
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Conjugate transpose. For a network this is the inverse transformation;
    /// it is also how a device specified by its creation-operator matrix acts
    /// on photon amplitudes (see [`crate::measurement::pointer_network`]).
    pub fn adjoint(&self) -> Self {
        let dim = self.dim;
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(self.get(j, i).conj());
            }
        }
        Self { dim, entries }
    }

    /// max |(U·U†)_{ij} - δ_{ij}|
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.dim;
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += self.get(i, k) * self.get(j, k).conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// max |A_{ij} - B_{ij}| over all entries.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max ||A_{ij}| - |B_{ij}|| over all entries.
    pub fn max_modulus_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    entries[i * dim + j] += a * rhs.get(k, j);
                }
            }
        }
        UnitaryMatrix { dim, entries }
    }
}

/// The discrete-Fourier mode transformation `U_{ij} = ω^{ij} / √dim` with
/// `ω = exp(-i 2π / dim)`.
pub fn dft_matrix(dim: usize) -> Result<UnitaryMatrix, MultiportError> {
    if dim < 2 {
        return Err(MultiportError::InvalidDimension { dim });
    }
    let scale = (1.0 / dim as f64).sqrt();
    UnitaryMatrix::from_fn(dim, |i, j| root_of_unity_pow(dim, (i * j) % dim) * scale)
}

/// Diagonal matrix applying `exp(i·phase)` to a single mode.
pub fn phase_shift_matrix(
    dim: usize,
    mode: usize,
    phase: f64,
) -> Result<UnitaryMatrix, MultiportError> {
    if dim < 2 {
        return Err(MultiportError::InvalidDimension { dim });
    }
    if mode >= dim {
        return Err(MultiportError::ModeOutOfRange { mode, dim });
    }
    UnitaryMatrix::from_fn(dim, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i == mode {
            Complex64::from_polar(1.0, phase)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Haar-like random unitary from Gram-Schmidt on a complex Gaussian matrix.
/// Deterministic for a fixed seed.
pub fn random_unitary(dim: usize, seed: u64) -> UnitaryMatrix {
    assert!(dim >= 2, "random_unitary needs dim >= 2");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    // Modified Gram-Schmidt, run twice for orthogonality at the 1e-14 level.
    for _pass in 0..2 {
        for j in 0..dim {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let corrections: Vec<Complex64> = cols[k].iter().map(|z| proj * z).collect();
                for (target, correction) in cols[j].iter_mut().zip(corrections) {
                    *target -= correction;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    UnitaryMatrix::from_fn(dim, |i, j| cols[j][i]).expect("Gram-Schmidt output is unitary")
}

/// One physical element of a triangular interferometer.
#[derive(Clone, Debug, PartialEq)]
pub enum InterferometerElement {
    /// Two-mode coupler. `transmittance` is the intensity transmission |t|²;
    /// `phase` is applied to the first listed mode before the splitter.
    BeamSplitter {
        modes: (usize, usize),
        transmittance: f64,
        phase: f64,
    },
    PhaseShifter {
        mode: usize,
        phase: f64,
    },
}

fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

impl InterferometerElement {
    pub fn beam_splitter(modes: (usize, usize), transmittance: f64, phase: f64) -> Self {
        Self::BeamSplitter {
            modes,
            transmittance,
            phase: normalize_phase(phase),
        }
    }

    pub fn phase_shifter(mode: usize, phase: f64) -> Self {
        Self::PhaseShifter {
            mode,
            phase: normalize_phase(phase),
        }
    }

    fn validate(&self, dim: usize) -> Result<(), MultiportError> {
        match *self {
            Self::BeamSplitter {
                modes: (p, q),
                transmittance,
                phase,
            } => {
                if p >= dim {
                    return Err(MultiportError::ModeOutOfRange { mode: p, dim });
                }
                if q >= dim {
                    return Err(MultiportError::ModeOutOfRange { mode: q, dim });
                }
                if p == q {
                    return Err(MultiportError::InvalidNetlist(format!(
                        "beam splitter modes must be distinct, got ({p}, {q})"
                    )));
                }
                if !(0.0..=1.0).contains(&transmittance) {
                    return Err(MultiportError::InvalidNetlist(format!(
                        "transmittance {transmittance} outside [0, 1]"
                    )));
                }
                if !(0.0..TAU).contains(&phase) {
                    return Err(MultiportError::InvalidNetlist(format!(
                        "phase {phase} outside [0, 2\u{3c0})"
                    )));
                }
                Ok(())
            }
            Self::PhaseShifter { mode, phase } => {
                if mode >= dim {
                    return Err(MultiportError::ModeOutOfRange { mode, dim });
                }
                if !(0.0..TAU).contains(&phase) {
                    return Err(MultiportError::InvalidNetlist(format!(
                        "phase {phase} outside [0, 2\u{3c0})"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// An ordered list of elements in the order the light traverses them;
/// [`recompose`] applies the first element first, so the recomposed matrix
/// is the photon-amplitude transfer of the whole array.
///
/// Decompositions place the residual per-mode phases as trailing
/// [`InterferometerElement::PhaseShifter`] entries. Sitting at the output
/// side, right before any detectors, those trailing shifters never affect
/// photocount statistics and can be dropped from a detector-terminated
/// device.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferometerNetlist {
    dim: usize,
    elements: Vec<InterferometerElement>,
}

impl InterferometerNetlist {
    pub fn new(dim: usize, elements: Vec<InterferometerElement>) -> Result<Self, MultiportError> {
        if dim < 2 {
            return Err(MultiportError::InvalidDimension { dim });
        }
        for element in &elements {
            element.validate(dim)?;
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[InterferometerElement] {
        &self.elements
    }

    pub fn beam_splitter_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, InterferometerElement::BeamSplitter { .. }))
            .count()
    }

    /// Intensity transmittances of the beam splitters, in traversal order.
    pub fn transmittances(&self) -> Vec<f64> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                InterferometerElement::BeamSplitter { transmittance, .. } => Some(*transmittance),
                InterferometerElement::PhaseShifter { .. } => None,
            })
            .collect()
    }

    /// Line-oriented text form: `DIM k` header, then one element per line
    /// (`BS i j transmittance phase` or `PS i phase`), reals with 17
    /// significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "DIM {}", self.dim);
        for element in &self.elements {
            match *element {
                InterferometerElement::BeamSplitter {
                    modes: (p, q),
                    transmittance,
                    phase,
                } => {
                    let _ = writeln!(out, "BS {p} {q} {transmittance:.16e} {phase:.16e}");
                }
                InterferometerElement::PhaseShifter { mode, phase } => {
                    let _ = writeln!(out, "PS {mode} {phase:.16e}");
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MultiportError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MultiportError::InvalidNetlist("empty netlist".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("DIM") {
            return Err(MultiportError::InvalidNetlist(format!(
                "expected 'DIM k' header, got '{header}'"
            )));
        }
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| MultiportError::InvalidNetlist("missing dimension in header".into()))?;

        let parse_real = |s: Option<&str>, line: &str| -> Result<f64, MultiportError> {
            s.and_then(|v| v.parse().ok())
                .ok_or_else(|| MultiportError::InvalidNetlist(format!("bad real in line '{line}'")))
        };
        let parse_mode = |s: Option<&str>, line: &str| -> Result<usize, MultiportError> {
            s.and_then(|v| v.parse().ok())
                .ok_or_else(|| MultiportError::InvalidNetlist(format!("bad mode in line '{line}'")))
        };

        let mut elements = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("BS") => {
                    let p = parse_mode(parts.next(), line)?;
                    let q = parse_mode(parts.next(), line)?;
                    let transmittance = parse_real(parts.next(), line)?;
                    let phase = parse_real(parts.next(), line)?;
                    elements.push(InterferometerElement::beam_splitter(
                        (p, q),
                        transmittance,
                        phase,
                    ));
                }
                Some("PS") => {
                    let mode = parse_mode(parts.next(), line)?;
                    let phase = parse_real(parts.next(), line)?;
                    elements.push(InterferometerElement::phase_shifter(mode, phase));
                }
                Some(other) => {
                    return Err(MultiportError::InvalidNetlist(format!(
                        "unknown element kind '{other}'"
                    )));
                }
                None => unreachable!("blank lines are filtered"),
            }
            if parts.next().is_some() {
                return Err(MultiportError::InvalidNetlist(format!(
                    "trailing fields in line '{line}'"
                )));
            }
        }
        Self::new(dim, elements)
    }
}

/// 2x2 block of a beam-splitter element, in the crate's convention.
fn beam_splitter_block(transmittance: f64, phase: f64) -> [Complex64; 4] {
    let t = transmittance.sqrt();
    let r = (1.0 - transmittance).max(0.0).sqrt();
    let input_phase = Complex64::from_polar(1.0, phase);
    let i_r = Complex64::new(0.0, r);
    [
        t * input_phase,
        i_r,
        i_r * input_phase,
        Complex64::new(t, 0.0),
    ]
}

/// Multiplies the elements out, first element applied first.
pub fn recompose(netlist: &InterferometerNetlist) -> Result<UnitaryMatrix, MultiportError> {
    let dim = netlist.dim;
    let mut entries = UnitaryMatrix::identity(dim).entries;
    for element in &netlist.elements {
        element.validate(dim)?;
        match *element {
            InterferometerElement::BeamSplitter {
                modes: (p, q),
                transmittance,
                phase,
            } => {
                let [e00, e01, e10, e11] = beam_splitter_block(transmittance, phase);
                for col in 0..dim {
                    let a = entries[p * dim + col];
                    let b = entries[q * dim + col];
                    entries[p * dim + col] = e00 * a + e01 * b;
                    entries[q * dim + col] = e10 * a + e11 * b;
                }
            }
            InterferometerElement::PhaseShifter { mode, phase } => {
                let factor = Complex64::from_polar(1.0, phase);
                for col in 0..dim {
                    entries[mode * dim + col] *= factor;
                }
            }
        }
    }
    UnitaryMatrix::new(dim, entries)
}

const NULLING_EPS: f64 = 1e-14;

/// Factors a unitary into a triangular array of `dim·(dim-1)/2` beam
/// splitters plus phase shifters: rows are nulled bottom-up, each row
/// left-to-right, against its right neighbour column. The residual diagonal
/// phases become trailing output-mode phase shifters, so
/// `recompose(decompose(U))` reproduces `U` to working precision.
pub fn decompose(matrix: &UnitaryMatrix) -> InterferometerNetlist {
    let dim = matrix.dim();
    let mut v = matrix.entries.clone();
    let mut elements = Vec::with_capacity(dim * (dim - 1) / 2 + dim);

    for row in (1..dim).rev() {
        for col in 0..row {
            let a = v[row * dim + col];
            let b = v[row * dim + col + 1];
            let (transmittance, phase) = if a.norm() < NULLING_EPS {
                (1.0, 0.0)
            } else if b.norm() < NULLING_EPS {
                (0.0, 0.0)
            } else {
                let t = b.norm_sqr() / (a.norm_sqr() + b.norm_sqr());
                let phi = a.arg() - b.arg() - std::f64::consts::FRAC_PI_2;
                (t, normalize_phase(phi))
            };
            elements.push(InterferometerElement::beam_splitter(
                (col, col + 1),
                transmittance,
                phase,
            ));

            // Right-multiply by the adjoint of the recorded element,
            // embedded on columns (col, col+1).
            let [e00, e01, e10, e11] = beam_splitter_block(transmittance, phase);
            let (g00, g01) = (e00.conj(), e10.conj());
            let (g10, g11) = (e01.conj(), e11.conj());
            for i in 0..dim {
                let x = v[i * dim + col];
                let y = v[i * dim + col + 1];
                v[i * dim + col] = x * g00 + y * g10;
                v[i * dim + col + 1] = x * g01 + y * g11;
            }
        }
    }

    for mode in 0..dim {
        let phase = normalize_phase(v[mode * dim + mode].arg());
        if phase.min(TAU - phase) > 1e-12 {
            elements.push(InterferometerElement::phase_shifter(mode, phase));
        }
    }

    InterferometerNetlist { dim, elements }
}
