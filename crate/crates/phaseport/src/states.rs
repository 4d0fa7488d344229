//! Single-mode field states and the assembled multimode input of the
//! measurement apparatus.
//!
//! The pointer scheme works on a discrete phase lattice: for a chosen `N`
//! there are `N + 1` phase values `θ_m = m · 2π/(N+1)` and an orthonormal
//! family of truncated phase states `|θ_m⟩ = (N+1)^{-1/2} Σ_n e^{i n θ_m}
//! |n⟩` over photon numbers `n = 0…N`. [`PhaseGrid`] carries that lattice
//! and its root of unity `ω = exp(-i 2π/(N+1))`.
//!
//! Constructors auto-normalize and set a flag when the input coefficients
//! were off by more than 1e-6, so sloppy configs are accepted but visible.
//! Global phase is left untouched.

use num_complex::Complex64;
use thiserror::Error;

use crate::combin::binomial;
use crate::fock::{FockPattern, MultimodeState};
use crate::multiport::root_of_unity_pow;

/// Coherent-state truncation must leave less than this much probability
/// beyond the cutoff; chosen well below every tolerance used downstream.
pub const COHERENT_TAIL_TOL: f64 = 1e-8;

/// Constructors flag (but accept) inputs whose norm misses 1 by more than this.
pub const NORM_WARN_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum StatesError {
    #[error("phase index {m} out of range 0..={max}")]
    PhaseIndexOutOfRange { m: usize, max: usize },
    #[error("cutoff {cutoff} leaves a truncation tail of {tail:.3e} (limit {limit:.0e})")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        limit: f64,
    },
    #[error("cutoff {cutoff} is below the photon number {n}")]
    CutoffBelowPhotonNumber { cutoff: usize, n: usize },
    #[error("state coefficients must not all be zero")]
    InvalidState,
    #[error("the apparatus needs at least two modes (N >= 1)")]
    NeedAtLeastTwoModes,
}

/// The discrete phase lattice for a given `N`: spacing `δθ = 2π/(N+1)`,
/// values `θ_m = m·δθ`, root of unity `ω = exp(-i·δθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseGrid {
    n: usize,
}

impl PhaseGrid {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// The grid parameter `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of modes and of phase values, `N + 1`.
    pub fn modes(&self) -> usize {
        self.n + 1
    }

    pub fn delta_theta(&self) -> f64 {
        std::f64::consts::TAU / self.modes() as f64
    }

    pub fn theta(&self, m: usize) -> f64 {
        assert!(m <= self.n, "phase index out of range");
        m as f64 * self.delta_theta()
    }

    /// `ω^k` with the exponent reduced exactly modulo `N + 1`.
    pub fn omega_pow(&self, k: i64) -> Complex64 {
        let modes = self.modes() as i64;
        root_of_unity_pow(self.modes(), k.rem_euclid(modes) as usize)
    }

    pub fn omega(&self) -> Complex64 {
        self.omega_pow(1)
    }
}

/// Complex coefficients over photon numbers `0..=cutoff` of one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleModeState {
    coefficients: Vec<Complex64>,
    renormalized: bool,
}

impl SingleModeState {
    /// Builds a state from raw coefficients, normalizing them. This is the
    /// `custom` constructor used for config-supplied states.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self, StatesError> {
        let norm_sqr: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr == 0.0 || coefficients.is_empty() {
            return Err(StatesError::InvalidState);
        }
        let norm = norm_sqr.sqrt();
        let renormalized = (norm - 1.0).abs() > NORM_WARN_TOL;
        let coefficients = coefficients.into_iter().map(|c| c / norm).collect();
        Ok(Self {
            coefficients,
            renormalized,
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `⟨n|ψ⟩`; zero beyond the cutoff.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.coefficients
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// True when construction had to rescale by more than [`NORM_WARN_TOL`].
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Drops every coefficient beyond `max_n` and renormalizes.
    pub fn truncated(&self, max_n: usize) -> Result<Self, StatesError> {
        let end = (max_n + 1).min(self.coefficients.len());
        Self::new(self.coefficients[..end].to_vec())
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        let len = self.coefficients.len().max(other.coefficients.len());
        (0..len)
            .map(|n| self.coefficient(n).conj() * other.coefficient(n))
            .sum()
    }
}

/// The pointer state `|θ_m⟩`: uniform moduli with a linear phase ramp,
/// cutoff at `N`.
pub fn theta_state(grid: &PhaseGrid, m: usize) -> Result<SingleModeState, StatesError> {
    if m > grid.n() {
        return Err(StatesError::PhaseIndexOutOfRange { m, max: grid.n() });
    }
    let scale = (1.0 / grid.modes() as f64).sqrt();
    let coefficients = (0..grid.modes())
        .map(|n| grid.omega_pow(-((n * m) as i64)) * scale) // ω^{-nm} = e^{i n θ_m}
        .collect();
    SingleModeState::new(coefficients)
}

/// The reference state with coefficients `(-1)^n √C(N,n) / 2^{N/2}`,
/// normalized exactly by the binomial theorem.
pub fn binomial_reference(n_grid: usize) -> SingleModeState {
    let scale = 0.5f64.powi(n_grid as i32).sqrt();
    let coefficients = (0..=n_grid)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * binomial(n_grid, n).sqrt() * scale, 0.0)
        })
        .collect();
    SingleModeState::new(coefficients).expect("binomial coefficients are nonzero")
}

/// `|n⟩` padded with zeros up to `cutoff`.
pub fn number_state(n: usize, cutoff: usize) -> Result<SingleModeState, StatesError> {
    if cutoff < n {
        return Err(StatesError::CutoffBelowPhotonNumber { cutoff, n });
    }
    let mut coefficients = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    coefficients[n] = Complex64::new(1.0, 0.0);
    SingleModeState::new(coefficients)
}

/// Truncated coherent state `c_n ∝ α^n/√(n!)`, renormalized. Fails unless
/// the discarded Poisson tail is below [`COHERENT_TAIL_TOL`].
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<SingleModeState, StatesError> {
    let mean = alpha.norm_sqr();
    let mut kept_mass = 0.0;
    let mut weight = 1.0; // |α|^{2n} / n!
    let mut coefficients = Vec::with_capacity(cutoff + 1);
    let mut coefficient = Complex64::new(1.0, 0.0); // α^n / √(n!)
    for n in 0..=cutoff {
        if n > 0 {
            weight *= mean / n as f64;
            coefficient *= alpha / (n as f64).sqrt();
        }
        kept_mass += weight;
        coefficients.push(coefficient);
    }
    let tail = 1.0 - (-mean).exp() * kept_mass;
    if tail >= COHERENT_TAIL_TOL {
        return Err(StatesError::CutoffTooSmall {
            cutoff,
            tail,
            limit: COHERENT_TAIL_TOL,
        });
    }
    SingleModeState::new(coefficients)
}

/// User-supplied coefficient list, normalized. Same as
/// [`SingleModeState::new`], named for symmetry with the other
/// constructors.
pub fn custom_state(coefficients: Vec<Complex64>) -> Result<SingleModeState, StatesError> {
    SingleModeState::new(coefficients)
}

/// Product input of the apparatus: the signal in mode 0, the reference in
/// mode 1, vacuum in modes `2..=N`.
pub fn assemble_input(
    signal: &SingleModeState,
    reference: &SingleModeState,
    grid: &PhaseGrid,
) -> Result<MultimodeState, StatesError> {
    if grid.modes() < 2 {
        return Err(StatesError::NeedAtLeastTwoModes);
    }
    let modes = grid.modes();
    let mut terms = Vec::new();
    for (n, cn) in signal.coefficients().iter().enumerate() {
        if cn.norm_sqr() == 0.0 {
            continue;
        }
        for (k, bk) in reference.coefficients().iter().enumerate() {
            if bk.norm_sqr() == 0.0 {
                continue;
            }
            let mut occupations = vec![0usize; modes];
            occupations[0] = n;
            occupations[1] = k;
            terms.push((FockPattern::new(occupations).expect("modes >= 2"), cn * bk));
        }
    }
    Ok(MultimodeState::new(modes, terms).expect("product of normalized states"))
}
