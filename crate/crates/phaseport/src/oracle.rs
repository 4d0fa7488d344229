//! Independent ground truth for the pointer apparatus.
//!
//! Everything in this module is computed without touching the network
//! evolution machinery: the continuous phase density from the signal
//! coefficients alone, the lattice statistics from direct projections onto
//! the pointer states, and the pointer-event amplitude in closed form. The
//! integration tests hold these against the permanent-based apparatus; the
//! two sides share no numerical path.

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::combin::{binomial, factorial};
use crate::measurement::RetainedDistribution;
use crate::states::{PhaseGrid, SingleModeState};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("phase index {m} out of range 0..={max}")]
    PhaseIndexOutOfRange { m: usize, max: usize },
    #[error("signal has no support on photon numbers <= {max}; projections all vanish")]
    ZeroSum { max: usize },
}

/// One sample of the continuous phase density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalDensity {
    pub theta: f64,
    pub density: f64,
}

/// The phase density complementary to photon number,
/// `P(θ) = (1/2π) |Σ_n ⟨ψ|n⟩ e^{inθ}|²`. Periodic with period 2π and
/// normalized over one period.
pub fn canonical_density(signal: &SingleModeState, theta: f64) -> f64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, c) in signal.coefficients().iter().enumerate() {
        sum += c.conj() * Complex64::from_polar(1.0, n as f64 * theta);
    }
    sum.norm_sqr() / std::f64::consts::TAU
}

/// Uniform sampling of the density over `[0, 2π)`.
pub fn density_profile(signal: &SingleModeState, points: usize) -> Vec<CanonicalDensity> {
    assert!(points >= 1);
    let step = std::f64::consts::TAU / points as f64;
    (0..points)
        .map(|i| {
            let theta = i as f64 * step;
            CanonicalDensity {
                theta,
                density: canonical_density(signal, theta),
            }
        })
        .collect()
}

/// Lattice statistics by direct projection: `Pr(θ_m) ∝ |⟨θ_m|ψ⟩|²`,
/// normalized over the lattice. The `success_probability` field carries the
/// unnormalized sum `Σ_p |⟨θ_p|ψ⟩|²`, i.e. the weight of the retained part
/// of the measure, which is 1 exactly when the signal is supported on
/// `n ≤ N`.
pub fn projection_distribution(
    signal: &SingleModeState,
    grid: &PhaseGrid,
) -> Result<RetainedDistribution, OracleError> {
    let modes = grid.modes();
    let scale = 1.0 / modes as f64;
    let mut weights = Vec::with_capacity(modes);
    for m in 0..modes {
        let mut overlap = Complex64::new(0.0, 0.0);
        for n in 0..modes {
            // ⟨θ_m|n⟩ = ω^{nm} / √(N+1)
            overlap += grid.omega_pow((n * m) as i64) * signal.coefficient(n);
        }
        weights.push(overlap.norm_sqr() * scale);
    }
    let sum: f64 = weights.iter().sum();
    if sum == 0.0 {
        return Err(OracleError::ZeroSum { max: grid.n() });
    }
    Ok(RetainedDistribution::new(*grid, weights, sum).expect("sum checked nonzero"))
}

/// The pointer-event amplitude in closed form.
///
/// For the silent detector at `m` the apparatus projects the signal onto an
/// analyzer state whose photon-number expansion is
///
/// ```text
/// |φ_m⟩ = κ₂ Σ_n (-1)^{N-n} C(N,n)^{-1/2} ω^{-nm} b*_{N-n} |n⟩,
/// κ₁ = (N+1)^{-N/2},  κ₂ = κ₁ ω^{-m} (N!)^{1/2},
/// ```
///
/// where `b_k` are the reference coefficients; the event amplitude is the
/// overlap `⟨φ_m|ψ⟩`. This reproduces the permanent-path amplitude of
/// [`crate::measurement::pointer_amplitudes`] through [`pointer_network`]
/// exactly, global phase included — grounds for the cross-path checks in the
/// acceptance suite.
///
/// With the binomial reference the analyzer coefficients collapse to a
/// uniform ladder `∝ ω^{-nm}`, i.e. `|φ_m⟩ ∝ |θ_m⟩`, which is why the
/// retained statistics reproduce the lattice projections.
///
/// [`pointer_network`]: crate::measurement::pointer_network
#[derive(Clone, Debug)]
pub struct ClosedFormAmplitude {
    kappa1: f64,
    kappa2: Complex64,
    coefficients: Vec<Complex64>,
}

impl ClosedFormAmplitude {
    pub fn new(
        reference: &SingleModeState,
        grid: &PhaseGrid,
        m: usize,
    ) -> Result<Self, OracleError> {
        let n_grid = grid.n();
        if m > n_grid {
            return Err(OracleError::PhaseIndexOutOfRange { m, max: n_grid });
        }
        let kappa1 = ((n_grid + 1) as f64).powi(n_grid as i32).sqrt().recip();
        let kappa2 = grid.omega_pow(-(m as i64)) * kappa1 * factorial(n_grid).sqrt();
        let coefficients = (0..=n_grid)
            .map(|n| {
                let sign = if (n_grid - n).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                kappa2
                    * grid.omega_pow(-((n * m) as i64))
                    * reference.coefficient(n_grid - n).conj()
                    * (sign / binomial(n_grid, n).sqrt())
            })
            .collect();
        Ok(Self {
            kappa1,
            kappa2,
            coefficients,
        })
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> Complex64 {
        self.kappa2
    }

    /// The analyzer-state expansion coefficients over `|n⟩`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `⟨φ_m|ψ⟩`.
    pub fn amplitude(&self, signal: &SingleModeState) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, phi)| phi.conj() * signal.coefficient(n))
            .sum()
    }
}

/// Convenience wrapper building the analyzer and taking the overlap in one
/// call.
pub fn closed_form_pointer_amplitude(
    signal: &SingleModeState,
    reference: &SingleModeState,
    grid: &PhaseGrid,
    m: usize,
) -> Result<Complex64, OracleError> {
    Ok(ClosedFormAmplitude::new(reference, grid, m)?.amplitude(signal))
}

/// Numerically evaluates both sides of the product identity
///
/// ```text
/// ∏_{j≠m} (x + ω^j y) = Σ_{n=0}^{N} x^n (-ω^m y)^{N-n},   ω = e^{-i2π/(N+1)}
/// ```
///
/// (`j` ascending over `0..=N` skipping `m`) and returns the deviation
/// `|LHS − RHS|` scaled by `max(1, |LHS|)`, so the figure stays meaningful
/// when the sides reach magnitudes around `20^N`.
pub fn identity_check(n_grid: usize, x: Complex64, y: Complex64, m: usize) -> f64 {
    let grid = PhaseGrid::new(n_grid);
    let mut lhs = Complex64::new(1.0, 0.0);
    for j in 0..=n_grid {
        if j != m {
            lhs *= x + grid.omega_pow(j as i64) * y;
        }
    }

    let z = -grid.omega_pow(m as i64) * y;
    let mut x_pow = vec![Complex64::new(1.0, 0.0); n_grid + 1];
    let mut z_pow = vec![Complex64::new(1.0, 0.0); n_grid + 1];
    for k in 1..=n_grid {
        x_pow[k] = x_pow[k - 1] * x;
        z_pow[k] = z_pow[k - 1] * z;
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    for n in 0..=n_grid {
        rhs += x_pow[n] * z_pow[n_grid - n];
    }

    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_distance: f64,
}

/// For each lattice size `N` in `n_list`, the sup distance between the
/// rescaled lattice statistics `(N+1)/(2π) · Pr(θ_m)` and the continuous
/// density `P(θ_m)`. Exact (at rounding level) once the signal support fits
/// inside `n ≤ N`; driven by the tail the lattice cuts off otherwise.
pub fn convergence_report(
    signal: &SingleModeState,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>, OracleError> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = PhaseGrid::new(n);
        let projected = projection_distribution(signal, &grid)?;
        let scale = grid.modes() as f64 / std::f64::consts::TAU;
        let mut sup = 0.0f64;
        for m in 0..grid.modes() {
            let lattice = scale * projected.probability(m);
            let continuous = canonical_density(signal, grid.theta(m));
            sup = sup.max((lattice - continuous).abs());
        }
        rows.push(ConvergenceRow {
            n,
            sup_distance: sup,
        });
    }
    Ok(rows)
}

/// CSV form of a convergence report: header `N,sup_distance`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("N,sup_distance\n");
    for row in rows {
        let _ = writeln!(out, "{},{:.16e}", row.n, row.sup_distance);
    }
    out
}
