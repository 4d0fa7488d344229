//! Exact and Monte Carlo simulation of single-shot optical phase
//! measurement with a multiport interferometer.
//!
//! The measured quantity is the phase complementary to photon number, whose
//! distribution for a signal `|ψ⟩` is `P(θ) = (1/2π)|Σ_n ⟨ψ|n⟩ e^{inθ}|²`.
//! The apparatus simulated here reads that distribution one shot at a time:
//! the signal enters mode 0 of an `(N+1)`-port Fourier interferometer, a
//! reference with binomial number-state coefficients enters mode 1, vacuum
//! fills the rest, and a photodetector sits on every output. A shot is kept
//! exactly when all detectors fire once except a single silent one; the
//! silent port `m` is a digital pointer reading of the phase
//! `θ_m = 2πm/(N+1)`. Retained-shot statistics reproduce the projections
//! `|⟨θ_m|ψ⟩|²` of the signal onto the lattice phase states — the exact
//! engine, the closed-form amplitude, and the Monte Carlo sampler in this
//! crate all agree on that distribution and are tested against each other.
//!
//! Modules:
//!
//! - [`multiport`] — unitary mode matrices, the Fourier network, triangular
//!   beam-splitter decompositions and the netlist text format.
//! - [`fock`] — photon patterns, permanent-based evolution, and an
//!   independent brute-force evolution oracle.
//! - [`states`] — phase lattice, signal/reference constructors, input
//!   assembly.
//! - [`measurement`] — outcome classification, post-selected statistics,
//!   detector thinning, seeded sampling, histogram CSV.
//! - [`oracle`] — continuous phase density, lattice projections, closed-form
//!   pointer amplitudes, product-identity checks, convergence reports.
//! - [`cli`] — the batch front-end used by the `phaseport` binary.
//!
//! # Example
//!
//! ```
//! use num_complex::Complex64;
//! use phaseport::measurement::{pointer_network, retained_distribution};
//! use phaseport::states::{assemble_input, binomial_reference, PhaseGrid, SingleModeState};
//!
//! // (|0⟩ + |1⟩)/√2 measured on the N = 3 lattice.
//! let grid = PhaseGrid::new(3);
//! let signal = SingleModeState::new(vec![
//!     Complex64::new(1.0, 0.0),
//!     Complex64::new(1.0, 0.0),
//! ])?;
//! let input = assemble_input(&signal, &binomial_reference(3), &grid)?;
//! let retained = retained_distribution(&pointer_network(&grid), &input)?;
//!
//! let expected = [0.5, 0.25, 0.0, 0.25];
//! for (m, p) in expected.iter().enumerate() {
//!     assert!((retained.probability(m) - p).abs() < 1e-10);
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

mod combin;

pub mod cli;
pub mod fock;
pub mod measurement;
pub mod multiport;
pub mod oracle;
pub mod states;

pub use fock::{FockPattern, MultimodeState};
pub use measurement::{Histogram, Outcome, RetainedDistribution};
pub use multiport::{InterferometerElement, InterferometerNetlist, UnitaryMatrix};
pub use states::{PhaseGrid, SingleModeState};
