//! Monte Carlo shots through the full apparatus: sample the exact outcome
//! distribution, tally pointer bins and discards, and write the histogram
//! CSV.
//!
//! ```bash
//! cargo run -p phaseport --example sampled_histogram
//! ```

use num_complex::Complex64;
use phaseport::measurement::{
    outcome_distribution, pointer_network, retained_distribution, sample_outcomes,
};
use phaseport::states::{assemble_input, binomial_reference, PhaseGrid, SingleModeState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = PhaseGrid::new(3);
    let network = pointer_network(&grid);
    let signal = SingleModeState::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])?;
    let input = assemble_input(&signal, &binomial_reference(grid.n()), &grid)?;

    let shots = 100_000;
    let seed = 20_260_811;
    let outcomes = outcome_distribution(&network, &input)?;
    let histogram = sample_outcomes(&outcomes, grid.modes(), shots, seed);
    let exact = retained_distribution(&network, &input)?;

    println!(
        "{shots} shots, seed {seed}, rng {}:\n",
        histogram.rng_algorithm()
    );
    println!(
        "{:>3} {:>10} {:>12} {:>12}",
        "m", "count", "frequency", "exact"
    );
    for m in 0..grid.modes() {
        println!(
            "{m:>3} {:>10} {:>12.6} {:>12.6}",
            histogram.counts()[m],
            histogram.frequency(m),
            exact.probability(m)
        );
    }
    println!(
        "\ndiscarded {} shots; exact retention probability {:.6}",
        histogram.discarded_count(),
        exact.success_probability()
    );

    let retained_shots = shots - histogram.discarded_count();
    let chi_square: f64 = (0..grid.modes())
        .filter(|&m| exact.probability(m) > 0.0)
        .map(|m| {
            let expected = exact.probability(m) * retained_shots as f64;
            (histogram.counts()[m] as f64 - expected).powi(2) / expected
        })
        .sum();
    println!("chi-square vs exact (3 dof): {chi_square:.3}");

    let path = std::env::temp_dir().join("phaseport_histogram.csv");
    std::fs::write(&path, histogram.to_csv())?;
    println!("histogram CSV written to {}", path.display());
    Ok(())
}
