//! Two photons meeting on a balanced coupler bunch: the coincidence
//! amplitude cancels exactly while both-photons-one-side events split the
//! probability evenly.
//!
//! ```bash
//! cargo run -p phaseport --example two_photon_interference
//! ```

use phaseport::fock::{FockPattern, MultimodeState};
use phaseport::measurement::outcome_distribution;
use phaseport::multiport::dft_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coupler = dft_matrix(2)?;
    let input = MultimodeState::from_pattern(FockPattern::new(vec![1, 1])?);
    let outcomes = outcome_distribution(&coupler, &input)?;

    println!("one photon in each input of a balanced two-port:");
    for pattern in [vec![2, 0], vec![1, 1], vec![0, 2]] {
        let pattern = FockPattern::new(pattern)?;
        let probability = outcomes.get(&pattern).copied().unwrap_or(0.0);
        println!("  P{pattern} = {probability:.12}");
    }
    println!("\nthe (1,1) coincidence vanishes by destructive interference;");
    println!("the permanent of the repeated-row submatrix is exactly zero.");
    Ok(())
}
