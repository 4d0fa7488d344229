//! Feed each lattice phase state through the full apparatus: the silent
//! detector lands on the matching bin with certainty, which is what makes
//! the detector array a digital phase pointer.
//!
//! ```bash
//! cargo run -p phaseport --example digital_pointer
//! ```

use phaseport::measurement::{pointer_network, retained_distribution};
use phaseport::states::{assemble_input, binomial_reference, theta_state, PhaseGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = PhaseGrid::new(4);
    let network = pointer_network(&grid);
    let reference = binomial_reference(grid.n());

    println!("N = {}: retained probabilities by input |θ_k⟩", grid.n());
    print!("{:>6}", "k\\m");
    for m in 0..grid.modes() {
        print!("{m:>9}");
    }
    println!();

    for k in 0..grid.modes() {
        let signal = theta_state(&grid, k)?;
        let input = assemble_input(&signal, &reference, &grid)?;
        let retained = retained_distribution(&network, &input)?;
        print!("{k:>6}");
        for m in 0..grid.modes() {
            print!("{:>9.5}", retained.probability(m));
        }
        println!("   success {:.3e}", retained.success_probability());
    }

    println!("\neach row is a Kronecker delta: the phase states are orthonormal");
    println!("and the apparatus projects onto them, one detector per lattice value.");
    Ok(())
}
