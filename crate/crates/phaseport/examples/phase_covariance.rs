//! A phase shifter on the signal input slides the pointer histogram around
//! the lattice without changing its shape.
//!
//! ```bash
//! cargo run -p phaseport --example phase_covariance
//! ```

use num_complex::Complex64;
use phaseport::measurement::{pointer_network, retained_distribution};
use phaseport::multiport::phase_shift_matrix;
use phaseport::states::{assemble_input, binomial_reference, PhaseGrid, SingleModeState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = PhaseGrid::new(3);
    let network = pointer_network(&grid);
    let signal = SingleModeState::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])?;
    let input = assemble_input(&signal, &binomial_reference(grid.n()), &grid)?;

    println!("retained distribution vs. signal phase shift k·δθ (N = 3):\n");
    print!("{:>3}", "k");
    for m in 0..grid.modes() {
        print!("{m:>10}");
    }
    println!();

    for k in 0..grid.modes() {
        let shifter = phase_shift_matrix(grid.modes(), 0, k as f64 * grid.delta_theta())?;
        // the shifter acts on the input side, so it multiplies on the right
        let shifted = &network * &shifter;
        let retained = retained_distribution(&shifted, &input)?;
        print!("{k:>3}");
        for m in 0..grid.modes() {
            print!("{:>10.6}", retained.probability(m));
        }
        println!();
    }

    println!("\neach row is the previous one rotated by one bin: shifting the");
    println!("signal phase by δθ relabels every pointer value by one step.");
    Ok(())
}
