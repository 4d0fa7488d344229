//! Factor the 4-port Fourier network into its triangular beam-splitter
//! array, print the netlist, and verify the factorization reproduces the
//! matrix.
//!
//! ```bash
//! cargo run -p phaseport --example reck_decomposition
//! ```

use phaseport::multiport::{decompose, dft_matrix, recompose, InterferometerElement};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let device = dft_matrix(4)?;
    let netlist = decompose(&device);

    println!(
        "netlist ({} beam splitters):\n",
        netlist.beam_splitter_count()
    );
    print!("{}", netlist.to_text());

    println!("\nbeam splitters in traversal order:");
    println!(
        "{:>10} {:>6} {:>14} {:>14}",
        "modes", "", "T (through)", "1-T (cross)"
    );
    for element in netlist.elements() {
        if let InterferometerElement::BeamSplitter {
            modes: (p, q),
            transmittance,
            ..
        } = element
        {
            println!(
                "{:>10} {:>6} {:>14.6} {:>14.6}",
                format!("({p},{q})"),
                "",
                transmittance,
                1.0 - transmittance
            );
        }
    }

    let rebuilt = recompose(&netlist)?;
    println!(
        "\nrecompose(decompose(U)) deviation from U: {:.3e}",
        rebuilt.max_entry_distance(&device)
    );
    println!(
        "entry moduli of the rebuilt matrix are all 1/2 to {:.3e}",
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (rebuilt.get(i, j).norm() - 0.5).abs())
            .fold(0.0f64, f64::max)
    );
    Ok(())
}
