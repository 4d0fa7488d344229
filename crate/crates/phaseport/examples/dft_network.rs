//! Build the Fourier mode matrix for a few port counts and verify its
//! unitarity numerically.
//!
//! ```bash
//! cargo run -p phaseport --example dft_network
//! ```

use phaseport::multiport::dft_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for dim in [2, 4, 8] {
        let u = dft_matrix(dim)?;
        println!(
            "dim {dim}: max |U·U† − I| = {:.3e}",
            u.unitarity_deviation()
        );
    }

    let u = dft_matrix(4)?;
    println!("\nU for 4 ports (entries re+im i):");
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| {
                let z = u.get(i, j);
                format!("{:+.3}{:+.3}i", z.re, z.im)
            })
            .collect();
        println!("  [{}]", row.join("  "));
    }
    println!("\nEvery entry has modulus 1/2 and row 0 / column 0 are uniform,");
    println!("so a photon entering any port spreads evenly over all outputs.");
    Ok(())
}
