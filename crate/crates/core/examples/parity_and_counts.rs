//! Parity operators from rotation angles, and the parameter-count table.

use ptsym::cli::counts_table;
use ptsym::construction::{count_parity_params, make_parity, ParitySpec, SystemSampler};

fn main() -> ptsym::Result<()> {
    let spec = ParitySpec::new(2, 1, vec![0.4, 1.1, -0.3])?;
    let p = make_parity(&spec)?;
    println!("P for signature (2, 1):");
    for i in 0..3 {
        println!("  {:+.6} {:+.6} {:+.6}", p[(i, 0)].re, p[(i, 1)].re, p[(i, 2)].re);
    }
    println!("P^2 = I within {:.1e}", p.mul(&p)?.distance_from_identity());

    let (mp, mm) = (6, 2);
    let spec = SystemSampler::new(1).parity_spec(mp, mm)?;
    println!(
        "D=8, signature ({mp}, {mm}): {} angles, {} independent parity parameters",
        spec.angles().len(),
        count_parity_params(8, mp, mm)?
    );

    println!();
    print!("{}", counts_table(8));
    Ok(())
}
