//! PT-norm signs of eigenstates reproduce the signature of the parity
//! operator, in an order that depends on the Hamiltonian.

use ptsym::construction::SystemSampler;
use ptsym::linalg::DEFAULT_TOL;
use ptsym::spectral::pt_norm_signature;

fn main() -> ptsym::Result<()> {
    for seed in 0..6 {
        let sys = SystemSampler::new(seed).with_coupling(0.3).unbroken_system(6, 2, 5000, DEFAULT_TOL)?;
        let signs = pt_norm_signature(&sys, DEFAULT_TOL)?;
        let text: Vec<&str> = signs.iter().map(|&s| if s > 0 { "+" } else { "-" }).collect();
        println!("seed {seed}: {}", text.join(" "));
    }
    Ok(())
}
