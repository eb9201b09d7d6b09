//! Builds C for a random unbroken system and checks its defining identities.

use ptsym::algebra::{build_c_operator, cpt_inner, pt_inner};
use ptsym::construction::SystemSampler;
use ptsym::linalg::DEFAULT_TOL;

fn main() -> ptsym::Result<()> {
    let mut sampler = SystemSampler::new(2024).with_coupling(0.3);
    let sys = sampler.unbroken_system(3, 2, 1000, DEFAULT_TOL)?;
    let c = build_c_operator(&sys, DEFAULT_TOL)?;
    let res = c.residuals(sys.h(), sys.p())?;
    println!("|C^2 - I|     = {:.2e}", res.squared);
    println!("|[C, H]|      = {:.2e}", res.commutator);
    println!("|P C* P - C|  = {:.2e}", res.pt_commutator);

    for _ in 0..3 {
        let v = sampler.complex_vector(sys.dim());
        let pt = pt_inner(&v, &v, sys.p())?;
        let cpt = cpt_inner(&v, &v, &c, sys.p())?;
        println!("random state: (v|v) = {:+.4}   <v|v> = {:+.4}", pt.re, cpt.re);
    }
    Ok(())
}
