//! CPT inner products are conserved under e^{-iHt}; PT inner products are
//! conserved too but are indefinite.

use ptsym::algebra::build_c_operator;
use ptsym::construction::SystemSampler;
use ptsym::dynamics::{pt_unitarity_trace, unitarity_trace, DEFAULT_STEPS, DEFAULT_T_MAX};
use ptsym::linalg::DEFAULT_TOL;

fn main() -> ptsym::Result<()> {
    let mut sampler = SystemSampler::new(7).with_coupling(0.3);
    let sys = sampler.unbroken_system(2, 2, 1000, DEFAULT_TOL)?;
    let c = build_c_operator(&sys, DEFAULT_TOL)?;
    let (a, b) = (sampler.complex_vector(4), sampler.complex_vector(4));

    let cpt = unitarity_trace(&sys, &c, &a, &b, DEFAULT_T_MAX, DEFAULT_STEPS)?;
    let pt = pt_unitarity_trace(&sys, &a, &b, DEFAULT_T_MAX, DEFAULT_STEPS)?;
    println!("CPT <a|b> = {:.10}, drift {:.1e}", cpt.inner_products[0], cpt.max_drift);
    println!("PT  (a|b) = {:.10}, drift {:.1e}", pt.inner_products[0], pt.max_drift);
    print!("{}", cpt.to_csv_string()?.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
