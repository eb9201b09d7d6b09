//! An asymmetric PT-symmetric Hamiltonian forces a weight matrix W that does
//! not commute with H, and the weighted inner product drifts.

use ptsym::construction::make_p0;
use ptsym::dynamics::{nonunitarity_demo, weighted_trace, BraEvolution, DEFAULT_STEPS, DEFAULT_T_MAX};
use ptsym::linalg::{ComplexMatrix, C64};

fn main() -> ptsym::Result<()> {
    let h = ComplexMatrix::from_rows(&[
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.5)],
        vec![C64::new(0.0, 0.1), C64::new(-1.0, 0.0)],
    ])?;
    let p = make_p0(1, 1)?;
    let report = nonunitarity_demo(&h, &p, DEFAULT_T_MAX, DEFAULT_STEPS)?;
    println!(
        "|[W, H]| = {:.4} (threshold {:.1e}), verdict {:?}",
        report.commutator_norm, report.threshold, report.verdict
    );
    println!("drift of (a,0|e^(iHt) W e^(-iHt)|b,0): {:.4}", report.trace.max_drift);

    let a = vec![C64::new(0.3, 0.1), C64::new(-0.7, 0.4)];
    let b = vec![C64::new(0.5, -0.2), C64::new(0.1, 0.9)];
    let exact = weighted_trace(&h, &p, &a, &b, DEFAULT_T_MAX, DEFAULT_STEPS, BraEvolution::PtConjugate)?;
    println!("drift with the PT-conjugated evolved bra: {:.1e}", exact.trace.max_drift);
    Ok(())
}
