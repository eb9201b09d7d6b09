//! Counts free parameters numerically as Jacobian ranks and compares them
//! with the closed forms.

use ptsym::construction::audit::jacobian_rank_audit;

fn main() -> ptsym::Result<()> {
    for (mp, mm) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        let audit = jacobian_rank_audit(mp, mm, 5, 42)?;
        println!(
            "({mp},{mm}): parity rank {:?} (expected {}), H rank {:?} (expected {}) -> {}",
            audit.parity_ranks,
            audit.parity_expected,
            audit.hamiltonian_ranks,
            audit.hamiltonian_expected,
            if audit.passed() { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
