//! Numerical parameter counting.
//!
//! The number of independent real parameters in a smooth family of matrices
//! is the rank of the Jacobian of the parameterization at a generic point.
//! We take central finite differences of the maps `angles → P` and
//! `(blocks, angles) → H` and count singular values above a relative
//! threshold.

use nalgebra::DMatrix;

use super::{count_parity_params, make_parity, make_pt_system, BlockForm, ParitySpec, SystemSampler};
use crate::error::Result;
use crate::linalg::ComplexMatrix;

pub const FD_STEP: f64 = 1e-6;
pub const RANK_REL_THRESHOLD: f64 = 1e-4;
/// Singular values below this are rounding noise of the difference quotient
/// (about `ε / FD_STEP`) whatever the largest one is.
pub const RANK_ABS_FLOOR: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct RankAudit {
    pub dim: usize,
    pub m_plus: usize,
    pub m_minus: usize,
    pub parity_expected: usize,
    pub parity_ranks: Vec<usize>,
    pub hamiltonian_expected: usize,
    pub hamiltonian_ranks: Vec<usize>,
}

impl RankAudit {
    pub fn mismatches(&self) -> usize {
        self.parity_ranks.iter().filter(|&&r| r != self.parity_expected).count()
            + self.hamiltonian_ranks.iter().filter(|&&r| r != self.hamiltonian_expected).count()
    }

    pub fn passed(&self) -> bool {
        self.mismatches() == 0
    }
}

/// Number of singular values above `max(rel · σ_max, RANK_ABS_FLOOR)`.
pub fn numerical_rank(jac: &DMatrix<f64>, rel: f64) -> usize {
    if jac.is_empty() {
        return 0;
    }
    let sv = jac.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let cut = (rel * max).max(RANK_ABS_FLOOR);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Central-difference Jacobian of `f` at `x`; columns index parameters.
pub fn finite_difference_jacobian(
    x: &[f64],
    step: f64,
    f: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<DMatrix<f64>> {
    let rows = f(x)?.len();
    let mut jac = DMatrix::zeros(rows, x.len());
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        probe[k] = x[k] + step;
        let plus = f(&probe)?;
        probe[k] = x[k] - step;
        let minus = f(&probe)?;
        probe[k] = x[k];
        for r in 0..rows {
            jac[(r, k)] = (plus[r] - minus[r]) / (2.0 * step);
        }
    }
    Ok(jac)
}

fn flatten(m: &ComplexMatrix) -> Vec<f64> {
    m.entries().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Jacobian rank of `angles → P` at `angles`.
pub fn parity_rank(m_plus: usize, m_minus: usize, angles: &[f64]) -> Result<usize> {
    let jac = finite_difference_jacobian(angles, FD_STEP, |a| {
        Ok(flatten(&make_parity(&ParitySpec::new(m_plus, m_minus, a.to_vec())?)?))
    })?;
    Ok(numerical_rank(&jac, RANK_REL_THRESHOLD))
}

/// Jacobian rank of `(block parameters, angles) → H` at the given point.
pub fn hamiltonian_rank(m_plus: usize, m_minus: usize, blocks: &BlockForm, angles: &[f64]) -> Result<usize> {
    let n_blocks = blocks.parameter_count();
    let mut x = blocks.to_params();
    x.extend_from_slice(angles);
    let jac = finite_difference_jacobian(&x, FD_STEP, |v| {
        let (bp, ap) = v.split_at(n_blocks);
        let blocks = BlockForm::from_params(m_plus, m_minus, bp)?;
        let spec = ParitySpec::new(m_plus, m_minus, ap.to_vec())?;
        Ok(flatten(make_pt_system(&blocks, &spec)?.h()))
    })?;
    Ok(numerical_rank(&jac, RANK_REL_THRESHOLD))
}

/// Evaluates both Jacobian ranks at `points` seeded random points and
/// compares them with the closed-form counts.
pub fn jacobian_rank_audit(m_plus: usize, m_minus: usize, points: usize, seed: u64) -> Result<RankAudit> {
    let d = m_plus + m_minus;
    let parity_expected = count_parity_params(d, m_plus, m_minus)?;
    let hamiltonian_expected = parity_expected + d * (d + 1) / 2;
    let mut sampler = SystemSampler::new(seed);
    let mut parity_ranks = Vec::with_capacity(points);
    let mut hamiltonian_ranks = Vec::with_capacity(points);
    for _ in 0..points {
        let spec = sampler.parity_spec(m_plus, m_minus)?;
        let blocks = sampler.blocks(m_plus, m_minus)?;
        parity_ranks.push(parity_rank(m_plus, m_minus, spec.angles())?);
        hamiltonian_ranks.push(hamiltonian_rank(m_plus, m_minus, &blocks, spec.angles())?);
    }
    Ok(RankAudit { dim: d, m_plus, m_minus, parity_expected, parity_ranks, hamiltonian_expected, hamiltonian_ranks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_known_matrices() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert_eq!(numerical_rank(&m, 1e-10), 1);
        assert_eq!(numerical_rank(&DMatrix::<f64>::identity(4, 4), 1e-10), 4);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(3, 3), 1e-10), 0);
    }

    #[test]
    fn trivial_signatures_have_no_parity_parameters() {
        // P₀ = I is fixed by every rotation.
        assert_eq!(parity_rank(3, 0, &[0.3, 1.2, -0.7]).unwrap(), 0);
    }

    #[test]
    fn two_dimensional_audit() {
        let audit = jacobian_rank_audit(1, 1, 5, 3).unwrap();
        assert_eq!(audit.parity_expected, 1);
        assert_eq!(audit.hamiltonian_expected, 4);
        assert!(audit.passed(), "{audit:?}");
    }
}
