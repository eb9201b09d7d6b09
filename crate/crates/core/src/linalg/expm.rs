use super::{eigendecompose, eigenvector_matrix, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Largest one-norm condition number of the eigenvector matrix accepted
/// before a matrix is treated as defective.
pub const DEFECTIVE_CONDITION_CAP: f64 = 1e8;

/// Cached eigenbasis `M = S Λ S⁻¹` for evaluating `exp(z M)` at many `z`.
#[derive(Clone, Debug)]
pub struct Propagator {
    values: Vec<C64>,
    basis: ComplexMatrix,
    basis_inv: ComplexMatrix,
    condition: f64,
}

impl Propagator {
    pub fn new(m: &ComplexMatrix, tol: f64) -> Result<Self> {
        let pairs = eigendecompose(m, tol)?;
        let basis = eigenvector_matrix(&pairs)?;
        let basis_inv = basis.inverse().map_err(|e| match e {
            Error::Singular(k) => Error::Defective(k),
            other => other,
        })?;
        let condition = basis.norm_one() * basis_inv.norm_one();
        if condition.is_nan() || condition >= DEFECTIVE_CONDITION_CAP {
            return Err(Error::Defective(condition));
        }
        Ok(Propagator { values: pairs.into_iter().map(|p| p.value).collect(), basis, basis_inv, condition })
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.values
    }

    /// One-norm condition number of the eigenvector matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `exp(scalar · M)`.
    pub fn exp(&self, scalar: C64) -> ComplexMatrix {
        let n = self.basis.dim();
        let phases: Vec<C64> = self.values.iter().map(|&l| (scalar * l).exp()).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| self.basis[(i, k)] * phases[k] * self.basis_inv[(k, j)]).sum();
            }
        }
        out
    }

    /// `exp(scalar · M) v` without forming the full matrix.
    pub fn apply(&self, scalar: C64, v: &[C64]) -> Result<Vec<C64>> {
        let coeffs = self.basis_inv.mul_vec(v)?;
        let scaled: Vec<C64> = coeffs.iter().zip(&self.values).map(|(&c, &l)| c * (scalar * l).exp()).collect();
        self.basis.mul_vec(&scaled)
    }
}

/// `exp(scalar · m)` through the eigendecomposition `S exp(scalar Λ) S⁻¹`.
///
/// Fails with [`Error::Defective`] when the eigenvector matrix is too
/// ill-conditioned, which is how an exceptional point shows up here.
pub fn mat_exp_times(m: &ComplexMatrix, scalar: C64, tol: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(m, tol)?.exp(scalar))
}
