//! PT and CPT inner products, the C operator and the weight matrix.
//!
//! The PT conjugate of a ket is the row `[PT v]ᵀ`; the PT inner product is
//! its plain dot product with the second ket. It is indefinite. Summing
//! `|εₙ)(εₙ|` over PT-normalized eigenvectors gives `C`, which flips the
//! sign of every negative-norm state and makes `[CPT a]ᵀ · b` positive
//! definite.

use crate::construction::PtSystem;
use crate::error::{Error, Result};
use crate::linalg::{dot, ComplexMatrix, C64};
use crate::spectral::{classify_phase, pt_apply, Phase, SpectralData};

/// Largest one-norm condition number of an eigenvector basis accepted when
/// solving for a weight matrix.
pub const WEIGHT_CONDITION_CAP: f64 = 1e8;

/// `[PT v]ᵀ`, returned as a row vector.
pub fn pt_conjugate(v: &[C64], p: &ComplexMatrix) -> Result<Vec<C64>> {
    pt_apply(v, p)
}

/// `(a|b) = [PT a]ᵀ · b`.
pub fn pt_inner(a: &[C64], b: &[C64], p: &ComplexMatrix) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(dot(&pt_conjugate(a, p)?, b))
}

/// `⟨a|b⟩ = [C P T a]ᵀ · b`.
pub fn cpt_inner(a: &[C64], b: &[C64], c: &COperator, p: &ComplexMatrix) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let cpt_a = c.matrix.mul_vec(&pt_apply(a, p)?)?;
    Ok(dot(&cpt_a, b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct COperator {
    matrix: ComplexMatrix,
}

/// Deviations of a C operator from its defining identities, each measured in
/// the induced infinity norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct COperatorResiduals {
    /// `‖C² − I‖`
    pub squared: f64,
    /// `‖CH − HC‖`
    pub commutator: f64,
    /// `‖P C* P − C‖`
    pub pt_commutator: f64,
    /// `max |Cᵢⱼ − Cⱼᵢ|`
    pub asymmetry: f64,
}

impl COperator {
    /// Builds `C = Σₙ |εₙ)(εₙ|` from an unbroken spectrum. Each PT-fixed
    /// eigenvector is divided by `√|(v|v)|`; the sign of the norm is kept.
    pub fn from_spectrum(data: &SpectralData, p: &ComplexMatrix, tol: f64) -> Result<Self> {
        match data.phase {
            Phase::Unbroken => {}
            Phase::Broken { conjugate_pairs, .. } => return Err(Error::BrokenPhase { conjugate_pairs }),
            Phase::Exceptional => return Err(Error::ExceptionalPoint("spectrum is defective".into())),
        }
        let n = p.dim();
        let mut c = ComplexMatrix::zeros(n);
        for pair in &data.pairs {
            let norm = pt_inner(&pair.vector, &pair.vector, p)?;
            if norm.norm() < tol {
                return Err(Error::ExceptionalPoint(format!("vanishing PT norm {:e}", norm.norm())));
            }
            let scale = 1.0 / norm.norm().sqrt();
            let ket: Vec<C64> = pair.vector.iter().map(|z| z * scale).collect();
            let bra = pt_conjugate(&ket, p)?;
            for i in 0..n {
                for j in 0..n {
                    c[(i, j)] += ket[i] * bra[j];
                }
            }
        }
        Ok(COperator { matrix: c })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn residuals(&self, h: &ComplexMatrix, p: &ComplexMatrix) -> Result<COperatorResiduals> {
        let c = &self.matrix;
        Ok(COperatorResiduals {
            squared: c.mul(c)?.distance_from_identity(),
            commutator: c.commutator(h)?.norm_inf(),
            pt_commutator: p.mul(&c.conj())?.mul(p)?.sub(c)?.norm_inf(),
            asymmetry: c.max_abs_diff(&c.transpose())?,
        })
    }
}

/// Classifies the system and builds its C operator; fails outside the
/// unbroken phase.
pub fn build_c_operator(sys: &PtSystem, tol: f64) -> Result<COperator> {
    let data = classify_phase(sys, tol)?;
    COperator::from_spectrum(&data, sys.p(), tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    matrix: ComplexMatrix,
}

impl WeightMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `(a|W|b) = [PT a]ᵀ W b`.
    pub fn inner(&self, a: &[C64], b: &[C64], p: &ComplexMatrix) -> Result<C64> {
        Ok(dot(&pt_conjugate(a, p)?, &self.matrix.mul_vec(b)?))
    }
}

/// Solves `(εₘ|W|εₙ) = δₘₙ` over the given basis: with `V` the matrix of
/// kets and `L` the matrix of PT-conjugate rows, `L W V = I`.
pub fn build_weight_matrix(eigvecs: &[Vec<C64>], p: &ComplexMatrix) -> Result<WeightMatrix> {
    let v = ComplexMatrix::from_columns(eigvecs)?;
    if v.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: v.dim() });
    }
    let cond = v.condition_one();
    if cond.is_nan() || cond >= WEIGHT_CONDITION_CAP {
        return Err(Error::Singular(cond));
    }
    let rows: Vec<Vec<C64>> = eigvecs.iter().map(|e| pt_conjugate(e, p)).collect::<Result<_>>()?;
    let l = ComplexMatrix::from_rows(&rows)?;
    let matrix = l.inverse()?.mul(&v.inverse()?)?;
    Ok(WeightMatrix { matrix })
}
