//! Dense complex matrices and the small set of kernels everything else is
//! built from: products, predicates, norms, LU inversion, a general complex
//! eigensolver and an eigenbasis-driven matrix exponential.

mod eigen;
mod expm;

pub use eigen::{eigendecompose, eigenvalue_conditions, eigenvector_matrix, EigenPair, MAX_DIM};
pub use expm::{mat_exp_times, Propagator, DEFECTIVE_CONDITION_CAP};

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance wherever a caller does not state one.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
///
/// Serializes as `{"dim": D, "entries": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let entries = repr.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_row_major(repr.dim, entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr { dim: m.dim, entries: m.entries.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Ok(ComplexMatrix { dim, entries })
    }

    /// Builds a matrix from nested rows. All rows must have the same length
    /// as the number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(dim, entries)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let dim = columns.len();
        let mut m = Self::zeros(dim.max(1));
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: col.len() });
            }
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().map(|&z| f(z)).collect() }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        mat_mul(self, other)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok((0..self.dim).map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum()).collect())
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm_fro(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Induced one norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest deviation of `self` from `I`, in the induced infinity norm.
    pub fn distance_from_identity(&self) -> f64 {
        self.sub(&Self::identity(self.dim)).map(|d| d.norm_inf()).unwrap_or(f64::INFINITY)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.pairwise_all(|a, b| (a - b).norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    /// `M^T M = I` entrywise within `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.transpose()
            .mul(self)
            .map(|g| g.max_abs_diff(&Self::identity(self.dim)).unwrap_or(f64::INFINITY) <= tol)
            .unwrap_or(false)
    }

    fn pairwise_all(&self, f: impl Fn(C64, C64) -> bool) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i + 1..n).all(|j| f(self[(i, j)], self[(j, i)])))
    }

    /// Replaces the matrix by `(M + M^T) / 2`, making it exactly symmetric.
    pub fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                let avg = (self[(i, j)] + self[(j, i)]) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// Inverse via LU with partial pivoting. Fails when a pivot vanishes
    /// relative to the matrix scale.
    pub fn inverse(&self) -> Result<Self> {
        let lu = Lu::factor(self)?;
        let n = self.dim;
        let mut inv = Self::zeros(n);
        let mut e = vec![ZERO; n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = ZERO);
            e[j] = ONE;
            let x = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        Ok(inv)
    }

    /// One-norm condition estimate `‖M‖₁ ‖M⁻¹‖₁`; infinite when singular.
    pub fn condition_one(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm_one() * inv.norm_one(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Standard matrix product.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    let n = a.dim;
    let mut c = ComplexMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                c.entries[i * n + j] += aik * b.entries[k * n + j];
            }
        }
    }
    Ok(c)
}

struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(m: &ComplexMatrix) -> Result<Self> {
        let n = m.dim;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs();
        let tiny = f64::EPSILON * scale * n as f64;
        if scale == 0.0 {
            return Err(Error::Singular(f64::INFINITY));
        }
        for k in 0..n {
            let (piv, piv_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs <= tiny {
                return Err(Error::Singular(scale / piv_abs.max(f64::MIN_POSITIVE)));
            }
            if piv != k {
                for j in 0..n {
                    lu.entries.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: C64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: C64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}

/// Bilinear dot product `aᵀ b` (no conjugation).
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Hermitian product `aᴴ b`.
pub fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(&x, &y)| x.conj() * y).sum()
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0)],
            vec![C64::new(0.0, 3.0), C64::new(4.0, -1.0)],
        ])
        .unwrap();
        let i = ComplexMatrix::identity(2);
        assert_eq!(mat_mul(&i, &m).unwrap(), m);
        assert_eq!(mat_mul(&m, &i).unwrap(), m);
    }

    #[test]
    fn involutions_square_to_identity() {
        let d = real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(mat_mul(&d, &d).unwrap(), ComplexMatrix::identity(2));
        let swap = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(mat_mul(&swap, &swap).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(matches!(mat_mul(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(ComplexMatrix::from_row_major(2, vec![ONE; 3]).is_err());
    }

    #[test]
    fn predicates() {
        let antisym = real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(!antisym.is_symmetric(1e-12));
        assert!(!antisym.is_hermitian(1e-12));
        assert!(antisym.is_real(0.0));
        assert!(antisym.is_orthogonal(1e-12));

        let herm = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        assert!(herm.is_hermitian(0.0));
        assert!(!herm.is_symmetric(1e-12));
    }

    #[test]
    fn inverse_round_trip() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(2.0, 1.0), C64::new(0.5, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 1.0)],
            vec![C64::new(-1.0, 0.0), C64::new(3.0, 0.5), C64::new(0.2, 0.0)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().distance_from_identity() < 1e-14);
        let singular = real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(singular.inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn json_shape() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, 1.0), C64::new(-1.0, 0.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"dim":2,"entries":[[1.0,0.0],[0.0,1.0],[0.0,1.0],[-1.0,0.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"dim":2,"entries":[[1,0]]}"#).is_err());
    }
}
