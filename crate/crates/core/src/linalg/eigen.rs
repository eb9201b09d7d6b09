//! General complex eigensolver for small dense matrices.
//!
//! The matrix is reduced to upper Hessenberg form with Householder
//! reflectors, then driven to upper triangular (complex Schur) form by
//! single-shift QR sweeps using Givens rotations and Wilkinson shifts.
//! Eigenvectors are recovered by back-substitution on the triangular factor
//! and mapped back through the accumulated unitary transform.

use super::{hdot, norm2, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 64;

const EPS: f64 = f64::EPSILON;
/// Per-eigenvalue sweep budget before giving up.
const SWEEPS_PER_EIGENVALUE: usize = 60;
/// Eigenvalues closer than this (relative to `‖M‖_F`) form one cluster.
const CLUSTER_REL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    /// Unit 2-norm eigenvector.
    pub vector: Vec<C64>,
    /// `‖M v − λ v‖₂`.
    pub residual: f64,
}

/// Eigenpairs of `m`, sorted by real then imaginary part.
///
/// Every residual is checked against `tol · max(1, ‖m‖_F)`. Vectors of
/// (numerically) repeated eigenvalues are orthonormalized within their
/// cluster whenever that keeps them eigenvectors; for defective clusters the
/// raw, nearly parallel vectors are returned so callers can detect the
/// coalescence through [`eigenvalue_conditions`].
pub fn eigendecompose(m: &ComplexMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    let n = m.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = m.norm_fro();
    let (t, z) = schur(m)?;
    let smin = (EPS * norm).max(f64::MIN_POSITIVE);

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let x = triangular_eigenvector(&t, k, smin);
            let mut v = z.mul_vec(&x).expect("square");
            normalize(&mut v);
            let value = t[(k, k)];
            let residual = residual(m, value, &v);
            EigenPair { value, vector: v, residual }
        })
        .collect();

    pairs.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));

    for cluster in clusters(&pairs, CLUSTER_REL * norm.max(f64::MIN_POSITIVE)) {
        if cluster.len() > 1 {
            orthonormalize_cluster(m, &mut pairs, &cluster);
        }
    }

    let bound = tol * norm.max(1.0);
    if let Some(worst) = pairs.iter().map(|p| p.residual).max_by(f64::total_cmp) {
        if worst.is_nan() || worst > bound {
            return Err(Error::ResidualTooLarge { residual: worst, tol: bound });
        }
    }
    Ok(pairs)
}

/// Matrix whose columns are the eigenvectors, in the order given.
pub fn eigenvector_matrix(pairs: &[EigenPair]) -> Result<ComplexMatrix> {
    let cols: Vec<Vec<C64>> = pairs.iter().map(|p| p.vector.clone()).collect();
    ComplexMatrix::from_columns(&cols)
}

/// Condition number of each eigenvalue, `‖yᵢ‖ ‖vᵢ‖ / |yᵢᴴ vᵢ|`, where the
/// left eigenvectors `yᵢ` are the rows of the inverse eigenvector matrix.
///
/// Errors with [`Error::Singular`] when the eigenvectors are linearly
/// dependent (a defective matrix).
pub fn eigenvalue_conditions(pairs: &[EigenPair]) -> Result<Vec<f64>> {
    let s = eigenvector_matrix(pairs)?;
    let inv = s.inverse()?;
    Ok(pairs.iter().enumerate().map(|(i, p)| norm2(inv.row(i)) * norm2(&p.vector)).collect())
}

fn residual(m: &ComplexMatrix, value: C64, v: &[C64]) -> f64 {
    let mv = m.mul_vec(v).expect("square");
    mv.iter().zip(v).map(|(a, b)| (a - value * b).norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) -> f64 {
    let nrm = norm2(v);
    if nrm > 0.0 {
        v.iter_mut().for_each(|z| *z /= nrm);
    }
    nrm
}

/// Complex Schur decomposition `M = Z T Zᴴ`.
pub(crate) fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = m.dim();
    let mut t = m.clone();
    let mut z = ComplexMatrix::identity(n);
    hessenberg(&mut t, &mut z);
    if n == 1 {
        return Ok((t, z));
    }

    let norm = t.norm_fro();
    let budget = SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let mut scale = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if t[(lo, lo - 1)].norm() <= EPS * scale {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::NonConvergence(total));
        }

        let shift = if since_deflation.is_multiple_of(11) {
            // Ad hoc shift to break rare cycles.
            t[(hi, hi)] + C64::new(t[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        qr_sweep(&mut t, &mut z, lo, hi, shift);
    }

    // Clear the (already negligible) subdiagonal.
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok((t, z))
}

fn hessenberg(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let col_norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if col_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * col_norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vn2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vn2;

        // A <- (I - beta v vᴴ) A on rows k+1.., all columns from k.
        for j in k..n {
            let s: C64 = v.iter().enumerate().map(|(r, vi)| vi.conj() * a[(k + 1 + r, j)]).sum();
            let s = s * beta;
            for (r, vi) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= s * vi;
            }
        }
        // A <- A (I - beta v vᴴ) on columns k+1.., all rows; same for Q.
        for mat in [&mut *a, &mut *q] {
            for i in 0..n {
                let s: C64 = v.iter().enumerate().map(|(c, vj)| mat[(i, k + 1 + c)] * vj).sum();
                let s = s * beta;
                for (c, vj) in v.iter().enumerate() {
                    mat[(i, k + 1 + c)] -= s * vj.conj();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let delta = (a - d) * 0.5;
    let bc = b * c;
    let disc = (delta * delta + bc).sqrt();
    let plus = delta + disc;
    let minus = delta - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

/// Rotation `(c, s)` with `c` real such that
/// `[c, s; -s̄, c] [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

fn qr_sweep(t: &mut ComplexMatrix, z: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    let n = t.dim();
    for k in lo..=hi {
        t[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
        for j in k..n {
            let x = t[(k, j)];
            let y = t[(k + 1, j)];
            t[(k, j)] = x * c + s * y;
            t[(k + 1, j)] = -s.conj() * x + y * c;
        }
        t[(k + 1, k)] = ZERO;
        rotations.push((c, s));
    }
    for (k, &(c, s)) in (lo..hi).zip(&rotations) {
        for i in 0..=k + 1 {
            let p = t[(i, k)];
            let q = t[(i, k + 1)];
            t[(i, k)] = p * c + s.conj() * q;
            t[(i, k + 1)] = -s * p + q * c;
        }
        for i in 0..n {
            let p = z[(i, k)];
            let q = z[(i, k + 1)];
            z[(i, k)] = p * c + s.conj() * q;
            z[(i, k + 1)] = -s * p + q * c;
        }
    }
    for k in lo..=hi {
        t[(k, k)] += shift;
    }
}

/// Solves `(T − t_kk I) x = 0` with `x_k = 1` and `x_j = 0` for `j > k`.
/// Divisors smaller than `smin` are replaced by `smin`.
fn triangular_eigenvector(t: &ComplexMatrix, k: usize, smin: f64) -> Vec<C64> {
    let n = t.dim();
    let lambda = t[(k, k)];
    let mut x = vec![ZERO; n];
    x[k] = ONE;
    for i in (0..k).rev() {
        let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * x[j]).sum();
        let mut d = t[(i, i)] - lambda;
        if d.norm() < smin {
            d = C64::new(smin, 0.0);
        }
        x[i] = -s / d;
        // Keep the partial solution away from overflow.
        let big = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if big > 1e150 {
            x.iter_mut().for_each(|z| *z /= big);
        }
    }
    x
}

/// Groups indices whose eigenvalues lie within `radius` of each other
/// (transitively).
fn clusters(pairs: &[EigenPair], radius: f64) -> Vec<Vec<usize>> {
    let n = pairs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (pairs[i].value - pairs[j].value).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_to_group[r] == usize::MAX {
            root_to_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_to_group[r]].push(i);
    }
    groups
}

fn orthonormalize_cluster(m: &ComplexMatrix, pairs: &mut [EigenPair], cluster: &[usize]) {
    let worst_before = cluster.iter().map(|&i| pairs[i].residual).fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cluster.len());
    for &i in cluster {
        let mut v = pairs[i].vector.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = hdot(b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        if normalize(&mut v) < 1e-6 {
            // Dependent vectors: the cluster is defective.
            return;
        }
        basis.push(v);
    }
    let updated: Vec<(C64, Vec<C64>, f64)> = cluster
        .iter()
        .zip(basis)
        .map(|(&i, v)| {
            let value = pairs[i].value;
            let r = residual(m, value, &v);
            (value, v, r)
        })
        .collect();
    let worst_after = updated.iter().map(|u| u.2).fold(0.0, f64::max);
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    if worst_after <= (10.0 * worst_before).max(1e3 * EPS * scale) {
        for (&i, (value, vector, residual)) in cluster.iter().zip(updated) {
            pairs[i] = EigenPair { value, vector, residual };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn values(pairs: &[EigenPair]) -> Vec<C64> {
        pairs.iter().map(|p| p.value).collect()
    }

    #[test]
    fn diagonal_matrix() {
        let m = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(0.0, 0.0)]);
        let pairs = eigendecompose(&m, DEFAULT_TOL).unwrap();
        let v = values(&pairs);
        assert!((v[0] - c(0.0, 0.0)).norm() < 1e-15);
        assert!((v[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        // [[a, b], [b, d]] with a = 1 - i, d = 1 + i, b = 2: λ = 1 ± √(b² − 1) = 1 ± √3
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, -1.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(1.0, 1.0)]]).unwrap();
        let v = values(&eigendecompose(&m, DEFAULT_TOL).unwrap());
        let r3 = 3f64.sqrt();
        assert!((v[0] - c(1.0 - r3, 0.0)).norm() < 1e-12);
        assert!((v[1] - c(1.0 + r3, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn upper_triangular_and_jordan_like() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(5.0, 0.0), c(0.0, 2.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(3.0, 1.0)],
        ])
        .unwrap();
        let pairs = eigendecompose(&m, DEFAULT_TOL).unwrap();
        let v = values(&pairs);
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-13);
        assert!((v[1] - c(2.0, 0.0)).norm() < 1e-13);
        assert!((v[2] - c(3.0, 1.0)).norm() < 1e-13);

        // A Jordan block still yields residual-small (parallel) vectors.
        let j = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let pairs = eigendecompose(&j, DEFAULT_TOL).unwrap();
        assert!(eigenvalue_conditions(&pairs).map(|k| k[0] > 1e8).unwrap_or(true));
    }

    #[test]
    fn repeated_eigenvalue_gets_orthonormal_vectors() {
        let m = ComplexMatrix::identity(4).scale(c(2.5, 0.0));
        let pairs = eigendecompose(&m, DEFAULT_TOL).unwrap();
        let s = eigenvector_matrix(&pairs).unwrap();
        assert!(s.adjoint().mul(&s).unwrap().distance_from_identity() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(eigendecompose(&m, DEFAULT_TOL), Err(Error::NonFinite)));
        assert!(matches!(
            eigendecompose(&ComplexMatrix::identity(65), DEFAULT_TOL),
            Err(Error::UnsupportedDimension(65))
        ));
    }

    #[test]
    fn givens_zeroes_second_component() {
        for (a, b) in [(c(1.0, 2.0), c(-0.5, 0.3)), (c(0.0, 0.0), c(0.0, 1.0)), (c(3.0, 0.0), c(0.0, 0.0))] {
            let (cs, s) = givens(a, b);
            let y = -s.conj() * a + b * cs;
            assert!(y.norm() < 1e-15);
            assert!((cs * cs + s.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }
}
