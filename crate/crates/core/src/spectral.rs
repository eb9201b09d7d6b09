//! PT-phase classification and PT-normalized eigenbases.
//!
//! In the unbroken phase every eigenvector `v` of `H` is mapped by `PT` onto
//! a phase multiple of itself, `PT v = e^{iθ} v`; rescaling by `e^{iθ/2}`
//! makes it a fixed point of `PT`. The sign of the PT norm `(v|v)` of each
//! fixed eigenvector is the spectral data the C operator is built from.

use serde::Serialize;

use crate::algebra::pt_inner;
use crate::construction::PtSystem;
use crate::error::{Error, Result};
use crate::linalg::{eigendecompose, eigenvalue_conditions, hdot, norm2, ComplexMatrix, EigenPair, C64, I};

/// Largest eigenvalue condition number for which a spectrum is treated as
/// diagonalizable. Near a coalescence of two eigenvalues the condition
/// number grows like `1/√δ` in the distance `δ` from the exceptional point.
pub const EXCEPTIONAL_CONDITION: f64 = 1e3;

/// Eigenvalues closer than this (relative to `‖H‖_F`) are treated as one
/// degenerate cluster when building PT-invariant eigenbases.
const CLUSTER_REL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Unbroken,
    Broken { real_count: usize, conjugate_pairs: usize },
    Exceptional,
}

impl Phase {
    pub fn tag(&self) -> &'static str {
        match self {
            Phase::Unbroken => "unbroken",
            Phase::Broken { .. } => "broken",
            Phase::Exceptional => "exceptional",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Eigenpairs sorted by eigenvalue; in the unbroken phase the vectors are
    /// PT-fixed (`PT v = v`) with unit 2-norm.
    pub pairs: Vec<EigenPair>,
    pub phase: Phase,
    /// Sign of `(v|v)` for each vector, unbroken phase only.
    pub pt_norm_signs: Vec<i8>,
    /// `(v|v)` for each vector, unbroken phase only.
    pub pt_norms: Vec<f64>,
    /// Eigenvalue condition numbers, empty if the eigenvectors are singular.
    pub conditions: Vec<f64>,
}

impl SpectralData {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn is_unbroken(&self) -> bool {
        self.phase == Phase::Unbroken
    }

    pub fn summary(&self) -> SpectralSummary {
        let (real_count, conjugate_pairs) = match self.phase {
            Phase::Broken { real_count, conjugate_pairs } => (real_count, conjugate_pairs),
            Phase::Unbroken => (self.pairs.len(), 0),
            Phase::Exceptional => (0, 0),
        };
        SpectralSummary {
            eigenvalues: self.pairs.iter().map(|p| [p.value.re, p.value.im]).collect(),
            phase: self.phase.tag(),
            real_count,
            conjugate_pairs,
            signs: self.pt_norm_signs.clone(),
            residuals: self.pairs.iter().map(|p| p.residual).collect(),
        }
    }
}

/// JSON form of [`SpectralData`].
#[derive(Clone, Debug, Serialize)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<[f64; 2]>,
    pub phase: &'static str,
    pub real_count: usize,
    pub conjugate_pairs: usize,
    pub signs: Vec<i8>,
    pub residuals: Vec<f64>,
}

/// `PT v = P v*`.
pub fn pt_apply(v: &[C64], p: &ComplexMatrix) -> Result<Vec<C64>> {
    let conj: Vec<C64> = v.iter().map(|z| z.conj()).collect();
    p.mul_vec(&conj)
}

/// Rescales `v` by `e^{iθ/2}` where `PT v = e^{iθ} v`, so the result is a
/// fixed point of `PT`. The leftover `±` ambiguity is resolved by giving the
/// largest-magnitude entry a nonnegative real part (nonnegative imaginary
/// part if that entry is numerically imaginary).
pub fn fix_pt_phase(v: &[C64], p: &ComplexMatrix, tol: f64) -> Result<Vec<C64>> {
    let image = pt_apply(v, p)?;
    let den = hdot(v, v).re;
    if den == 0.0 {
        return Err(Error::InvalidArgument("cannot phase-fix the zero vector".into()));
    }
    let ratio = hdot(v, &image) / den;
    let mut theta = ratio.arg();
    if theta <= -std::f64::consts::PI {
        theta = std::f64::consts::PI;
    }
    let rotor = C64::from_polar(1.0, theta);
    let mismatch = image.iter().zip(v).map(|(a, b)| (a - rotor * b).norm_sqr()).sum::<f64>().sqrt();
    if mismatch > tol * den.sqrt() {
        return Err(Error::NotPtCollinear(mismatch / den.sqrt()));
    }
    let half = C64::from_polar(1.0, theta / 2.0);
    let mut out: Vec<C64> = v.iter().map(|&z| z * half).collect();
    canonical_sign(&mut out);
    Ok(out)
}

fn canonical_sign(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(lead) = v.iter().copied().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let key = if lead.re.abs() > 1e-9 * lead.norm() { lead.re } else { lead.im };
        if key < 0.0 {
            v.iter_mut().for_each(|z| *z = -*z);
        }
    }
}

fn is_real_eigenvalue(z: C64, tol: f64) -> bool {
    z.im.abs() <= tol * z.norm().max(1.0)
}

/// Greedy matching of non-real eigenvalues into conjugate pairs
/// `{λ, μ}` with `μ ≈ λ*`. Returns the index pairs and the worst
/// `|λ − μ*|`.
pub fn conjugate_pairs(values: &[C64], tol: f64) -> (Vec<(usize, usize)>, f64) {
    let complex: Vec<usize> = (0..values.len()).filter(|&i| !is_real_eigenvalue(values[i], tol)).collect();
    let mut used = vec![false; values.len()];
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for &i in &complex {
        if used[i] {
            continue;
        }
        let best = complex
            .iter()
            .copied()
            .filter(|&j| j != i && !used[j])
            .map(|j| (j, (values[i] - values[j].conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, gap)) = best {
            used[i] = true;
            used[j] = true;
            worst = worst.max(gap);
            out.push((i.min(j), i.max(j)));
        }
    }
    (out, worst)
}

/// Eigendecomposes `H` and decides the PT phase.
///
/// * `Exceptional` when the eigenvector matrix is singular, an eigenvalue
///   condition number exceeds [`EXCEPTIONAL_CONDITION`], or a degenerate
///   real cluster admits no PT-invariant basis.
/// * `Unbroken` when every eigenvalue is real (`|Im λ| ≤ tol·max(1, |λ|)`)
///   and every eigenvector could be made PT-fixed.
/// * `Broken` otherwise.
pub fn classify_phase(sys: &PtSystem, tol: f64) -> Result<SpectralData> {
    let h = sys.h();
    let p = sys.p();
    let pairs = eigendecompose(h, tol)?;
    let exceptional = |pairs: Vec<EigenPair>, conditions: Vec<f64>| SpectralData {
        pairs,
        phase: Phase::Exceptional,
        pt_norm_signs: Vec::new(),
        pt_norms: Vec::new(),
        conditions,
    };

    let conditions = match eigenvalue_conditions(&pairs) {
        Ok(c) => c,
        Err(Error::Singular(_)) => return Ok(exceptional(pairs, Vec::new())),
        Err(e) => return Err(e),
    };
    if conditions.iter().any(|&k| k.is_nan() || k > EXCEPTIONAL_CONDITION) {
        return Ok(exceptional(pairs, conditions));
    }

    let values: Vec<C64> = pairs.iter().map(|p| p.value).collect();
    let real_count = values.iter().filter(|&&z| is_real_eigenvalue(z, tol)).count();
    if real_count < values.len() {
        let (matched, _) = conjugate_pairs(&values, tol);
        return Ok(SpectralData {
            pairs,
            phase: Phase::Broken { real_count, conjugate_pairs: matched.len() },
            pt_norm_signs: Vec::new(),
            pt_norms: Vec::new(),
            conditions,
        });
    }

    let fixed = match pt_fixed_eigenbasis(h, p, &pairs, tol) {
        Ok(f) => f,
        Err(Error::NotPtCollinear(_) | Error::ExceptionalPoint(_)) => return Ok(exceptional(pairs, conditions)),
        Err(e) => return Err(e),
    };
    let mut pt_norms = Vec::with_capacity(fixed.len());
    for pair in &fixed {
        pt_norms.push(pt_inner(&pair.vector, &pair.vector, p)?.re);
    }
    let pt_norm_signs = pt_norms.iter().map(|&n| if n >= 0.0 { 1 } else { -1 }).collect();
    Ok(SpectralData { pairs: fixed, phase: Phase::Unbroken, pt_norm_signs, pt_norms, conditions })
}

/// Sign of `(εₙ|εₙ)` for each PT-fixed eigenvector, in eigenvalue order.
pub fn pt_norm_signature(sys: &PtSystem, tol: f64) -> Result<Vec<i8>> {
    let data = classify_phase(sys, tol)?;
    match data.phase {
        Phase::Unbroken => Ok(data.pt_norm_signs),
        Phase::Broken { conjugate_pairs, .. } => Err(Error::BrokenPhase { conjugate_pairs }),
        Phase::Exceptional => Err(Error::ExceptionalPoint("PT norms are undefined at an exceptional point".into())),
    }
}

fn pt_fixed_eigenbasis(h: &ComplexMatrix, p: &ComplexMatrix, pairs: &[EigenPair], tol: f64) -> Result<Vec<EigenPair>> {
    let radius = CLUSTER_REL * h.norm_fro().max(f64::MIN_POSITIVE);
    let mut out = pairs.to_vec();
    let mut done = vec![false; pairs.len()];
    for i in 0..pairs.len() {
        if done[i] {
            continue;
        }
        let cluster: Vec<usize> =
            (i..pairs.len()).filter(|&j| !done[j] && (pairs[j].value - pairs[i].value).norm() <= radius).collect();
        cluster.iter().for_each(|&j| done[j] = true);
        if cluster.len() == 1 {
            out[i].vector = fix_pt_phase(&pairs[i].vector, p, tol)?;
            continue;
        }
        let vs: Vec<Vec<C64>> = cluster.iter().map(|&j| pairs[j].vector.clone()).collect();
        let basis = pt_invariant_basis(&vs, p, tol)?;
        for (&j, v) in cluster.iter().zip(basis) {
            let residual = {
                let hv = h.mul_vec(&v)?;
                hv.iter().zip(&v).map(|(a, b)| (a - pairs[j].value * b).norm_sqr()).sum::<f64>().sqrt()
            };
            out[j] = EigenPair { value: pairs[j].value, vector: v, residual };
        }
    }
    Ok(out)
}

/// PT-fixed basis of the span of `vs`, mutually orthogonal under the PT
/// inner product. `vs` must span a PT-invariant subspace.
fn pt_invariant_basis(vs: &[Vec<C64>], p: &ComplexMatrix, tol: f64) -> Result<Vec<Vec<C64>>> {
    let k = vs.len();
    // v + PT v and i(v − PT v) are both fixed by PT.
    let mut candidates = Vec::with_capacity(2 * k);
    for v in vs {
        let image = pt_apply(v, p)?;
        candidates.push(v.iter().zip(&image).map(|(a, b)| a + b).collect::<Vec<_>>());
        candidates.push(v.iter().zip(&image).map(|(a, b)| I * (a - b)).collect::<Vec<_>>());
    }

    let mut selected: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut ortho: Vec<Vec<C64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let best = candidates
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let mut r = c.clone();
                for q in &ortho {
                    let coef = hdot(q, &r);
                    r.iter_mut().zip(q).for_each(|(x, y)| *x -= coef * y);
                }
                let rel = norm2(&r) / norm2(c).max(f64::MIN_POSITIVE);
                (idx, rel, r)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let (idx, rel, mut r) = best.ok_or_else(|| Error::ExceptionalPoint("empty cluster".into()))?;
        if rel < 1e-6 {
            return Err(Error::ExceptionalPoint("degenerate cluster has no PT-invariant basis".into()));
        }
        let mut c = candidates.swap_remove(idx);
        scale_to_unit(&mut c);
        scale_to_unit(&mut r);
        selected.push(c);
        ortho.push(r);
    }

    // Indefinite Gram–Schmidt under g(a, b) = aᵀ b, which is real on fixed
    // vectors; real coefficients keep every vector fixed by PT.
    let g = |a: &[C64], b: &[C64]| crate::linalg::dot(a, b).re;
    let mut rest = selected;
    let mut out = Vec::with_capacity(k);
    while !rest.is_empty() {
        let (mut idx, mut gmax) = (0, 0.0);
        for (j, r) in rest.iter().enumerate() {
            let gj = g(r, r).abs();
            if gj > gmax {
                (idx, gmax) = (j, gj);
            }
        }
        if gmax <= 1e-6 {
            // All remaining vectors are PT-null; try a sum of two of them.
            let mut fixed = false;
            'outer: for a in 0..rest.len() {
                for b in a + 1..rest.len() {
                    let sum: Vec<C64> = rest[a].iter().zip(&rest[b]).map(|(x, y)| x + y).collect();
                    if g(&sum, &sum).abs() > 1e-6 * norm2(&sum).powi(2) {
                        rest[a] = sum;
                        idx = a;
                        fixed = true;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                return Err(Error::ExceptionalPoint("cluster is PT-null".into()));
            }
        }
        let u = rest.swap_remove(idx);
        let guu = g(&u, &u);
        for r in rest.iter_mut() {
            let coef = g(&u, r) / guu;
            r.iter_mut().zip(&u).for_each(|(x, y)| *x -= y * coef);
        }
        out.push(u);
    }

    for v in out.iter_mut() {
        scale_to_unit(v);
        let image = pt_apply(v, p)?;
        let mismatch = crate::linalg::max_abs_diff(&image, v);
        if mismatch > tol.max(1e3 * f64::EPSILON) {
            return Err(Error::NotPtCollinear(mismatch));
        }
        canonical_sign(v);
    }
    Ok(out)
}

fn scale_to_unit(v: &mut [C64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}
