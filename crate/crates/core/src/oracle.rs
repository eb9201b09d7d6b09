//! Closed forms for the general two-level PT-symmetric Hamiltonian and the
//! two- and three-dimensional parity operators. These serve as independent
//! references for the numerical pipeline.
//!
//! The two-level Hamiltonian is parameterized by `(r, s, t, φ)` and
//! `sin α = s/t`; the PT symmetry is unbroken for `s² < t²`.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoByTwoParams {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub phi: f64,
}

impl TwoByTwoParams {
    /// `s² < t²`, strictly; equality is the exceptional point.
    pub fn is_unbroken(&self) -> bool {
        self.s * self.s < self.t * self.t
    }

    /// `cos α` with `sin α = s/t` on the principal branch. Past the
    /// exceptional point it continues to `i·sgn(t)·√(s²/t² − 1)` so that
    /// `ε₊` has positive imaginary part.
    pub fn cos_alpha(&self) -> Option<C64> {
        if self.t == 0.0 {
            return None;
        }
        let ratio = self.s / self.t;
        let q = 1.0 - ratio * ratio;
        Some(if q >= 0.0 { C64::new(q.sqrt(), 0.0) } else { C64::new(0.0, (-q).sqrt() * self.t.signum()) })
    }

    pub fn sin_alpha(&self) -> Option<f64> {
        (self.t != 0.0).then(|| self.s / self.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeByThreeParityParams {
    pub phi: f64,
    pub theta: f64,
}

/// ```text
/// H = [[r + t cos φ − i s sin φ,  i s cos φ + t sin φ],
///      [i s cos φ + t sin φ,      r − t cos φ + i s sin φ]]
/// ```
pub fn h2(params: &TwoByTwoParams) -> ComplexMatrix {
    let TwoByTwoParams { r, s, t, phi } = *params;
    let (sn, cs) = phi.sin_cos();
    let off = C64::new(t * sn, s * cs);
    ComplexMatrix::from_row_major(2, vec![C64::new(r + t * cs, -s * sn), off, off, C64::new(r - t * cs, s * sn)])
        .expect("2x2")
}

/// `[[cos φ, sin φ], [sin φ, −cos φ]]`.
pub fn p2(phi: f64) -> ComplexMatrix {
    let (sn, cs) = phi.sin_cos();
    ComplexMatrix::from_real_rows(&[vec![cs, sn], vec![sn, -cs]]).expect("2x2")
}

/// General three-dimensional parity with signature `(2, 1)`.
pub fn p3(params: &ThreeByThreeParityParams) -> ComplexMatrix {
    let (sp, cp) = params.phi.sin_cos();
    let (st, ct) = params.theta.sin_cos();
    let (s2p, c2p) = (2.0 * params.phi).sin_cos();
    let (s2t, c2t) = (2.0 * params.theta).sin_cos();
    let (sp2, cp2) = (sp * sp, cp * cp);
    ComplexMatrix::from_real_rows(&[
        vec![cp2 - sp2 * c2t, s2p * ct, -sp2 * s2t],
        vec![s2p * ct, -c2p, s2p * st],
        vec![-sp2 * s2t, s2p * st, cp2 + sp2 * c2t],
    ])
    .expect("3x3")
}

/// `(ε₊, ε₋) = r ± t cos α`. At `t = 0` falls back to
/// `r ± √(t² − s²)`, with the `+` root on the positive imaginary axis.
pub fn eig2(params: &TwoByTwoParams) -> (C64, C64) {
    let r = C64::new(params.r, 0.0);
    match params.cos_alpha() {
        Some(ca) => (r + params.t * ca, r - params.t * ca),
        None => {
            let root = C64::new(params.t * params.t - params.s * params.s, 0.0).sqrt();
            (r + root, r - root)
        }
    }
}

fn unbroken_cos_alpha(params: &TwoByTwoParams) -> Result<(f64, f64)> {
    if !params.is_unbroken() {
        return Err(Error::ExceptionalPoint(format!("closed forms need s² < t² (s = {}, t = {})", params.s, params.t)));
    }
    let ca = params.cos_alpha().expect("t != 0 when s² < t²").re;
    Ok((ca, params.s / params.t))
}

/// PT-fixed eigenvectors `(|ε₊), |ε₋))` normalized to PT norms `+1` and
/// `−1`.
///
/// The `1/√(2(1 ∓ cos α) cos α)` prefactor is folded into the components
/// (using `sin α = sgn(sin α)·√((1 − cos α)(1 + cos α))`) so the formula
/// stays finite as `s → 0`.
pub fn vec2(params: &TwoByTwoParams) -> Result<(Vec<C64>, Vec<C64>)> {
    let (ca, sa) = unbroken_cos_alpha(params)?;
    let sg = if sa < 0.0 { -1.0 } else { 1.0 };
    let (sh, ch) = (params.phi / 2.0).sin_cos();
    let k = 1.0 / (2.0 * ca).sqrt();
    let (up, down) = ((1.0 + ca).sqrt(), (1.0 - ca).sqrt());
    let plus = vec![C64::new(k * sg * up * ch, -k * down * sh), C64::new(k * sg * up * sh, k * down * ch)];
    let minus = vec![C64::new(k * sg * down * ch, -k * up * sh), C64::new(k * sg * down * sh, k * up * ch)];
    Ok((plus, minus))
}

/// ```text
/// C = (1/cos α) [[cos φ − i sin α sin φ,   sin φ + i sin α cos φ],
///                [sin φ + i sin α cos φ,  −cos φ + i sin α sin φ]]
/// ```
pub fn c2(params: &TwoByTwoParams) -> Result<ComplexMatrix> {
    let (ca, sa) = unbroken_cos_alpha(params)?;
    let (sn, cs) = params.phi.sin_cos();
    let off = C64::new(sn, sa * cs) / ca;
    ComplexMatrix::from_row_major(2, vec![C64::new(cs, -sa * sn) / ca, off, off, C64::new(-cs, sa * sn) / ca])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{pt_commutes, TimeReversal};
    use crate::linalg::max_abs_diff;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn h2_special_cases() {
        let h = h2(&TwoByTwoParams { r: 0.0, s: 0.0, t: 1.0, phi: 0.0 });
        assert_eq!(h, ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]));

        let (r, s, t) = (0.7, -0.4, 1.3);
        let h = h2(&TwoByTwoParams { r, s, t, phi: FRAC_PI_2 });
        let expect = ComplexMatrix::from_rows(&[vec![c(r, -s), c(t, 0.0)], vec![c(t, 0.0), c(r, s)]]).unwrap();
        assert!(h.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn h2_is_symmetric_and_pt_symmetric() {
        for &(r, s, t, phi) in &[(0.1, 0.3, 0.9, 0.2), (-1.0, 2.0, 0.5, 4.0), (0.0, 0.0, 0.0, 1.0)] {
            let pr = TwoByTwoParams { r, s, t, phi };
            let h = h2(&pr);
            assert!(h.is_symmetric(0.0));
            assert!(pt_commutes(&h, &p2(phi), TimeReversal::Conjugation, 1e-15).unwrap());
            assert!((h.trace() - c(2.0 * r, 0.0)).norm() < 1e-15);
            let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
            assert!((det - c(r * r - t * t + s * s, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn p2_cases() {
        assert!(
            p2(FRAC_PI_2)
                .max_abs_diff(&ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap())
                .unwrap()
                < 1e-16
        );
        assert_eq!(p2(0.0), ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]));
        for phi in [0.3, 1.7, -2.9] {
            assert!(p2(phi).mul(&p2(phi)).unwrap().distance_from_identity() < 1e-15);
        }
    }

    #[test]
    fn p3_cases() {
        let at0 = p3(&ThreeByThreeParityParams { phi: 0.0, theta: 0.8 });
        assert!(
            at0.max_abs_diff(&ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)])).unwrap() < 1e-15
        );
        let special = p3(&ThreeByThreeParityParams { phi: FRAC_PI_2, theta: 0.0 });
        assert!(
            special.max_abs_diff(&ComplexMatrix::from_diagonal(&[c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)])).unwrap()
                < 1e-15
        );
        for k in 0..50 {
            let phi = 0.37 * k as f64 - 3.0;
            let theta = 1.13 * k as f64 + 0.2;
            let p = p3(&ThreeByThreeParityParams { phi, theta });
            assert!(p.is_symmetric(0.0));
            assert!(p.is_orthogonal(1e-14));
            assert!((p.trace() - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eig2_cases() {
        let (a, b) = eig2(&TwoByTwoParams { r: 1.0, s: 0.0, t: 1.0, phi: 0.3 });
        assert!((a - c(2.0, 0.0)).norm() < 1e-15 && (b - c(0.0, 0.0)).norm() < 1e-15);
        let r3 = 3f64.sqrt();
        let (a, b) = eig2(&TwoByTwoParams { r: 1.0, s: 1.0, t: 2.0, phi: 0.0 });
        assert!((a - c(1.0 + r3, 0.0)).norm() < 1e-15 && (b - c(1.0 - r3, 0.0)).norm() < 1e-15);
        let (a, b) = eig2(&TwoByTwoParams { r: 0.0, s: 2.0, t: 1.0, phi: 0.0 });
        assert!((a - c(0.0, r3)).norm() < 1e-15 && (b - c(0.0, -r3)).norm() < 1e-15);
        let (a, _) = eig2(&TwoByTwoParams { r: 0.0, s: 2.0, t: -1.0, phi: 0.0 });
        assert!(a.im > 0.0);
        // t = 0 falls back to the direct closed form.
        let (a, b) = eig2(&TwoByTwoParams { r: 0.5, s: 0.3, t: 0.0, phi: 0.0 });
        assert!((a - c(0.5, 0.3)).norm() < 1e-15 && (b - c(0.5, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn eig2_gap_closes_at_the_exceptional_point() {
        let gaps: Vec<f64> = [0.9, 0.99, 0.999, 0.999999]
            .iter()
            .map(|&s| {
                let (a, b) = eig2(&TwoByTwoParams { r: 0.0, s, t: 1.0, phi: 0.0 });
                (a - b).norm()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[3] < 3e-3);
    }

    #[test]
    fn vec2_at_alpha_zero() {
        let (plus, minus) = vec2(&TwoByTwoParams { r: 0.0, s: 0.0, t: 1.0, phi: 0.0 }).unwrap();
        assert!(max_abs_diff(&plus, &[c(1.0, 0.0), c(0.0, 0.0)]) < 1e-15);
        // PT-fixed for P = diag(1, −1) means the second component is imaginary.
        assert!(max_abs_diff(&minus, &[c(0.0, 0.0), c(0.0, 1.0)]) < 1e-15);
    }

    #[test]
    fn vec2_matches_unsimplified_formula() {
        let pr = TwoByTwoParams { r: 0.2, s: -0.35, t: 0.8, phi: 2.2 };
        let ca = pr.cos_alpha().unwrap().re;
        let sa = pr.s / pr.t;
        let (sh, ch) = (pr.phi / 2.0).sin_cos();
        let raw = |sign: f64| -> Vec<C64> {
            let n = 1.0 / (2.0 * (1.0 - sign * ca) * ca).sqrt();
            let d = 1.0 - sign * ca;
            vec![c(n * sa * ch, -n * d * sh), c(n * sa * sh, n * d * ch)]
        };
        let (plus, minus) = vec2(&pr).unwrap();
        assert!(max_abs_diff(&plus, &raw(1.0)) < 1e-14);
        assert!(max_abs_diff(&minus, &raw(-1.0)) < 1e-14);
    }

    #[test]
    fn vec2_eigen_and_pt_properties() {
        let pr = TwoByTwoParams { r: -0.4, s: 0.6, t: -1.1, phi: 5.0 };
        let h = h2(&pr);
        let p = p2(pr.phi);
        let (ep, em) = eig2(&pr);
        let (plus, minus) = vec2(&pr).unwrap();
        for (v, e) in [(&plus, ep), (&minus, em)] {
            let hv = h.mul_vec(v).unwrap();
            let ev: Vec<C64> = v.iter().map(|z| z * e).collect();
            assert!(max_abs_diff(&hv, &ev) < 1e-14);
            let ptv: Vec<C64> = p.mul_vec(&v.iter().map(|z| z.conj()).collect::<Vec<_>>()).unwrap();
            assert!(max_abs_diff(&ptv, v) < 1e-14);
        }
    }

    #[test]
    fn c2_cases() {
        let pr = TwoByTwoParams { r: 0.0, s: 0.0, t: 1.0, phi: 1.1 };
        assert!(c2(&pr).unwrap().max_abs_diff(&p2(1.1)).unwrap() < 1e-15);
        let pr = TwoByTwoParams { r: 0.5, s: 0.7, t: 1.0, phi: PI / 3.0 };
        let c = c2(&pr).unwrap();
        assert!(c.mul(&c).unwrap().distance_from_identity() < 1e-12);
        assert!(c2(&TwoByTwoParams { r: 0.0, s: 1.0, t: 1.0, phi: 0.0 }).is_err());
        assert!(vec2(&TwoByTwoParams { r: 0.0, s: -1.0, t: 1.0, phi: 0.0 }).is_err());
    }
}
