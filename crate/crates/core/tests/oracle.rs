use std::f64::consts::TAU;

use ptsym::algebra::{build_c_operator, pt_inner};
use ptsym::construction::{make_parity, ParitySpec, PtSystem, SystemSampler};
use ptsym::linalg::{eigendecompose, max_abs_diff, C64, DEFAULT_TOL};
use ptsym::oracle::{c2, eig2, h2, p2, p3, vec2, ThreeByThreeParityParams, TwoByTwoParams};
use ptsym::spectral::{classify_phase, pt_norm_signature};

fn draw(s: &mut SystemSampler, ratio: f64) -> TwoByTwoParams {
    let t = s.uniform(0.1, 3.0) * if s.uniform(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
    let smax = ratio * t.abs();
    TwoByTwoParams { r: s.uniform(-2.0, 2.0), s: s.uniform(-smax, smax), t, phi: s.uniform(0.0, TAU) }
}

#[test]
fn closed_forms_match_numerics_in_the_unbroken_region() {
    let mut s = SystemSampler::new(500);
    for _ in 0..500 {
        let pr = draw(&mut s, 0.9f64.sqrt());
        let sys = PtSystem::new(h2(&pr), p2(pr.phi)).unwrap();
        let data = classify_phase(&sys, DEFAULT_TOL).unwrap();
        assert!(data.is_unbroken(), "{pr:?}");
        let (ep, em) = eig2(&pr);
        let (plus, minus) = vec2(&pr).unwrap();
        for pair in &data.pairs {
            let (value, oracle, sign) =
                if (pair.value - ep).norm() < (pair.value - em).norm() { (ep, &plus, 1) } else { (em, &minus, -1) };
            assert!((pair.value - value).norm() < 1e-10);
            let norm = pt_inner(&pair.vector, &pair.vector, sys.p()).unwrap().re;
            assert_eq!(norm.signum() as i32, sign);
            let v: Vec<C64> = pair.vector.iter().map(|z| z / norm.abs().sqrt()).collect();
            let neg: Vec<C64> = v.iter().map(|z| -z).collect();
            assert!(max_abs_diff(&v, oracle).min(max_abs_diff(&neg, oracle)) < 1e-8, "{pr:?}");
        }
        let c = build_c_operator(&sys, DEFAULT_TOL).unwrap();
        assert!(c.matrix().max_abs_diff(&c2(&pr).unwrap()).unwrap() < 1e-8);
    }
}

#[test]
fn broken_eigenvalues_match_the_continuation() {
    let mut s = SystemSampler::new(501);
    for _ in 0..200 {
        let mut pr = draw(&mut s, 1.0);
        pr.s = pr.t.abs() * s.uniform(1.1, 3.0) * if s.uniform(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
        let (ep, em) = eig2(&pr);
        assert!(ep.im > 0.0 && (ep.conj() - em).norm() < 1e-12);
        let mut numeric: Vec<C64> = eigendecompose(&h2(&pr), DEFAULT_TOL).unwrap().iter().map(|p| p.value).collect();
        numeric.sort_by(|a, b| b.im.total_cmp(&a.im));
        assert!((numeric[0] - ep).norm() < 1e-10 && (numeric[1] - em).norm() < 1e-10, "{pr:?}");
    }
}

#[test]
fn pt_norm_signs_follow_the_oracle() {
    let pr = TwoByTwoParams { r: 0.0, s: 0.5, t: 1.0, phi: std::f64::consts::FRAC_PI_3 };
    let sys = PtSystem::new(h2(&pr), p2(pr.phi)).unwrap();
    // Ascending eigenvalues: ε₋ then ε₊.
    assert_eq!(pt_norm_signature(&sys, DEFAULT_TOL).unwrap(), vec![-1, 1]);
}

#[test]
fn three_dimensional_parity_lies_in_the_rotation_family() {
    let mut s = SystemSampler::new(502);
    for _ in 0..50 {
        let params = ThreeByThreeParityParams { phi: s.uniform(0.0, TAU), theta: s.uniform(0.0, TAU) };
        let p = p3(&params);
        let values: Vec<f64> = {
            let mut v: Vec<f64> = eigendecompose(&p, DEFAULT_TOL).unwrap().iter().map(|e| e.value.re).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        assert!((values[0] + 1.0).abs() < 1e-12 && (values[1] - 1.0).abs() < 1e-12 && (values[2] - 1.0).abs() < 1e-12);
    }
    // The rotation family with signature (2, 1) reaches the same matrices.
    let target = p3(&ThreeByThreeParityParams { phi: std::f64::consts::FRAC_PI_2, theta: 0.0 });
    let built = make_parity(&ParitySpec::new(2, 1, vec![0.0, std::f64::consts::FRAC_PI_2, 0.0]).unwrap()).unwrap();
    assert!(built.max_abs_diff(&target).unwrap() < 1e-15);
}
