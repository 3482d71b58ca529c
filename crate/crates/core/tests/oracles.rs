//! Closed-form values computed independently of the library's code paths.

use symdomain::calculus::{duality_f, duality_g, DualityMethod};
use symdomain::forms::{form_matrix, log_det_bergman, omega0, FormKind};
use symdomain::peirce::{projector_rank, PeirceIndex, SimultaneousPeirce};
use symdomain::pullback::{directional_derivative, DualityF, DEFAULT_FD_STEP};
use symdomain::spectral::{classify, frame_decompose, spectral_norm, SUPER_REGULAR_TOL};
use symdomain::triple::{bergman_operator, C64};
use symdomain::{Element, TripleSystem};

const METHODS: [DualityMethod; 3] = [DualityMethod::Spectral, DualityMethod::Operator, DualityMethod::HalfD];

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn disc_duality_at_six_tenths() {
    let z = Element::new(TripleSystem::disc(), vec![C64::new(0.6, 0.0)]).unwrap();
    for m in METHODS {
        let f = duality_f(&z, m).unwrap();
        assert!((f.coords()[0] - C64::new(0.75, 0.0)).norm() < 1e-12, "{m:?}");
        let g = duality_g(&f, m).unwrap();
        assert!((g.coords()[0] - C64::new(0.6, 0.0)).norm() < 1e-12, "{m:?}");
    }
}

#[test]
fn disc_duality_closed_form_off_axis() {
    let w = C64::new(0.3, -0.5);
    let z = Element::new(TripleSystem::disc(), vec![w]).unwrap();
    let expected = w / (1.0 - w.norm_sqr()).sqrt();
    for m in METHODS {
        assert!((duality_f(&z, m).unwrap().coords()[0] - expected).norm() < 1e-12);
    }
}

#[test]
fn disc_duality_derivative_on_real_axis() {
    let disc = TripleSystem::disc();
    let one = Element::new(disc, vec![C64::new(1.0, 0.0)]).unwrap();
    for t in [0.0, 0.25, 0.5, 0.8] {
        let z = &one * t;
        let d = directional_derivative(&DualityF::default(), &z, &one, DEFAULT_FD_STEP).unwrap();
        let expected = (1.0 - t * t).powf(-1.5);
        assert!(
            close(d.coords()[0].re, expected, 1e-8),
            "t = {t}: {} vs {expected}",
            d.coords()[0].re
        );
        assert!(d.coords()[0].im.abs() < 1e-9);
    }
}

#[test]
fn type_i_duality_on_diagonal() {
    let sys = TripleSystem::type_i(2, 2).unwrap();
    let z = Element::diagonal(sys, &[0.5, 0.3]).unwrap();
    let expected = Element::diagonal(sys, &[0.5 / 0.75f64.sqrt(), 0.3 / 0.91f64.sqrt()]).unwrap();
    for m in METHODS {
        assert!((duality_f(&z, m).unwrap() - &expected).max_abs() < 1e-12, "{m:?}");
    }
}

#[test]
fn disc_form_densities() {
    let disc = TripleSystem::disc();
    let w = C64::new(0.3, 0.4);
    let z = Element::new(disc, vec![w]).unwrap();
    let flat = form_matrix(FormKind::Flat, &z).unwrap().matrix[(0, 1)];
    assert!(close(flat.abs(), 2.0, 1e-15));
    let r2 = w.norm_sqr();
    let hyp = form_matrix(FormKind::Hyperbolic, &z).unwrap().matrix[(0, 1)];
    let fs = form_matrix(FormKind::FubiniStudy, &z).unwrap().matrix[(0, 1)];
    assert!(close(hyp / flat, (1.0 - r2).powi(-2), 1e-12));
    assert!(close(fs / flat, (1.0 + r2).powi(-2), 1e-12));
}

#[test]
fn flat_form_on_basis() {
    let sys = TripleSystem::type_i(2, 3).unwrap();
    let e = sys.basis(0);
    let ie = e.scale(C64::new(0.0, 1.0));
    // -Im((e | ie)) with (e | e) = p + q
    assert!(close(omega0(&sys.zero(), &e, &ie).unwrap(), 5.0, 1e-15));
    assert!(close(omega0(&sys.zero(), &ie, &e).unwrap(), -5.0, 1e-15));
}

#[test]
fn ball_top_power_densities() {
    for n in [2usize, 3] {
        let sys = TripleSystem::ball(n).unwrap();
        let coords: Vec<C64> = (0..n).map(|k| C64::new(0.2 + 0.1 * k as f64, -0.15)).collect();
        let z = Element::new(sys, coords).unwrap();
        let r2: f64 = z.coords().iter().map(|c| c.norm_sqr()).sum();
        let d0 = form_matrix(FormKind::Flat, &z).unwrap().determinant();
        let dm = form_matrix(FormKind::Hyperbolic, &z).unwrap().determinant();
        let dp = form_matrix(FormKind::FubiniStudy, &z).unwrap().determinant();
        let power = -(n as f64 + 1.0);
        assert!(close((dm / d0).sqrt(), (1.0 - r2).powf(power), 1e-10));
        assert!(close((dp / d0).sqrt(), (1.0 + r2).powf(power), 1e-10));
    }
}

#[test]
fn log_det_bergman_is_genus_times_spectral_sum() {
    let sys = TripleSystem::type_i(2, 3).unwrap();
    let lambdas = [0.7, 0.2];
    let z = Element::diagonal(sys, &lambdas).unwrap();
    let minus: f64 = lambdas.iter().map(|l| 5.0 * (1.0 - l * l).ln()).sum();
    let plus: f64 = lambdas.iter().map(|l| 5.0 * (1.0 + l * l).ln()).sum();
    assert!(close(log_det_bergman(&z, FormKind::Hyperbolic).unwrap(), minus, 1e-12));
    assert!(close(log_det_bergman(&z, FormKind::FubiniStudy).unwrap(), plus, 1e-12));

    let poly = TripleSystem::polydisc(3).unwrap();
    let w = [C64::new(0.5, 0.1), C64::new(-0.2, 0.6), C64::new(0.0, -0.3)];
    let z = Element::new(poly, w.to_vec()).unwrap();
    let minus: f64 = w.iter().map(|c| 2.0 * (1.0 - c.norm_sqr()).ln()).sum();
    assert!(close(log_det_bergman(&z, FormKind::Hyperbolic).unwrap(), minus, 1e-12));
}

#[test]
fn bergman_eigenvalues_on_diagonal() {
    let sys = TripleSystem::type_i(2, 3).unwrap();
    let (l1, l2) = (0.8, 0.5);
    let z = Element::diagonal(sys, &[l1, l2]).unwrap();
    let b = bergman_operator(&z, &z).unwrap();
    // the realified operator repeats each eigenvalue twice
    let mut eig: Vec<f64> = b.realify().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let eig: Vec<f64> = eig.into_iter().step_by(2).collect();
    let (a, c) = (1.0 - l1 * l1, 1.0 - l2 * l2);
    // V_11, V_22 once; V_12 twice; V_01, V_02 once each (b = 1)
    let mut expected = vec![a * a, c * c, a * c, a * c, a, c];
    expected.sort_by(f64::total_cmp);
    for (x, y) in eig.iter().zip(&expected) {
        assert!((x - y).abs() < 1e-12, "{eig:?} vs {expected:?}");
    }
}

#[test]
fn peirce_dimensions_of_type_i() {
    let sys = TripleSystem::type_i(2, 3).unwrap();
    let z = Element::diagonal(sys, &[0.9, 0.4]).unwrap();
    let fd = frame_decompose(&z).unwrap();
    let sp = SimultaneousPeirce::new(fd.frame.tripotents()).unwrap();
    let dim = |j, k| projector_rank(&sp.projection(PeirceIndex::new(j, k, 2).unwrap()).unwrap());
    assert_eq!(dim(0, 0), 0);
    assert_eq!(dim(0, 1), 1);
    assert_eq!(dim(0, 2), 1);
    assert_eq!(dim(1, 1), 1);
    assert_eq!(dim(2, 2), 1);
    assert_eq!(dim(1, 2), 2);
}

#[test]
fn super_regularity_counterexample() {
    let l2: f64 = 0.6;
    let l1 = l2 * (2.0 - l2 * l2).sqrt();
    assert!(((1.0 - l1 * l1) - (1.0 - l2 * l2).powi(2)).abs() < 1e-15);

    let non_tube = Element::diagonal(TripleSystem::type_i(2, 3).unwrap(), &[l1, l2]).unwrap();
    let c = classify(&non_tube, SUPER_REGULAR_TOL);
    assert_eq!(c.rank, 2);
    assert!(c.regular && !c.super_regular);

    let tube = Element::diagonal(TripleSystem::type_i(2, 2).unwrap(), &[l1, l2]).unwrap();
    let c = classify(&tube, SUPER_REGULAR_TOL);
    assert!(c.regular && c.super_regular);
}

#[test]
fn spectral_norm_of_rank_one_matrix() {
    let sys = TripleSystem::type_i(2, 3).unwrap();
    let u = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
    let v = [C64::new(0.5, 0.5), C64::new(0.5, -0.5), C64::new(0.0, 0.0)];
    let m = nalgebra::DMatrix::from_fn(2, 3, |i, j| u[i] * v[j].conj() * 0.7);
    let z = Element::from_matrix(sys, &m).unwrap();
    assert!(close(spectral_norm(&z), 0.7, 1e-14));
    assert_eq!(classify(&z, SUPER_REGULAR_TOL).rank, 1);
}
