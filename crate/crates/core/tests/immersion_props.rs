use proptest::prelude::*;

use rigidity_core::curvature::{invariants, kmin_bracket, riemann};
use rigidity_core::ddvv;
use rigidity_core::immersion::{
    builtin, clifford_map, sample_random, second_fundamental_form, second_fundamental_form_with,
    veronese_map, DiffOptions, Domain, DEFAULT_STEP,
};
use rigidity_core::pinching::{verdict, VerdictOptions};
use rigidity_core::symmat::random_orthogonal;
use rigidity_core::Theorem;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_gauge_invariance(theta in 0.3f64..2.8, phi in 0.0f64..6.2, seed in any::<u64>()) {
        let spec = veronese_map().unwrap();
        let s = second_fundamental_form(&spec, &[theta, phi], DEFAULT_STEP).unwrap();
        let mixed = s.data.rotate_normal(&random_orthogonal(2, seed)).unwrap();
        let (a, b) = (&s.data, &mixed);
        prop_assert!((invariants(a).s - invariants(b).s).abs() < 1e-6);
        prop_assert!((riemann(a).get(0, 1, 0, 1) - riemann(b).get(0, 1, 0, 1)).abs() < 1e-6);
        prop_assert!((ddvv::ratio(a.forms()) - ddvv::ratio(b.forms())).abs() < 1e-6);
        let opts = VerdictOptions { tol: 1e-5, ..VerdictOptions::default() };
        let (va, vb) = (verdict(a, Theorem::Thm1, &opts).unwrap(), verdict(b, Theorem::Thm1, &opts).unwrap());
        prop_assert_eq!((va.status, va.label), (vb.status, vb.label));
    }

    #[test]
    fn clifford_reparametrization_invariance(v0 in 0.1f64..6.0, v1 in 0.1f64..6.0) {
        let spec = clifford_map().unwrap();
        let domain = Domain::new(vec![0.0, 0.0], vec![6.2, 6.2]).unwrap();
        let phi = |v: &[f64]| vec![v[0] + 0.3 * v[0].sin(), v[1]];
        let re = spec.reparametrize(domain, phi).unwrap();
        let a = second_fundamental_form(&spec, &phi(&[v0, v1]), DEFAULT_STEP).unwrap();
        let b = second_fundamental_form(&re, &[v0, v1], DEFAULT_STEP).unwrap();
        prop_assert!((invariants(&a.data).s - invariants(&b.data).s).abs() < 1e-5);
        prop_assert!((riemann(&a.data).get(0, 1, 0, 1) - riemann(&b.data).get(0, 1, 0, 1)).abs() < 1e-5);
    }
}

#[test]
fn step_halving_converges_quadratically() {
    let spec = veronese_map().unwrap();
    let u = [1.1, 0.7];
    let err = |step: f64| {
        let s = second_fundamental_form(&spec, &u, step).unwrap();
        (invariants(&s.data).s - 4.0 / 3.0).abs()
    };
    let (e1, e2, e3) = (err(4e-2), err(2e-2), err(1e-2));
    for ratio in [e1 / e2, e2 / e3] {
        assert!(
            (3.5..4.5).contains(&ratio),
            "ratio {ratio} ({e1:e}, {e2:e}, {e3:e})"
        );
    }
    // default step sits near the round-off floor
    assert!(err(DEFAULT_STEP) < 1e-6);
    let rich = second_fundamental_form_with(
        &spec,
        &u,
        &DiffOptions {
            step: 2e-2,
            richardson: true,
        },
    )
    .unwrap();
    assert!((invariants(&rich.data).s - 4.0 / 3.0).abs() < e3 / 10.0);
}

#[test]
fn builtin_samples_reproduce_models() {
    let opts = DiffOptions::default();
    for s in sample_random(&builtin("veronese").unwrap(), 20, 5, &opts).unwrap() {
        let b = kmin_bracket(&s.data, 8, 0).unwrap();
        assert!((b.lo - 1.0 / 3.0).abs() < 1e-5 && (b.hi - 1.0 / 3.0).abs() < 1e-5);
    }
    for s in sample_random(&builtin("clifford").unwrap(), 20, 5, &opts).unwrap() {
        assert!((invariants(&s.data).s - 2.0).abs() < 1e-6);
    }
    let par = sample_random(&builtin("paraboloid").unwrap(), 4, 1, &opts).unwrap();
    for s in par {
        // Gauss curvature of z = (x² + y²)/2 is 1/(1 + x² + y²)²
        let r2 = s.u[0] * s.u[0] + s.u[1] * s.u[1];
        assert!((riemann(&s.data).get(0, 1, 0, 1) - 1.0 / (1.0 + r2).powi(2)).abs() < 1e-6);
    }
}
