mod common;

use proptest::prelude::*;

use common::random_minimal;
use rigidity_core::curvature::{invariants, kmin_bracket, riemann};
use rigidity_core::json;
use rigidity_core::models::{self, ModelKind, ModelSpec};
use rigidity_core::pinching::{verdict, ModelLabel, PinchStatus, VerdictOptions};
use rigidity_core::simons::commutator_trace_identity;
use rigidity_core::symmat::{commutes, random_orthogonal};
use rigidity_core::{ddvv, FundamentalData, PinchVerdict, Theorem};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn veronese_scaling_law(c in -1.0f64..2.0, h in 0.0f64..2.0) {
        prop_assume!(c + h * h > 0.05);
        let amb = c + h * h;
        let (v, unit) = (models::veronese(c, h).unwrap(), models::veronese(1.0, 0.0).unwrap());
        let (r, r1) = (riemann(&v), riemann(&unit));
        prop_assert!((r.get(0, 1, 0, 1) - amb * r1.get(0, 1, 0, 1)).abs() < 1e-12);
        let s_i = invariants(&v).s_i.unwrap_or(invariants(&v).s);
        prop_assert!((s_i - amb * invariants(&unit).s).abs() < 1e-12);
    }

    #[test]
    fn verdict_frame_invariance(seed in any::<u64>(), which in 0usize..4) {
        let data = [
            models::veronese(1.0, 0.0).unwrap(),
            models::product_of_spheres(3, 1).unwrap(),
            models::veronese(0.5, 0.8).unwrap(),
            models::umbilical_sphere(3, 3, 0.0, 1.0).unwrap(),
        ][which].clone();
        let theorem = if which < 2 { Theorem::Thm1 } else { Theorem::Thm2 };
        let o = VerdictOptions::default();
        let base = verdict(&data, theorem, &o).unwrap();
        let moved = data
            .rotate_normal(&random_orthogonal(data.p(), seed)).unwrap()
            .conjugate_tangent(&random_orthogonal(data.n(), seed ^ 9)).unwrap();
        let v = verdict(&moved, theorem, &o).unwrap();
        prop_assert_eq!((v.status, v.label), (base.status, base.label));
    }

    #[test]
    fn fundamental_data_json_round_trip(n in 2usize..5, p in 1usize..4, seed in any::<u64>()) {
        let d = random_minimal(n, p, 1.0, seed, 2.0);
        let back: FundamentalData = json::from_str(&json::to_string(&d)).unwrap();
        prop_assert_eq!(&back, &d);
        let v = verdict(&d, Theorem::Thm1, &VerdictOptions::default()).unwrap();
        let back: PinchVerdict = json::from_str(&json::to_string(&v)).unwrap();
        prop_assert_eq!(back, v);
    }
}

#[test]
fn only_veronese_saturates_ddvv() {
    let v = models::veronese(1.0, 0.0).unwrap();
    assert!((ddvv::ratio(v.forms()) - 1.0).abs() < 1e-12);
    let others = [
        models::totally_geodesic(3, 2, 1.0).unwrap(),
        models::product_of_spheres(4, 2).unwrap(),
        models::umbilical_sphere(3, 2, 0.0, 1.0).unwrap(),
    ];
    for d in &others {
        assert!(ddvv::ratio(d.forms()) < 1.0 - 1e-3);
    }
}

#[test]
fn pseudo_umbilical_extension_commutes_and_couples() {
    let base = random_minimal(3, 2, 1.0, 4, 1.0);
    let ext = models::pseudo_umbilical_extend(&base, 0.7, 1.0).unwrap();
    let hm = ext.form(ext.mean_index().unwrap());
    for a in ext.non_mean_labels() {
        assert!(commutes(hm, ext.form(a), 0.0));
    }
    let s_i = invariants(&ext).s_i.unwrap();
    let coupling = rigidity_core::simons::mean_coupling(&ext).unwrap();
    assert!((coupling - 3.0 * 0.49 * s_i).abs() < 1e-12);
    let (n_comm, bound) = commutator_trace_identity(&ext, None).unwrap();
    assert!(n_comm <= bound);
}

#[test]
fn spec_examples_through_model_spec() {
    let spec = ModelSpec {
        kind: ModelKind::Veronese,
        n: 2,
        p: None,
        c: 1.0,
        h: 0.0,
    };
    assert_eq!(spec.build().unwrap(), models::veronese(1.0, 0.0).unwrap());
    let bad = ModelSpec {
        kind: ModelKind::ProductOfSpheres { k: 3 },
        n: 3,
        p: None,
        c: 1.0,
        h: 0.0,
    };
    assert!(bad.build().is_err());
    let v = verdict(
        &models::umbilical_sphere(3, 3, 0.0, 1.0).unwrap(),
        Theorem::Thm2,
        &VerdictOptions::default(),
    )
    .unwrap();
    assert_eq!(v.status, PinchStatus::Strict);
    assert!(v.kmin_bracket.lo > v.threshold);
    let b = kmin_bracket(&models::product_of_spheres(4, 2).unwrap(), 16, 0).unwrap();
    assert!(b.lo.abs() < 1e-12);
    for p in 1..5 {
        let v = verdict(
            &models::totally_geodesic(3, p, 1.0).unwrap(),
            Theorem::Thm1,
            &VerdictOptions::default(),
        )
        .unwrap();
        assert_eq!(
            (v.status, v.label),
            (PinchStatus::Strict, ModelLabel::TotallyGeodesic)
        );
    }
}
