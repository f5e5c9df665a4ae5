mod common;

use proptest::prelude::*;

use common::{random_data, random_minimal, CURVATURES};
use rand::Rng;
use rigidity_core::curvature::{
    align_mean_frame, gram_diagonalize, invariants, kmin_bracket, normal_curvature, riemann,
    sectional, PlaneSpec,
};
use rigidity_core::models;
use rigidity_core::rng::rng_for;
use rigidity_core::symmat::{commutes, random_orthogonal};

fn data_strategy() -> impl Strategy<Value = (usize, usize, f64, u64)> {
    (2usize..7, 1usize..6, 0usize..3, any::<u64>())
        .prop_map(|(n, p, c, s)| (n, p, CURVATURES[c], s))
}

proptest! {
    #[test]
    fn riemann_symmetries_and_bianchi((n, p, c, seed) in data_strategy()) {
        let d = random_data(n, p, c, seed, 1.0);
        let r = riemann(&d);
        prop_assert!(r.symmetry_defect() <= 1e-12 * (1.0 + r.max_abs()));
    }

    #[test]
    fn scalar_curvature_identity((n, p, c, seed) in data_strategy()) {
        let d = random_data(n, p, c, seed, 1.5);
        let inv = invariants(&d);
        let direct = riemann(&d).scalar_curvature();
        prop_assert!((direct - inv.r_scal).abs() <= 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn random_planes_lie_above_lower_bound((n, p, c, seed) in data_strategy()) {
        let d = random_data(n, p, c, seed, 1.0);
        let b = kmin_bracket(&d, 16, seed).unwrap();
        prop_assert!(b.lo <= b.hi);
        let t = riemann(&d);
        let mut rng = rng_for(seed, 99);
        for _ in 0..20 {
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            if let Ok(plane) = PlaneSpec::new(u, v) {
                let k = sectional(&t, &plane).unwrap();
                prop_assert!(k >= b.lo - 1e-9 * (1.0 + k.abs()));
            }
        }
    }

    #[test]
    fn normal_curvature_vanishes_iff_commuting((n, p, c, seed) in data_strategy()) {
        let d = random_data(n, p, c, seed, 1.0);
        let all_commute = (0..p).all(|a| (0..p).all(|b| commutes(d.form(a), d.form(b), 1e-12)));
        let flat = normal_curvature(&d).max_abs() < 1e-12;
        prop_assert_eq!(all_commute, flat);
        let diag = rigidity_core::FundamentalData::new(
            n, c,
            (0..p).map(|a| rigidity_core::SymMatrix::diag(&(0..n).map(|i| (i * (a + 1)) as f64).collect::<Vec<_>>())).collect(),
            None,
        ).unwrap();
        prop_assert!(normal_curvature(&diag).max_abs() == 0.0);
    }

    #[test]
    fn invariants_are_frame_independent((n, p, c, seed) in data_strategy()) {
        let d = random_data(n, p, c, seed, 1.0);
        let rotated = d
            .rotate_normal(&random_orthogonal(p, seed ^ 1))
            .unwrap()
            .conjugate_tangent(&random_orthogonal(n, seed ^ 2))
            .unwrap();
        let (a, b) = (invariants(&d), invariants(&rotated));
        prop_assert!((a.s - b.s).abs() < 1e-10);
        prop_assert!((a.h - b.h).abs() < 1e-10);
        let (ka, kb) = (kmin_bracket(&d, 16, 3).unwrap(), kmin_bracket(&rotated, 16, 3).unwrap());
        prop_assert!((ka.lo - kb.lo).abs() < 1e-9);
    }

    #[test]
    fn aligned_frame_carries_the_mean((n, p, c, seed) in data_strategy()) {
        let d = random_data(n, p, c, seed, 1.0);
        let a = align_mean_frame(&d);
        let m = a.mean_index().unwrap();
        prop_assert!((a.form(m).trace() - n as f64 * d.mean_curvature()).abs() < 1e-10);
        for l in a.non_mean_labels() {
            prop_assert!(a.form(l).trace().abs() < 1e-10);
        }
        let inv = invariants(&a);
        prop_assert!((inv.s_h.unwrap() + inv.s_i.unwrap() - inv.s).abs() < 1e-10);
        prop_assert!((inv.s - invariants(&d).s).abs() < 1e-10);
    }

    #[test]
    fn gram_diagonal_frame((n, p, c, seed) in data_strategy()) {
        let d = gram_diagonalize(&random_minimal(n, p, c, seed, 1.0), None).unwrap();
        let g = d.forms().gram();
        for a in 0..p {
            for b in 0..p {
                if a != b {
                    prop_assert!(g[(a, b)].abs() < 1e-10);
                }
            }
            if a + 1 < p {
                prop_assert!(g[(a, a)] >= g[(a + 1, a + 1)] - 1e-12);
            }
        }
    }
}

#[test]
fn constant_curvature_inputs_collapse_the_bracket() {
    for n in 2..7 {
        for c in CURVATURES {
            let b = kmin_bracket(&models::totally_geodesic(n, 2, c).unwrap(), 16, 0).unwrap();
            assert!(b.width() <= 1e-8 && (b.lo - c).abs() < 1e-12);
        }
        let b = kmin_bracket(&models::umbilical_sphere(n, 3, 0.5, 0.5).unwrap(), 16, 0).unwrap();
        assert!(b.width() <= 1e-8 && (b.lo - 0.75).abs() < 1e-12);
    }
    let b = kmin_bracket(&models::veronese(2.0, 0.0).unwrap(), 16, 0).unwrap();
    assert!(b.width() <= 1e-8 && (b.lo - 2.0 / 3.0).abs() < 1e-12);
}
