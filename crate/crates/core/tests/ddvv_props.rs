use proptest::prelude::*;

use rigidity_core::ddvv::{self, detect_equality, extremal_pair, lhs_gradient, random_tuple_with};
use rigidity_core::rng::rng_for;
use rigidity_core::symmat::{random_orthogonal, rotate_tuple};
use rigidity_core::{MatrixTuple, SymMatrix};

fn tuple(n: usize, m: usize, seed: u64) -> MatrixTuple {
    random_tuple_with(&mut rng_for(seed, 0), n, m)
}

proptest! {
    #[test]
    fn ratio_never_exceeds_one(n in 1usize..7, m in 1usize..7, seed in any::<u64>()) {
        prop_assert!(ddvv::ratio(&tuple(n, m, seed)) <= 1.0 + 1e-12);
    }

    #[test]
    fn ratio_is_scale_invariant(n in 2usize..6, m in 2usize..5, seed in any::<u64>(), s in 0.01f64..100.0) {
        let t = tuple(n, m, seed);
        let (a, b) = (ddvv::ratio(&t), ddvv::ratio(&t.scaled(s)));
        prop_assert!((a - b).abs() < 1e-12);
        let (la, lb) = (t.commutator_energy(), t.scaled(s).commutator_energy());
        prop_assert!((lb - s.powi(4) * la).abs() <= 1e-10 * (1.0 + lb));
    }

    #[test]
    fn ratio_is_rotation_invariant(n in 2usize..6, m in 2usize..5, seed in any::<u64>()) {
        let t = tuple(n, m, seed);
        let r = rotate_tuple(&t, &random_orthogonal(m, seed ^ 7)).unwrap()
            .conjugate(&random_orthogonal(n, seed ^ 8)).unwrap();
        prop_assert!((ddvv::ratio(&t) - ddvv::ratio(&r)).abs() < 1e-12);
    }

    #[test]
    fn extremal_pairs_are_detected(n in 2usize..6, m in 2usize..5, seed in any::<u64>(), mu in 0.1f64..3.0) {
        let p = random_orthogonal(n, seed);
        let base = extremal_pair(n, m, mu, &p, (0, 1)).unwrap();
        let t = rotate_tuple(&base, &random_orthogonal(m, seed ^ 3)).unwrap();
        prop_assert!((ddvv::ratio(&t) - 1.0).abs() < 1e-12);
        let s = detect_equality(&t, 1e-8).expect("equality configuration");
        prop_assert!((s.mu - mu).abs() < 1e-9 * mu.max(1.0));
    }

    #[test]
    fn generic_tuples_are_not_extremal(n in 3usize..6, m in 3usize..5, seed in any::<u64>()) {
        prop_assert!(detect_equality(&tuple(n, m, seed), 1e-6).is_none());
    }

    #[test]
    fn gradient_matches_finite_differences(n in 1usize..5, m in 1usize..5, seed in any::<u64>()) {
        let t = tuple(n, m, seed);
        let g = lhs_gradient(&t);
        let dir = tuple(n, m, seed ^ 0xdead);
        let eps = 1e-5;
        let f = |s: f64| {
            let mats = t.iter().zip(dir.iter())
                .map(|(b, e)| SymMatrix::new(b.as_matrix() + e.as_matrix() * s).unwrap())
                .collect();
            MatrixTuple::new(n, mats).unwrap().commutator_energy()
        };
        let fd = (f(eps) - f(-eps)) / (2.0 * eps);
        let an: f64 = g.iter().zip(dir.iter()).map(|(gr, e)| gr.component_mul(e.as_matrix()).sum()).sum();
        let scale: f64 = g.iter().map(|x| x.norm()).sum::<f64>() * dir.norm_sq().sqrt();
        prop_assert!((fd - an).abs() <= 1e-6 * (1e-12 + scale), "fd {} an {}", fd, an);
    }
}

#[test]
fn degenerate_cases() {
    assert_eq!(ddvv::ratio(&MatrixTuple::zeros(3, 2)), 0.0);
    assert_eq!(ddvv::ratio(&tuple(4, 1, 0)), 0.0);
    let one = ddvv::maximize_ratio(3, 1, 0, 4, 10).unwrap();
    assert_eq!(one.ratio, 0.0);
}
