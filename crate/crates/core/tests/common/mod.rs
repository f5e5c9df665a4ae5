#![allow(dead_code)]

use rigidity_core::models::pseudo_umbilical_extend;
use rigidity_core::rng::derive_seed;
use rigidity_core::symmat::{random_symmetric, random_traceless_symmetric};
use rigidity_core::{FundamentalData, SymMatrix};

pub const CURVATURES: [f64; 3] = [-1.0, 0.0, 1.0];

/// Arbitrary second fundamental form, no mean slot.
pub fn random_data(n: usize, p: usize, c: f64, seed: u64, scale: f64) -> FundamentalData {
    let forms = (0..p)
        .map(|a| random_symmetric(n, derive_seed(seed, a as u64), scale))
        .collect();
    FundamentalData::new(n, c, forms, None).unwrap()
}

pub fn random_minimal(n: usize, p: usize, c: f64, seed: u64, scale: f64) -> FundamentalData {
    let forms = (0..p)
        .map(|a| random_traceless_symmetric(n, derive_seed(seed, a as u64), scale))
        .collect();
    FundamentalData::new(n, c, forms, None).unwrap()
}

/// `p − 1` traceless forms followed by `H·I`.
pub fn random_pseudo_umbilical(n: usize, p: usize, c: f64, h: f64, seed: u64) -> FundamentalData {
    if p == 1 {
        return FundamentalData::new(n, c, vec![SymMatrix::scalar(n, h)], Some(0)).unwrap();
    }
    pseudo_umbilical_extend(&random_minimal(n, p - 1, c, seed, 1.0), h, c).unwrap()
}

/// Relative closeness with an absolute floor of 1.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
