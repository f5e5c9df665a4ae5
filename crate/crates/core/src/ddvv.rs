//! The DDVV inequality `Σ_{r,s} ‖[B_r, B_s]‖² ≤ (Σ_r ‖B_r‖²)²` for tuples of
//! symmetric matrices: evaluation, its rigid equality configuration, and a
//! projected-gradient maximizer that confirms sharpness numerically.
//!
//! The left side sums ordered pairs, so each unordered pair counts twice.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::json::matrix_rows;
use crate::rng::rng_for;
use crate::symmat::{
    check_orthogonal, mix_unchecked, sorted_eigen, Matrix, MatrixTuple, SymMatrix,
};

/// Ratio deficit below which a tuple is reported as an equality case.
pub const EQUALITY_TOL: f64 = 1e-8;
/// Default tolerance for [`detect_equality`].
pub const DETECT_TOL: f64 = 1e-6;

pub const DEFAULT_STARTS: usize = 32;
pub const DEFAULT_ITERS: usize = 2000;
const INITIAL_STEP: f64 = 0.1;
const RELATIVE_STOP: f64 = 1e-14;

/// The canonical two-matrix form reached by a normal rotation `q` followed by
/// tangent conjugation with `P`: slot `diag_slot` becomes
/// `P diag(μ, −μ, 0, …) Pᵀ` and slot `offdiag_slot` becomes the `μ`
/// off-diagonal block conjugated by `P`. All other slots vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalStructure {
    pub offdiag_slot: usize,
    pub diag_slot: usize,
    pub mu: f64,
    #[serde(with = "matrix_rows")]
    pub normal_rotation: Matrix,
    #[serde(with = "matrix_rows")]
    pub tangent_rotation: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdvvReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or 0 when `rhs = 0`.
    pub ratio: f64,
    pub equality: bool,
    pub extremal_structure: Option<ExtremalStructure>,
}

pub fn evaluate(t: &MatrixTuple) -> DdvvReport {
    let lhs = t.commutator_energy();
    let s = t.norm_sq();
    let rhs = s * s;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    let equality = rhs > 0.0 && ratio >= 1.0 - EQUALITY_TOL;
    let extremal_structure = if equality {
        detect_equality(t, DETECT_TOL)
    } else {
        None
    };
    DdvvReport {
        lhs,
        rhs,
        ratio,
        equality,
        extremal_structure,
    }
}

/// Ratio only, without the equality analysis.
pub fn ratio(t: &MatrixTuple) -> f64 {
    let s = t.norm_sq();
    if s > 0.0 {
        t.commutator_energy() / (s * s)
    } else {
        0.0
    }
}

/// Builds the equality configuration in dimension `n` with `m` slots:
/// `B_r = P·offdiag(μ)·Pᵀ`, `B_s = P·diag(μ, −μ)·Pᵀ`, all others zero.
pub fn extremal_pair(
    n: usize,
    m: usize,
    mu: f64,
    p: &Matrix,
    slots: (usize, usize),
) -> Result<MatrixTuple> {
    if n < 2 || m < 2 {
        return Err(GeometryError::OutOfRange(format!(
            "equality needs n >= 2 and m >= 2 (got n = {n}, m = {m})"
        )));
    }
    let (r, s) = slots;
    if r == s || r >= m || s >= m {
        return Err(GeometryError::OutOfRange(format!(
            "slots ({r}, {s}) must be distinct and below {m}"
        )));
    }
    if !(mu > 0.0) {
        return Err(GeometryError::OutOfRange(format!(
            "mu = {mu} must be positive"
        )));
    }
    if p.nrows() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: p.nrows(),
        });
    }
    check_orthogonal(p)?;
    let pt = p.transpose();
    let mut mats = vec![SymMatrix::zeros(n); m];
    mats[r] = SymMatrix::offdiag(n, 0, 1, mu).conjugate(&pt)?;
    let mut d = vec![0.0; n];
    d[0] = mu;
    d[1] = -mu;
    mats[s] = SymMatrix::diag(&d).conjugate(&pt)?;
    MatrixTuple::new(n, mats)
}

/// Recovers the normal and tangent rotations that bring `t` into the
/// canonical equality form, or `None` if the ratio is below `1 − tol` or the
/// rotated tuple does not match the form within `tol · √S`.
pub fn detect_equality(t: &MatrixTuple, tol: f64) -> Option<ExtremalStructure> {
    let n = t.dim();
    if n < 2 || t.len() < 2 {
        return None;
    }
    let s = t.norm_sq();
    if !(s > 0.0) || ratio(t) < 1.0 - tol {
        return None;
    }
    let slack = tol * s.sqrt();

    // rotate the energy into the two leading slots
    let (_, vectors) = sorted_eigen(&t.gram());
    let q = vectors.transpose();
    let rotated = mix_unchecked(t, &q);
    if rotated
        .iter()
        .skip(2)
        .any(|b| b.frob_norm_sq().sqrt() > slack)
    {
        return None;
    }

    // eigenframe of the leading matrix: ±μ on the first two axes
    let a = &rotated.matrices()[0];
    let b = &rotated.matrices()[1];
    let (_, frame) = sorted_eigen(a.as_matrix());
    let mut p = Matrix::zeros(n, n);
    p.set_column(0, &frame.column(0));
    p.set_column(1, &frame.column(n - 1));
    for j in 1..(n - 1) {
        p.set_column(j + 1, &frame.column(j));
    }
    let b_frame = p.transpose() * b.as_matrix() * &p;
    if b_frame[(0, 1)] < 0.0 {
        for i in 0..n {
            p[(i, 1)] = -p[(i, 1)];
        }
    }

    let mu = (0.25 * (a.frob_norm_sq() + b.frob_norm_sq())).sqrt();
    let mut d = vec![0.0; n];
    d[0] = mu;
    d[1] = -mu;
    let diag = SymMatrix::diag(&d);
    let off = SymMatrix::offdiag(n, 0, 1, mu);
    let a_frame = p.transpose() * a.as_matrix() * &p;
    let b_frame = p.transpose() * b.as_matrix() * &p;
    let da = (a_frame - diag.as_matrix()).norm();
    let db = (b_frame - off.as_matrix()).norm();
    if da > slack || db > slack {
        return None;
    }
    Some(ExtremalStructure {
        offdiag_slot: 1,
        diag_slot: 0,
        mu,
        normal_rotation: q,
        tangent_rotation: p,
    })
}

/// Gradient of `lhs = Σ_{r,s} ‖[B_r,B_s]‖²` with respect to each `B_r`
/// (Frobenius inner product on symmetric matrices):
/// `∇_r = 4 Σ_s [B_s, [B_s, B_r]]`.
pub fn lhs_gradient(t: &MatrixTuple) -> Vec<Matrix> {
    let m = t.len();
    let n = t.dim();
    let mut grads = vec![Matrix::zeros(n, n); m];
    for r in 0..m {
        for s in (r + 1)..m {
            let br = t.matrices()[r].as_matrix();
            let bs = t.matrices()[s].as_matrix();
            // K = [B_s, B_r] is skew; [B_s, K] and [B_r, K] are symmetric
            let sr = bs * br;
            let k = &sr - sr.transpose();
            let gs_r = bs * &k - &k * bs;
            // [B_r, [B_r, B_s]] = [B_r, −K]
            let gr_s = &k * br - br * &k;
            grads[r] += gs_r * 4.0;
            grads[s] += gr_s * 4.0;
        }
    }
    grads
}

/// Result of [`maximize_ratio`].
#[derive(Clone, Debug)]
pub struct MaximizeOutcome {
    pub best: MatrixTuple,
    pub ratio: f64,
    /// Ratio after every accepted iterate of the winning start.
    pub trace: Vec<f64>,
    pub start: usize,
}

pub fn random_tuple_with<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> MatrixTuple {
    let mats = (0..m)
        .map(|_| {
            let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            SymMatrix::symmetrized(g)
        })
        .collect();
    MatrixTuple::new(n, mats).expect("n >= 1")
}

fn normalized(t: &MatrixTuple) -> MatrixTuple {
    let s = t.norm_sq();
    if s > 0.0 {
        t.scaled(1.0 / s.sqrt())
    } else {
        t.clone()
    }
}

fn ascend(mut x: MatrixTuple, iters: usize) -> (MatrixTuple, f64, Vec<f64>) {
    let mut f = ratio(&x);
    let mut trace = vec![f];
    let mut step = INITIAL_STEP;
    for _ in 0..iters {
        let mut g = lhs_gradient(&x);
        // tangent projection on the unit sphere
        let radial: f64 = g
            .iter()
            .zip(x.iter())
            .map(|(gr, br)| gr.component_mul(br.as_matrix()).sum())
            .sum();
        for (gr, br) in g.iter_mut().zip(x.iter()) {
            *gr -= br.as_matrix() * radial;
        }
        let mut accepted = None;
        let mut trial = step;
        while trial > 1e-12 {
            let mats = x
                .iter()
                .zip(&g)
                .map(|(br, gr)| SymMatrix::symmetrized(br.as_matrix() + gr * trial))
                .collect();
            let y = normalized(&MatrixTuple::new(x.dim(), mats).expect("same dimension"));
            let fy = ratio(&y);
            if fy > f {
                accepted = Some((y, fy));
                break;
            }
            trial *= 0.5;
        }
        let Some((y, fy)) = accepted else { break };
        let gain = (fy - f) / f.max(f64::MIN_POSITIVE);
        x = y;
        f = fy;
        trace.push(f);
        step = (trial * 2.0).min(INITIAL_STEP);
        if gain < RELATIVE_STOP {
            break;
        }
    }
    (x, f, trace)
}

/// Multistart projected-gradient ascent of the DDVV ratio on the unit sphere
/// `Σ ‖B_r‖² = 1`. Starts run in parallel; the best ratio wins, ties going to
/// the lowest start index.
pub fn maximize_ratio(
    n: usize,
    m: usize,
    seed: u64,
    starts: usize,
    iters: usize,
) -> Result<MaximizeOutcome> {
    if n == 0 {
        return Err(GeometryError::OutOfRange("n must be at least 1".into()));
    }
    if n < 2 || m < 2 || starts == 0 {
        let best = normalized(&random_tuple_with(&mut rng_for(seed, 0), n, m));
        return Ok(MaximizeOutcome {
            best,
            ratio: 0.0,
            trace: Vec::new(),
            start: 0,
        });
    }
    let runs: Vec<(MatrixTuple, f64, Vec<f64>)> = (0..starts as u64)
        .into_par_iter()
        .map(|s| {
            let x = normalized(&random_tuple_with(&mut rng_for(seed, s), n, m));
            ascend(x, iters)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1 > runs[best].1 {
            best = i;
        }
    }
    let (tuple, ratio, trace) = runs.into_iter().nth(best).expect("starts > 0");
    Ok(MaximizeOutcome {
        best: tuple,
        ratio,
        trace,
        start: best,
    })
}
