//! Pointwise curvature of a submanifold `Mⁿ ⊂ F^{n+p}(c)` from its second
//! fundamental form: the Gauss and Ricci equations, sectional curvatures,
//! scalar invariants and the two normal-frame normalizations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::rng::rng_for;
use crate::symmat::{mix_unchecked, pairwise_sum, sorted_eigen, Matrix, MatrixTuple, SymMatrix};

/// Tolerance (relative to [`FundamentalData::scale`]) for tracelessness of the
/// non-mean directions when a mean index is set.
pub const FRAME_TOL: f64 = 1e-10;

/// Second fundamental form at a point: `p` symmetric `n × n` matrices
/// `H_α = (h^α_ij)` in an ambient space form of curvature `c`.
///
/// `mean_index` is a 0-based slot into `forms`. When set, that slot carries
/// the mean-curvature direction and every other slot is traceless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FundamentalDataRepr", into = "FundamentalDataRepr")]
pub struct FundamentalData {
    n: usize,
    c: f64,
    forms: MatrixTuple,
    mean_index: Option<usize>,
}

/// JSON layout: `{"n", "p", "c", "H_matrices", "mean_index"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FundamentalDataRepr {
    pub n: usize,
    pub p: usize,
    pub c: f64,
    #[serde(rename = "H_matrices")]
    pub h_matrices: Vec<SymMatrix>,
    pub mean_index: Option<usize>,
}

impl TryFrom<FundamentalDataRepr> for FundamentalData {
    type Error = GeometryError;

    fn try_from(r: FundamentalDataRepr) -> Result<Self> {
        if r.h_matrices.len() != r.p {
            return Err(GeometryError::InvalidData(format!(
                "p = {} but {} matrices supplied",
                r.p,
                r.h_matrices.len()
            )));
        }
        FundamentalData::new(r.n, r.c, r.h_matrices, r.mean_index)
    }
}

impl From<FundamentalData> for FundamentalDataRepr {
    fn from(d: FundamentalData) -> Self {
        FundamentalDataRepr {
            n: d.n,
            p: d.p(),
            c: d.c,
            h_matrices: d.forms.into_matrices(),
            mean_index: d.mean_index,
        }
    }
}

impl FundamentalData {
    pub fn new(n: usize, c: f64, forms: Vec<SymMatrix>, mean_index: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(GeometryError::InvalidData("n must be at least 1".into()));
        }
        if forms.is_empty() {
            return Err(GeometryError::InvalidData(
                "codimension p must be at least 1".into(),
            ));
        }
        if !c.is_finite() {
            return Err(GeometryError::InvalidData(
                "ambient curvature is not finite".into(),
            ));
        }
        let forms = MatrixTuple::new(n, forms)?;
        if forms
            .iter()
            .any(|m| m.as_matrix().iter().any(|x| !x.is_finite()))
        {
            return Err(GeometryError::InvalidData(
                "non-finite entry in H_matrices".into(),
            ));
        }
        let data = FundamentalData {
            n,
            c,
            forms,
            mean_index: None,
        };
        data.with_mean_index(mean_index)
    }

    /// Sets or clears the mean slot, validating the frame condition.
    pub fn with_mean_index(mut self, mean_index: Option<usize>) -> Result<Self> {
        if let Some(m) = mean_index {
            if m >= self.p() {
                return Err(GeometryError::InvalidData(format!(
                    "mean_index {m} out of range for p = {}",
                    self.p()
                )));
            }
            let tol = FRAME_TOL * self.scale();
            for (alpha, h) in self.forms.iter().enumerate() {
                if alpha != m && h.trace().abs() > tol {
                    return Err(GeometryError::InvalidData(format!(
                        "mean_index {m} set but H[{alpha}] has trace {:e}",
                        h.trace()
                    )));
                }
            }
        }
        self.mean_index = mean_index;
        Ok(self)
    }

    pub(crate) fn from_parts_unchecked(
        n: usize,
        c: f64,
        forms: MatrixTuple,
        mean_index: Option<usize>,
    ) -> Self {
        FundamentalData {
            n,
            c,
            forms,
            mean_index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.forms.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn forms(&self) -> &MatrixTuple {
        &self.forms
    }

    pub fn form(&self, alpha: usize) -> &SymMatrix {
        &self.forms.matrices()[alpha]
    }

    pub fn mean_index(&self) -> Option<usize> {
        self.mean_index
    }

    /// `max(1, max |h^α_ij|)`; the unit for all relative tolerances.
    pub fn scale(&self) -> f64 {
        self.forms.max_abs().max(1.0)
    }

    /// All labels `0..p`.
    pub fn all_labels(&self) -> Vec<usize> {
        (0..self.p()).collect()
    }

    /// Labels other than the mean slot (all labels if none is set).
    pub fn non_mean_labels(&self) -> Vec<usize> {
        (0..self.p())
            .filter(|&a| Some(a) != self.mean_index)
            .collect()
    }

    pub fn traces(&self) -> Vec<f64> {
        self.forms.iter().map(SymMatrix::trace).collect()
    }

    /// `|ξ| = |Σ_α tr(H_α) e_α| / n`.
    pub fn mean_curvature(&self) -> f64 {
        let t = self.traces();
        t.iter().map(|x| x * x).sum::<f64>().sqrt() / self.n as f64
    }

    /// `S = Σ_α tr H_α²`.
    pub fn squared_norm(&self) -> f64 {
        self.forms.norm_sq()
    }

    /// Subtuple on `labels`, in the given order.
    pub fn subtuple(&self, labels: &[usize]) -> MatrixTuple {
        MatrixTuple::new(
            self.n,
            labels.iter().map(|&a| self.form(a).clone()).collect(),
        )
        .expect("members share dimension n")
    }

    /// Replaces the normal forms by `q`-mixed ones (`B'_r = Σ q_rs B_s`).
    /// The mean slot is kept only if the rotated frame still satisfies the
    /// frame condition.
    pub fn rotate_normal(&self, q: &Matrix) -> Result<Self> {
        let forms = self.forms.rotate(q)?;
        let rotated = FundamentalData::from_parts_unchecked(self.n, self.c, forms, None);
        Ok(match self.mean_index {
            Some(m) => rotated.clone().with_mean_index(Some(m)).unwrap_or(rotated),
            None => rotated,
        })
    }

    /// Tangent change of frame `H_α ↦ QᵀH_αQ`.
    pub fn conjugate_tangent(&self, q: &Matrix) -> Result<Self> {
        let forms = self.forms.conjugate(q)?;
        Ok(FundamentalData::from_parts_unchecked(
            self.n,
            self.c,
            forms,
            self.mean_index,
        ))
    }
}

/// `R_ijkl` stored densely, row-major in `(i, j, k, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    comps: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(n: usize) -> Self {
        CurvatureTensor {
            n,
            comps: vec![0.0; n * n * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comps[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.idx(i, j, k, l);
        self.comps[at] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest violation of `R_ijkl = -R_jikl = -R_ijlk = R_klij` and of the
    /// first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `Σ_{i≠j} R_ijij`.
    pub fn scalar_curvature(&self) -> f64 {
        let mut terms = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    terms.push(self.get(i, j, i, j));
                }
            }
        }
        pairwise_sum(&terms)
    }

    /// The curvature operator on 2-vectors `e_i ∧ e_j` (`i < j`), normalized
    /// so that `⟨R(e_i∧e_j), e_i∧e_j⟩ = R_ijij`. Restricted to unit
    /// decomposable 2-vectors its quadratic form is the sectional curvature.
    pub fn curvature_operator(&self) -> Matrix {
        let pairs = bivector_pairs(self.n);
        let m = pairs.len();
        Matrix::from_fn(m, m, |a, b| {
            let (i, j) = pairs[a];
            let (k, l) = pairs[b];
            0.5 * (self.get(i, j, k, l) + self.get(k, l, i, j))
        })
    }

    /// `R(u, v, u, v) = Σ R_ijkl u_i v_j u_k v_l`.
    pub fn quadratic(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * uv * u[k] * v[l];
                    }
                }
            }
        }
        acc
    }
}

fn bivector_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            v.push((i, j));
        }
    }
    v
}

/// Gauss equation:
/// `R_ijkl = c(δ_ik δ_jl − δ_il δ_jk) + Σ_α (h^α_ik h^α_jl − h^α_il h^α_jk)`.
pub fn riemann(data: &FundamentalData) -> CurvatureTensor {
    let n = data.n();
    let c = data.c();
    let mut t = CurvatureTensor::zeros(n);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = c * (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k));
                    for h in data.forms().iter() {
                        v += h.get(i, k) * h.get(j, l) - h.get(i, l) * h.get(j, k);
                    }
                    t.set(i, j, k, l, v);
                }
            }
        }
    }
    t
}

/// `R_αβkl` stored densely, row-major in `(α, β, k, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalCurvature {
    p: usize,
    n: usize,
    comps: Vec<f64>,
}

impl NormalCurvature {
    pub fn get(&self, alpha: usize, beta: usize, k: usize, l: usize) -> f64 {
        self.comps[((alpha * self.p + beta) * self.n + k) * self.n + l]
    }

    /// `Σ_{α,β,k,l} R_αβkl²`.
    pub fn norm_sq(&self) -> f64 {
        pairwise_sum(&self.comps.iter().map(|x| x * x).collect::<Vec<_>>())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Ricci equation: `R_αβkl = Σ_i (h^α_ik h^β_il − h^α_il h^β_ik)`.
pub fn normal_curvature(data: &FundamentalData) -> NormalCurvature {
    let (n, p) = (data.n(), data.p());
    let mut comps = vec![0.0; p * p * n * n];
    for a in 0..p {
        let ha = data.form(a);
        for b in 0..p {
            let hb = data.form(b);
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for i in 0..n {
                        v += ha.get(i, k) * hb.get(i, l) - ha.get(i, l) * hb.get(i, k);
                    }
                    comps[((a * p + b) * n + k) * n + l] = v;
                }
            }
        }
    }
    NormalCurvature { p, n, comps }
}

/// A tangent 2-plane spanned by two linearly independent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSpec {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl PlaneSpec {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        let gram = gram_det(&u, &v);
        if !(gram > 1e-12) {
            return Err(GeometryError::DegeneratePlane { gram });
        }
        Ok(PlaneSpec { u, v })
    }

    /// The plane `span(e_i, e_j)` in dimension `n`.
    pub fn coordinate(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        u[i] = 1.0;
        v[j] = 1.0;
        Self::new(u, v)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_det(u: &[f64], v: &[f64]) -> f64 {
    dot(u, u) * dot(v, v) - dot(u, v).powi(2)
}

/// `K(π) = R(u,v,u,v) / (|u|²|v|² − ⟨u,v⟩²)`.
pub fn sectional(tensor: &CurvatureTensor, plane: &PlaneSpec) -> Result<f64> {
    if plane.u.len() != tensor.n() {
        return Err(GeometryError::DimensionMismatch {
            expected: tensor.n(),
            found: plane.u.len(),
        });
    }
    Ok(tensor.quadratic(&plane.u, &plane.v) / gram_det(&plane.u, &plane.v))
}

/// Two-sided enclosure of `K_min` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KminBracket {
    /// Smallest eigenvalue of the curvature operator; a guaranteed lower bound.
    pub lo: f64,
    /// Smallest sectional curvature found by search; an upper bound.
    pub hi: f64,
}

impl KminBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

pub const DEFAULT_KMIN_STARTS: usize = 64;
const PLANE_MAX_ITERS: usize = 200;
const PLANE_CONVERGENCE: f64 = 1e-12;

/// Encloses `K_min` between the curvature-operator lower bound and the best
/// plane found by projected descent from `starts` random orthonormal pairs
/// plus every coordinate plane.
pub fn kmin_bracket(data: &FundamentalData, starts: usize, seed: u64) -> Result<KminBracket> {
    if data.n() < 2 {
        return Err(GeometryError::OutOfRange(format!(
            "sectional curvature needs n >= 2, got n = {}",
            data.n()
        )));
    }
    Ok(kmin_bracket_tensor(&riemann(data), starts, seed))
}

pub fn kmin_bracket_tensor(tensor: &CurvatureTensor, starts: usize, seed: u64) -> KminBracket {
    let n = tensor.n();
    let op = tensor.curvature_operator();
    let (lo_eig, bottom) = lowest_eigenpair(&op);

    let coordinate_min = (0..op.nrows())
        .map(|a| op[(a, a)])
        .fold(f64::INFINITY, f64::min);
    // the dominant plane of the lowest eigen-bivector; exact when that
    // bivector is decomposable (always for n ≤ 3)
    let (eu, ev) = dominant_plane(n, &bottom);
    let from_eigen = minimize_plane(&op, n, eu, ev);
    let searched = (0..starts as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_for(seed, s);
            let (u, v) = random_orthonormal_pair(&mut rng, n);
            minimize_plane(&op, n, u, v)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let hi = coordinate_min.min(searched).min(from_eigen);
    KminBracket {
        lo: lo_eig.min(hi),
        hi,
    }
}

/// Smallest eigenvalue of the curvature operator.
pub fn kmin_lower_bound(tensor: &CurvatureTensor) -> f64 {
    lowest_eigenpair(&tensor.curvature_operator()).0
}

fn lowest_eigenpair(op: &Matrix) -> (f64, Vec<f64>) {
    if op.nrows() == 1 {
        return (op[(0, 0)], vec![1.0]);
    }
    let eig = nalgebra::SymmetricEigen::new(op.clone());
    let mut k = 0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l < eig.eigenvalues[k] {
            k = i;
        }
    }
    (
        eig.eigenvalues[k],
        eig.eigenvectors.column(k).iter().copied().collect(),
    )
}

/// Orthonormal pair spanning the top singular plane of the bivector `ω`.
fn dominant_plane(n: usize, omega: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut w = Matrix::zeros(n, n);
    for (a, &(i, j)) in bivector_pairs(n).iter().enumerate() {
        w[(i, j)] = omega[a];
        w[(j, i)] = -omega[a];
    }
    let (_, vectors) = sorted_eigen(&(w.transpose() * &w));
    let u: Vec<f64> = vectors.column(0).iter().copied().collect();
    let v: Vec<f64> = vectors.column(1).iter().copied().collect();
    orthonormalize(&u, &v).unwrap_or_else(|| {
        let mut e0 = vec![0.0; n];
        let mut e1 = vec![0.0; n];
        e0[0] = 1.0;
        e1[1] = 1.0;
        (e0, e1)
    })
}

fn random_orthonormal_pair<R: rand::Rng>(rng: &mut R, n: usize) -> (Vec<f64>, Vec<f64>) {
    use rand_distr::StandardNormal;
    loop {
        let u: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(pair) = orthonormalize(&u, &v) {
            return pair;
        }
    }
}

fn orthonormalize(u: &[f64], v: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let nu = dot(u, u).sqrt();
    if !(nu > 1e-12) {
        return None;
    }
    let u: Vec<f64> = u.iter().map(|x| x / nu).collect();
    let proj = dot(&u, v);
    let mut w: Vec<f64> = v.iter().zip(&u).map(|(y, x)| y - proj * x).collect();
    // second pass of Gram–Schmidt
    let proj = dot(&u, &w);
    w.iter_mut().zip(&u).for_each(|(y, x)| *y -= proj * x);
    let nw = dot(&w, &w).sqrt();
    if !(nw > 1e-12) {
        return None;
    }
    Some((u, w.into_iter().map(|x| x / nw).collect()))
}

/// Value `ωᵀ Q ω` and the antisymmetric matrix `W_ij = (Qω)_ij`.
fn plane_energy(op: &Matrix, n: usize, u: &[f64], v: &[f64]) -> (f64, Matrix) {
    let pairs = bivector_pairs(n);
    let omega: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| u[i] * v[j] - u[j] * v[i])
        .collect();
    let mut w = Matrix::zeros(n, n);
    let mut value = 0.0;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        let qa: f64 = (0..pairs.len()).map(|b| op[(a, b)] * omega[b]).sum();
        value += qa * omega[a];
        w[(i, j)] = qa;
        w[(j, i)] = -qa;
    }
    (value, w)
}

/// Projected descent over orthonormal pairs with backtracking.
fn minimize_plane(op: &Matrix, n: usize, mut u: Vec<f64>, mut v: Vec<f64>) -> f64 {
    let scale = op.amax().max(1e-300);
    let mut step = 0.5 / scale;
    let (mut f, mut w) = plane_energy(op, n, &u, &v);
    for _ in 0..PLANE_MAX_ITERS {
        // ∂f/∂u = 2Wv, ∂f/∂v = -2Wu
        let gu: Vec<f64> = (0..n)
            .map(|a| 2.0 * (0..n).map(|j| w[(a, j)] * v[j]).sum::<f64>())
            .collect();
        let gv: Vec<f64> = (0..n)
            .map(|b| -2.0 * (0..n).map(|i| w[(b, i)] * u[i]).sum::<f64>())
            .collect();
        // project onto the tangent space of the orthonormal-pair manifold
        let (uu, uv, vu, vv) = (dot(&u, &gu), dot(&u, &gv), dot(&v, &gu), dot(&v, &gv));
        let sym = 0.5 * (uv + vu);
        let pu: Vec<f64> = (0..n).map(|a| gu[a] - u[a] * uu - v[a] * sym).collect();
        let pv: Vec<f64> = (0..n).map(|a| gv[a] - u[a] * sym - v[a] * vv).collect();
        let gnorm = dot(&pu, &pu) + dot(&pv, &pv);
        if gnorm < 1e-30 {
            break;
        }
        let mut accepted = None;
        let mut trial = step;
        for _ in 0..40 {
            let cu: Vec<f64> = (0..n).map(|a| u[a] - trial * pu[a]).collect();
            let cv: Vec<f64> = (0..n).map(|a| v[a] - trial * pv[a]).collect();
            if let Some((nu, nv)) = orthonormalize(&cu, &cv) {
                let (fn_, wn) = plane_energy(op, n, &nu, &nv);
                if fn_ < f {
                    accepted = Some((nu, nv, fn_, wn));
                    break;
                }
            }
            trial *= 0.5;
        }
        match accepted {
            Some((nu, nv, fn_, wn)) => {
                let gain = f - fn_;
                u = nu;
                v = nv;
                f = fn_;
                w = wn;
                step = (trial * 2.0).min(0.5 / scale);
                if gain < PLANE_CONVERGENCE {
                    break;
                }
            }
            None => break,
        }
    }
    f
}

/// Scalar invariants at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarInvariants {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "S_H")]
    pub s_h: Option<f64>,
    #[serde(rename = "S_I")]
    pub s_i: Option<f64>,
    #[serde(rename = "R_scal")]
    pub r_scal: f64,
}

pub fn invariants(data: &FundamentalData) -> ScalarInvariants {
    let n = data.n() as f64;
    let s = data.squared_norm();
    let h = data.mean_curvature();
    let (s_h, s_i) = match data.mean_index() {
        Some(m) => {
            let s_h = data.form(m).frob_norm_sq();
            let s_i = pairwise_sum(
                &data
                    .non_mean_labels()
                    .iter()
                    .map(|&a| data.form(a).frob_norm_sq())
                    .collect::<Vec<_>>(),
            );
            (Some(s_h), Some(s_i))
        }
        None => (None, None),
    };
    ScalarInvariants {
        s,
        h,
        s_h,
        s_i,
        r_scal: n * (n - 1.0) * data.c() + n * n * h * h - s,
    }
}

/// Rotates the normal frame so one slot points along the mean-curvature
/// vector (`tr H = nH`) and all others are traceless. Minimal data comes back
/// unchanged with the mean slot cleared.
pub fn align_mean_frame(data: &FundamentalData) -> FundamentalData {
    let traces = data.traces();
    let norm = traces.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = FRAME_TOL * data.scale();
    if norm <= tol {
        return FundamentalData::from_parts_unchecked(
            data.n(),
            data.c(),
            data.forms().clone(),
            None,
        );
    }

    let nonzero: Vec<usize> = (0..traces.len())
        .filter(|&a| traces[a].abs() > tol)
        .collect();
    if let [slot] = nonzero[..] {
        let mut forms = data.forms().clone().into_matrices();
        if traces[slot] < 0.0 {
            forms[slot] = forms[slot].scaled(-1.0);
        }
        let forms = MatrixTuple::new(data.n(), forms).expect("same dimension");
        return FundamentalData::from_parts_unchecked(data.n(), data.c(), forms, Some(slot));
    }

    // Householder reflection taking e_0 to the unit trace vector; its first
    // row is t/|t| so slot 0 receives the mean direction.
    let p = traces.len();
    let t_hat: Vec<f64> = traces.iter().map(|x| x / norm).collect();
    let mut w: Vec<f64> = t_hat.iter().map(|x| -x).collect();
    w[0] += 1.0;
    let wn = dot(&w, &w);
    let q = Matrix::from_fn(p, p, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - 2.0 * w[i] * w[j] / wn
    });
    let mut forms = mix_unchecked(data.forms(), &q).into_matrices();
    // exact tracelessness for the complementary slots
    for h in forms.iter_mut().skip(1) {
        let shift = h.trace() / data.n() as f64;
        if shift != 0.0 {
            let mut m = h.as_matrix().clone();
            for i in 0..data.n() {
                m[(i, i)] -= shift;
            }
            *h = SymMatrix::symmetrized(m);
        }
    }
    let forms = MatrixTuple::new(data.n(), forms).expect("same dimension");
    FundamentalData::from_parts_unchecked(data.n(), data.c(), forms, Some(0))
}

/// Rotates the sub-tuple on `restrict` (default: every non-mean slot) so its
/// Gram matrix `tr(H_α H_β)` is diagonal with entries sorted descending.
pub fn gram_diagonalize(
    data: &FundamentalData,
    restrict: Option<&[usize]>,
) -> Result<FundamentalData> {
    Ok(gram_diagonalize_with_rotation(data, restrict)?.0)
}

/// As [`gram_diagonalize`], also returning the applied `m × m` rotation `q`
/// (rows are sorted Gram eigenvectors; `B'_r = Σ_s q_rs B_s`).
pub fn gram_diagonalize_with_rotation(
    data: &FundamentalData,
    restrict: Option<&[usize]>,
) -> Result<(FundamentalData, Matrix)> {
    let labels = resolve_restriction(data, restrict)?;
    let sub = data.subtuple(&labels);
    let (_, vectors) = sorted_eigen(&sub.gram());
    let q = vectors.transpose();
    let rotated = mix_unchecked(&sub, &q).into_matrices();
    let mut forms = data.forms().clone().into_matrices();
    for (slot, m) in labels.iter().zip(rotated) {
        forms[*slot] = m;
    }
    let forms = MatrixTuple::new(data.n(), forms)?;
    Ok((
        FundamentalData::from_parts_unchecked(data.n(), data.c(), forms, data.mean_index()),
        q,
    ))
}

/// Validates a label subset; `None` means every non-mean label.
pub fn resolve_restriction(
    data: &FundamentalData,
    restrict: Option<&[usize]>,
) -> Result<Vec<usize>> {
    let Some(labels) = restrict else {
        return Ok(data.non_mean_labels());
    };
    let mut seen = vec![false; data.p()];
    for &a in labels {
        if a >= data.p() {
            return Err(GeometryError::OutOfRange(format!(
                "label {a} out of range for p = {}",
                data.p()
            )));
        }
        if seen[a] {
            return Err(GeometryError::OutOfRange(format!("label {a} repeated")));
        }
        if Some(a) == data.mean_index() {
            return Err(GeometryError::OutOfRange(format!(
                "restriction includes the mean slot {a}"
            )));
        }
        seen[a] = true;
    }
    Ok(labels.to_vec())
}
