//! Dense real symmetric matrices and ordered tuples of them.
//!
//! A [`SymMatrix`] is always exactly symmetric in memory: inputs within the
//! acceptance tolerance are symmetrized as `(A + Aᵀ)/2` on construction.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::rng::rng_for;

pub type Matrix = DMatrix<f64>;

/// Relative tolerance on `max|a_ij - a_ji|` when accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Bound on `‖QᵀQ - I‖_F` when accepting a matrix as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

const PAIRWISE_BLOCK: usize = 32;

/// Sum with pairwise splitting once the input exceeds 32 terms.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().fold(0.0, |acc, x| acc + x)
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Accepts `m` when it is square, nonempty and symmetric within
    /// [`SYMMETRY_TOL`]` · max(1, max|a_ij|)`.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeometryError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(GeometryError::Empty("matrix of dimension 0"));
        }
        let asymmetry = asymmetry(&m);
        let scale = m.amax().max(1.0);
        if !(asymmetry <= SYMMETRY_TOL * scale) {
            return Err(GeometryError::NotSymmetric { asymmetry });
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: Matrix) -> Self {
        let t = m.transpose();
        SymMatrix((m + t) * 0.5)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(GeometryError::Empty("matrix with no rows"));
        }
        for row in rows {
            if row.len() != n {
                return Err(GeometryError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::new(Matrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n, n))
    }

    /// `s · I_n`.
    pub fn scalar(n: usize, s: f64) -> Self {
        SymMatrix(Matrix::identity(n, n) * s)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        SymMatrix(Matrix::from_fn(
            n,
            n,
            |i, j| if i == j { values[i] } else { 0.0 },
        ))
    }

    /// Matrix with `value` at `(i, j)` and `(j, i)`, zero elsewhere.
    pub fn offdiag(n: usize, i: usize, j: usize, value: f64) -> Self {
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = value;
        m[(j, i)] = value;
        SymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frob_norm_sq(&self) -> f64 {
        frob_norm_sq(&self.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymMatrix(&self.0 * s)
    }

    /// `QᵀAQ`.
    pub fn conjugate(&self, q: &Matrix) -> Result<Self> {
        check_dim(self.dim(), q.nrows())?;
        Ok(Self::symmetrized(q.transpose() * &self.0 * q))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = GeometryError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

fn asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, found })
    }
}

/// `AB - BA`. Skew-symmetric for symmetric inputs.
pub fn commutator(a: &SymMatrix, b: &SymMatrix) -> Result<Matrix> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.as_matrix() * b.as_matrix();
    // (AB)ᵀ = BA for symmetric A, B
    let ba = ab.transpose();
    Ok(ab - ba)
}

/// `‖[A,B]‖²` from the single product `AB`.
pub fn commutator_norm_sq(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.as_matrix() * b.as_matrix();
    let n = ab.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = ab[(i, j)] - ab[(j, i)];
            acc += d * d;
        }
    }
    Ok(2.0 * acc)
}

/// Sum of squared entries.
pub fn frob_norm_sq(a: &Matrix) -> f64 {
    if a.len() > PAIRWISE_BLOCK {
        let squares: Vec<f64> = a.iter().map(|x| x * x).collect();
        pairwise_sum(&squares)
    } else {
        a.iter().map(|x| x * x).sum()
    }
}

/// Trace of the ordered product of `list`.
pub fn trace_product(list: &[&SymMatrix]) -> Result<f64> {
    let (first, rest) = list.split_first().ok_or(GeometryError::Empty(
        "trace_product needs at least one matrix",
    ))?;
    let n = first.dim();
    for m in rest {
        check_dim(n, m.dim())?;
    }
    if rest.is_empty() {
        return Ok(first.trace());
    }
    let (last, middle) = rest.split_last().expect("nonempty");
    let mut acc = first.as_matrix().clone();
    for m in middle {
        acc *= m.as_matrix();
    }
    // tr(XY) = Σ_ij X_ij Y_ji, and Y is symmetric
    Ok(acc.component_mul(last.as_matrix()).sum())
}

/// `frob_norm_sq([a,b]) ≤ tol² · (1 + ‖a‖²‖b‖²)`.
pub fn commutes(a: &SymMatrix, b: &SymMatrix, tol: f64) -> bool {
    match commutator_norm_sq(a, b) {
        Ok(c) => c <= tol * tol * (1.0 + a.frob_norm_sq() * b.frob_norm_sq()),
        Err(_) => false,
    }
}

/// `‖QᵀQ - I‖_F`, or an error if `q` is not square.
pub fn orthogonality_defect(q: &Matrix) -> Result<f64> {
    if q.nrows() != q.ncols() {
        return Err(GeometryError::NotSquare {
            rows: q.nrows(),
            cols: q.ncols(),
        });
    }
    let n = q.nrows();
    Ok((q.transpose() * q - Matrix::identity(n, n)).norm())
}

pub fn check_orthogonal(q: &Matrix) -> Result<()> {
    let defect = orthogonality_defect(q)?;
    if defect <= ORTHOGONALITY_TOL {
        Ok(())
    } else {
        Err(GeometryError::NotOrthogonal { defect })
    }
}

/// An ordered list of same-dimension symmetric matrices. The dimension is
/// stored separately so an empty tuple still knows its `n`. Serialized as a
/// non-empty list of matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SymMatrix>", into = "Vec<SymMatrix>")]
pub struct MatrixTuple {
    dim: usize,
    matrices: Vec<SymMatrix>,
}

impl TryFrom<Vec<SymMatrix>> for MatrixTuple {
    type Error = GeometryError;

    fn try_from(matrices: Vec<SymMatrix>) -> Result<Self> {
        MatrixTuple::from_matrices(matrices)
    }
}

impl From<MatrixTuple> for Vec<SymMatrix> {
    fn from(t: MatrixTuple) -> Self {
        t.matrices
    }
}

impl MatrixTuple {
    pub fn new(dim: usize, matrices: Vec<SymMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::Empty("tuple of dimension 0"));
        }
        for m in &matrices {
            check_dim(dim, m.dim())?;
        }
        Ok(MatrixTuple { dim, matrices })
    }

    /// Infers the dimension from the first member.
    pub fn from_matrices(matrices: Vec<SymMatrix>) -> Result<Self> {
        let dim = matrices
            .first()
            .map(SymMatrix::dim)
            .ok_or(GeometryError::Empty(
                "cannot infer dimension of an empty tuple",
            ))?;
        Self::new(dim, matrices)
    }

    pub fn zeros(dim: usize, len: usize) -> Self {
        MatrixTuple {
            dim,
            matrices: vec![SymMatrix::zeros(dim); len],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[SymMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<SymMatrix> {
        self.matrices
    }

    pub fn get(&self, i: usize) -> Option<&SymMatrix> {
        self.matrices.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SymMatrix> {
        self.matrices.iter()
    }

    pub fn push(&mut self, m: SymMatrix) -> Result<()> {
        check_dim(self.dim, m.dim())?;
        self.matrices.push(m);
        Ok(())
    }

    /// `Σ_r ‖B_r‖²`.
    pub fn norm_sq(&self) -> f64 {
        let terms: Vec<f64> = self.matrices.iter().map(SymMatrix::frob_norm_sq).collect();
        pairwise_sum(&terms)
    }

    /// Largest absolute entry over all members (0 for the empty tuple).
    pub fn max_abs(&self) -> f64 {
        self.matrices
            .iter()
            .map(SymMatrix::max_abs)
            .fold(0.0, f64::max)
    }

    /// `G_rs = tr(B_r B_s)`.
    pub fn gram(&self) -> Matrix {
        let m = self.len();
        let mut g = Matrix::zeros(m, m);
        for r in 0..m {
            for s in r..m {
                let v = self.matrices[r]
                    .as_matrix()
                    .component_mul(self.matrices[s].as_matrix())
                    .sum();
                g[(r, s)] = v;
                g[(s, r)] = v;
            }
        }
        g
    }

    /// `Σ_{r,s} ‖[B_r,B_s]‖²` over ordered pairs.
    pub fn commutator_energy(&self) -> f64 {
        let mut terms = Vec::new();
        for r in 0..self.len() {
            for s in (r + 1)..self.len() {
                let c = commutator_norm_sq(&self.matrices[r], &self.matrices[s])
                    .expect("tuple members share a dimension");
                terms.push(2.0 * c);
            }
        }
        pairwise_sum(&terms)
    }

    pub fn scaled(&self, s: f64) -> Self {
        MatrixTuple {
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| m.scaled(s)).collect(),
        }
    }

    /// Simultaneous tangent conjugation `B_r ↦ QᵀB_rQ`.
    pub fn conjugate(&self, q: &Matrix) -> Result<Self> {
        check_dim(self.dim, q.nrows())?;
        check_orthogonal(q)?;
        let matrices = self
            .matrices
            .iter()
            .map(|m| m.conjugate(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixTuple {
            dim: self.dim,
            matrices,
        })
    }

    /// Normal-frame action `B'_r = Σ_s q_rs B_s`.
    pub fn rotate(&self, q: &Matrix) -> Result<Self> {
        rotate_tuple(self, q)
    }
}

/// `B'_r = Σ_s q_rs B_s` for an orthogonal `q` of size `len × len`.
pub fn rotate_tuple(t: &MatrixTuple, q: &Matrix) -> Result<MatrixTuple> {
    check_dim(t.len(), q.nrows())?;
    check_orthogonal(q)?;
    Ok(mix_unchecked(t, q))
}

pub(crate) fn mix_unchecked(t: &MatrixTuple, q: &Matrix) -> MatrixTuple {
    let n = t.dim;
    let matrices = (0..q.nrows())
        .map(|r| {
            let mut acc = Matrix::zeros(n, n);
            for (s, b) in t.matrices.iter().enumerate() {
                let w = q[(r, s)];
                if w != 0.0 {
                    acc += b.as_matrix() * w;
                }
            }
            SymMatrix::symmetrized(acc)
        })
        .collect();
    MatrixTuple { dim: n, matrices }
}

/// Symmetric matrix with independent upper-triangle entries uniform in
/// `[-scale, scale]`, deterministic in `seed`.
pub fn random_symmetric(dim: usize, seed: u64, scale: f64) -> SymMatrix {
    random_symmetric_with(&mut rng_for(seed, 0), dim, scale)
}

/// Traceless variant of [`random_symmetric`].
pub fn random_traceless_symmetric(dim: usize, seed: u64, scale: f64) -> SymMatrix {
    random_traceless_symmetric_with(&mut rng_for(seed, 0), dim, scale)
}

pub fn random_symmetric_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> SymMatrix {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = scale * rng.random_range(-1.0..=1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymMatrix(m)
}

pub fn random_traceless_symmetric_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> SymMatrix {
    let mut m = random_symmetric_with(rng, dim, scale).into_matrix();
    let shift = m.trace() / dim as f64;
    for i in 0..dim {
        m[(i, i)] -= shift;
    }
    // absorb the residual round-off into the last diagonal entry
    let residual = m.trace();
    m[(dim - 1, dim - 1)] -= residual;
    SymMatrix(m)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

pub fn random_orthogonal(dim: usize, seed: u64) -> Matrix {
    random_orthogonal_with(&mut rng_for(seed, 0), dim)
}

/// Symmetric eigendecomposition with eigenvalues sorted descending. Each
/// eigenvector column is normalized so that its first entry of largest
/// magnitude is positive, which makes the result deterministic.
pub fn sorted_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let peak = v.amax();
        let lead = v.iter().position(|x| x.abs() >= peak - 1e-12).unwrap_or(0);
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, col)] = sign * v[r];
        }
    }
    (values, vectors)
}

/// Counter-clockwise rotation of the plane by `angle`.
pub fn rotation2(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    Matrix::from_row_slice(2, 2, &[c, -s, s, c])
}
