//! Closed-form second fundamental forms of the boundary geometries in the
//! rigidity theorems. Mean slots, when present, are appended last.

use serde::{Deserialize, Serialize};

use crate::curvature::FundamentalData;
use crate::error::{GeometryError, Result};
use crate::symmat::{MatrixTuple, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    TotallyGeodesic,
    /// `S^k × S^{n−k}` minimal in the unit sphere.
    ProductOfSpheres {
        k: usize,
    },
    Veronese,
    UmbilicalSphere,
    /// `S^k × S^{n−k}` minimal in the umbilical sphere `S^{n+1}(1/√(c+H²))`,
    /// with the mean direction `H·I` appended.
    PseudoUmbilicalExtension {
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub n: usize,
    /// Target codimension; `None` keeps the model's own.
    #[serde(default)]
    pub p: Option<usize>,
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

impl ModelSpec {
    /// Pads the generated data with zero normal directions up to `p`.
    pub fn build(&self) -> Result<FundamentalData> {
        let base = match self.kind {
            ModelKind::TotallyGeodesic => totally_geodesic(self.n, self.p.unwrap_or(1), self.c),
            ModelKind::ProductOfSpheres { k } => {
                if self.c != 1.0 {
                    return Err(GeometryError::OutOfRange(
                        "product of spheres is generated in the unit sphere (c = 1)".into(),
                    ));
                }
                product_of_spheres(self.n, k)
            }
            ModelKind::Veronese => {
                if self.n != 2 {
                    return Err(GeometryError::OutOfRange(
                        "the Veronese surface has n = 2".into(),
                    ));
                }
                veronese(self.c, self.h)
            }
            ModelKind::UmbilicalSphere => {
                umbilical_sphere(self.n, self.p.unwrap_or(1), self.c, self.h)
            }
            ModelKind::PseudoUmbilicalExtension { k } => {
                pseudo_umbilical_product(self.n, k, self.c, self.h)
            }
        }?;
        match self.p {
            Some(p) => pad_to(base, p),
            None => Ok(base),
        }
    }
}

/// Inserts zero directions before the mean slot until there are `p` forms.
fn pad_to(data: FundamentalData, p: usize) -> Result<FundamentalData> {
    if data.p() == p {
        return Ok(data);
    }
    if data.p() > p {
        return Err(GeometryError::OutOfRange(format!(
            "model needs codimension at least {}, got p = {p}",
            data.p()
        )));
    }
    let n = data.n();
    let mut forms = Vec::with_capacity(p);
    let mean = data.mean_index();
    for (a, h) in data.forms().iter().enumerate() {
        if Some(a) != mean {
            forms.push(h.clone());
        }
    }
    forms.resize(p - usize::from(mean.is_some()), SymMatrix::zeros(n));
    let mean_index = mean.map(|m| {
        forms.push(data.form(m).clone());
        p - 1
    });
    FundamentalData::new(n, data.c(), forms, mean_index)
}

pub fn totally_geodesic(n: usize, p: usize, c: f64) -> Result<FundamentalData> {
    FundamentalData::new(n, c, vec![SymMatrix::zeros(n); p], None)
}

/// `H = diag(λ I_k, μ I_{n−k})` with `λ = √((n−k)/k)`, `μ = −√(k/(n−k))`.
pub fn product_of_spheres(n: usize, k: usize) -> Result<FundamentalData> {
    let h = product_shape_operator(n, k, 1.0)?;
    FundamentalData::new(n, 1.0, vec![h], None)
}

/// Principal curvatures of the minimal product scaled to ambient curvature
/// `ambient` (so `λμ = −ambient`).
fn product_shape_operator(n: usize, k: usize, ambient: f64) -> Result<SymMatrix> {
    if k == 0 || k >= n {
        return Err(GeometryError::OutOfRange(format!(
            "product of spheres needs 1 <= k <= n - 1 (n = {n}, k = {k})"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    let s = ambient.sqrt();
    let lambda = s * ((nf - kf) / kf).sqrt();
    let mu = -s * (kf / (nf - kf)).sqrt();
    let d: Vec<f64> = (0..n).map(|i| if i < k { lambda } else { mu }).collect();
    Ok(SymMatrix::diag(&d))
}

fn require_positive_ambient(c: f64, h: f64) -> Result<f64> {
    let a = c + h * h;
    if a > 0.0 {
        Ok(a)
    } else {
        Err(GeometryError::Hypothesis(format!(
            "c + H² = {a} must be positive"
        )))
    }
}

/// The traceless Veronese pair `√(c+H²)/√3 · {diag(1,−1), offdiag(1)}`,
/// extended by `H·I` when `H > 0`.
pub fn veronese(c: f64, h: f64) -> Result<FundamentalData> {
    let ambient = require_positive_ambient(c, h)?;
    if h < 0.0 {
        return Err(GeometryError::OutOfRange(
            "mean curvature H must be >= 0".into(),
        ));
    }
    let k = (ambient / 3.0).sqrt();
    let pair = FundamentalData::new(
        2,
        c,
        vec![SymMatrix::diag(&[k, -k]), SymMatrix::offdiag(2, 0, 1, k)],
        None,
    )?;
    if h > 0.0 {
        pseudo_umbilical_extend(&pair, h, c)
    } else {
        Ok(pair)
    }
}

/// `H_mean = H·I`, all other forms zero.
pub fn umbilical_sphere(n: usize, p: usize, c: f64, h: f64) -> Result<FundamentalData> {
    require_positive_ambient(c, h)?;
    if !(h > 0.0) {
        return Err(GeometryError::Hypothesis(
            "umbilical sphere needs H > 0".into(),
        ));
    }
    if p == 0 {
        return Err(GeometryError::OutOfRange(
            "codimension p must be at least 1".into(),
        ));
    }
    let mut forms = vec![SymMatrix::zeros(n); p - 1];
    forms.push(SymMatrix::scalar(n, h));
    FundamentalData::new(n, c, forms, Some(p - 1))
}

/// Appends `H·I` as the mean direction to minimal data and sets the ambient
/// curvature to `c`.
pub fn pseudo_umbilical_extend(data: &FundamentalData, h: f64, c: f64) -> Result<FundamentalData> {
    if !(h > 0.0) {
        return Err(GeometryError::OutOfRange("H must be positive".into()));
    }
    let tol = crate::curvature::FRAME_TOL * data.scale();
    if data.traces().iter().any(|t| t.abs() > tol) {
        return Err(GeometryError::Hypothesis(
            "pseudo-umbilical extension needs minimal data".into(),
        ));
    }
    let n = data.n();
    let mut forms = data.forms().clone();
    forms.push(SymMatrix::scalar(n, h))?;
    let p = forms.len();
    FundamentalData::new(n, c, MatrixTuple::into_matrices(forms), Some(p - 1))
}

/// Minimal product `S^k × S^{n−k}` in `S^{n+1}(1/√(c+H²))`, pseudo-umbilically
/// placed in `F^{n+2}(c)`.
pub fn pseudo_umbilical_product(n: usize, k: usize, c: f64, h: f64) -> Result<FundamentalData> {
    let ambient = require_positive_ambient(c, h)?;
    let shape = product_shape_operator(n, k, ambient)?;
    let base = FundamentalData::new(n, c, vec![shape], None)?;
    pseudo_umbilical_extend(&base, h, c)
}
