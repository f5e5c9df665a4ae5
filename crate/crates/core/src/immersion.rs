//! Second fundamental forms of explicit parametric immersions by central
//! differences, as a model-independent check on the closed forms.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::FundamentalData;
use crate::error::{GeometryError, Result};
use crate::rng::rng_for;
use crate::symmat::{sorted_eigen, Matrix, SymMatrix};

pub const DEFAULT_STEP: f64 = 1e-4;
/// `|F(u)| = r` tolerance for sphere-valued maps.
pub const SPHERE_TOL: f64 = 1e-10;
/// Relative eigenvalue floor of the induced metric.
const RANK_TOL: f64 = 1e-12;

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ambient {
    Euclidean,
    Sphere { radius: f64 },
}

impl Ambient {
    pub fn curvature(&self) -> f64 {
        match *self {
            Ambient::Euclidean => 0.0,
            Ambient::Sphere { radius } => 1.0 / (radius * radius),
        }
    }
}

/// Axis-aligned parameter box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(GeometryError::InvalidData("empty parameter domain".into()));
        }
        Ok(Domain { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Node `index` of a `g`-per-axis grid with half-step offsets, so no
    /// node sits on the boundary (coordinate poles live there).
    pub fn grid_point(&self, g: usize, mut index: usize) -> Vec<f64> {
        let mut u = vec![0.0; self.dim()];
        for (a, x) in u.iter_mut().enumerate() {
            let i = index % g;
            index /= g;
            let h = (self.upper[a] - self.lower[a]) / g as f64;
            *x = self.lower[a] + (i as f64 + 0.5) * h;
        }
        u
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&a, &b)| rng.random_range(a..b))
            .collect()
    }
}

#[derive(Clone)]
pub struct ImmersionSpec {
    pub name: String,
    pub n: usize,
    /// Dimension of the Euclidean space holding the image.
    pub big_n: usize,
    pub ambient: Ambient,
    pub domain: Domain,
    map: MapFn,
}

impl fmt::Debug for ImmersionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImmersionSpec")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("big_n", &self.big_n)
            .field("ambient", &self.ambient)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ImmersionSpec {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        big_n: usize,
        ambient: Ambient,
        domain: Domain,
        map: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 || domain.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: domain.dim(),
            });
        }
        if let Ambient::Sphere { radius } = ambient {
            if !(radius > 0.0) {
                return Err(GeometryError::InvalidData(
                    "sphere radius must be positive".into(),
                ));
            }
        }
        Ok(ImmersionSpec {
            name: name.into(),
            n,
            big_n,
            ambient,
            domain,
            map: Arc::new(map),
        })
    }

    /// Codimension inside the ambient space form.
    pub fn codimension(&self) -> usize {
        let radial = usize::from(matches!(self.ambient, Ambient::Sphere { .. }));
        self.big_n.saturating_sub(self.n + radial)
    }

    pub fn eval(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n {
            return Err(GeometryError::DimensionMismatch {
                expected: self.n,
                found: u.len(),
            });
        }
        let x = (self.map)(u);
        if x.len() != self.big_n {
            return Err(GeometryError::DimensionMismatch {
                expected: self.big_n,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::DegenerateImmersion(format!(
                "map is not finite at {u:?}"
            )));
        }
        Ok(x)
    }

    /// Precomposes the map with a change of parameters `u = phi(v)`.
    pub fn reparametrize(
        &self,
        domain: Domain,
        phi: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let map = Arc::clone(&self.map);
        ImmersionSpec::new(
            format!("{}∘phi", self.name),
            self.n,
            self.big_n,
            self.ambient,
            domain,
            move |v| map(&phi(v)),
        )
    }
}

/// Finite-difference options. Richardson combines steps `h` and `h/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffOptions {
    pub step: f64,
    pub richardson: bool,
}

impl Default for DiffOptions {
    fn default() -> Self {
        DiffOptions {
            step: DEFAULT_STEP,
            richardson: false,
        }
    }
}

/// `jacobian` is `N × n`; `hessian[a * n + b]` is `∂²F/∂u_a∂u_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub position: Vec<f64>,
    pub jacobian: Matrix,
    pub hessian: Vec<Vec<f64>>,
}

impl Derivatives {
    pub fn second(&self, a: usize, b: usize) -> &[f64] {
        let n = self.jacobian.ncols();
        &self.hessian[a * n + b]
    }
}

fn shifted(u: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut v = u.to_vec();
    for &(a, d) in moves {
        v[a] += d;
    }
    v
}

fn central(spec: &ImmersionSpec, u: &[f64], h: f64) -> Result<Derivatives> {
    let n = spec.n;
    let big_n = spec.big_n;
    let f0 = spec.eval(u)?;
    let mut jacobian = Matrix::zeros(big_n, n);
    let mut hessian = vec![vec![0.0; big_n]; n * n];
    for a in 0..n {
        let fp = spec.eval(&shifted(u, &[(a, h)]))?;
        let fm = spec.eval(&shifted(u, &[(a, -h)]))?;
        for k in 0..big_n {
            jacobian[(k, a)] = (fp[k] - fm[k]) / (2.0 * h);
            hessian[a * n + a][k] = (fp[k] - 2.0 * f0[k] + fm[k]) / (h * h);
        }
        for b in 0..a {
            let fpp = spec.eval(&shifted(u, &[(a, h), (b, h)]))?;
            let fpm = spec.eval(&shifted(u, &[(a, h), (b, -h)]))?;
            let fmp = spec.eval(&shifted(u, &[(a, -h), (b, h)]))?;
            let fmm = spec.eval(&shifted(u, &[(a, -h), (b, -h)]))?;
            for k in 0..big_n {
                let v = (fpp[k] - fpm[k] - fmp[k] + fmm[k]) / (4.0 * h * h);
                hessian[a * n + b][k] = v;
                hessian[b * n + a][k] = v;
            }
        }
    }
    Ok(Derivatives {
        position: f0,
        jacobian,
        hessian,
    })
}

pub fn differentiate(spec: &ImmersionSpec, u: &[f64], opts: &DiffOptions) -> Result<Derivatives> {
    if !(opts.step > 0.0) {
        return Err(GeometryError::OutOfRange("step must be positive".into()));
    }
    let coarse = central(spec, u, opts.step)?;
    if !opts.richardson {
        return Ok(coarse);
    }
    let fine = central(spec, u, opts.step / 2.0)?;
    let extrapolate = |f: f64, c: f64| (4.0 * f - c) / 3.0;
    let jacobian = fine.jacobian.zip_map(&coarse.jacobian, extrapolate);
    let hessian = fine
        .hessian
        .iter()
        .zip(&coarse.hessian)
        .map(|(f, c)| f.iter().zip(c).map(|(&f, &c)| extrapolate(f, c)).collect())
        .collect();
    Ok(Derivatives {
        position: fine.position,
        jacobian,
        hessian,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal tangent frame `T = J g^{-1/2}`, the map `W = g^{-1/2}`, and
/// the normal frame. Normals come from modified Gram–Schmidt over the
/// coordinate axes, always taking the axis with the largest residual next
/// (lowest index on ties). For a sphere ambient the radial direction is
/// projected out first.
#[derive(Clone, Debug, PartialEq)]
pub struct Frames {
    pub tangent: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
    pub w: Matrix,
}

pub fn frames(spec: &ImmersionSpec, position: &[f64], jacobian: &Matrix) -> Result<Frames> {
    let n = spec.n;
    let big_n = spec.big_n;
    let p = spec.codimension();
    if p == 0 {
        return Err(GeometryError::DegenerateImmersion(format!(
            "codimension is zero for n = {n} in {:?} with N = {big_n}",
            spec.ambient
        )));
    }
    let g = jacobian.transpose() * jacobian;
    let (evals, evecs) = sorted_eigen(&g);
    let top = evals[0].max(0.0);
    let bottom = evals[n - 1];
    if !(top > 0.0) || bottom <= RANK_TOL * top {
        return Err(GeometryError::DegenerateImmersion(format!(
            "jacobian rank deficient (metric eigenvalues {evals:?})"
        )));
    }
    let inv_sqrt = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        evals.iter().map(|l| 1.0 / l.sqrt()),
    ));
    let w = &evecs * inv_sqrt * evecs.transpose();
    let t = jacobian * &w;
    let tangent: Vec<Vec<f64>> = (0..n)
        .map(|i| t.column(i).iter().copied().collect())
        .collect();

    let mut basis = tangent.clone();
    if let Ambient::Sphere { radius } = spec.ambient {
        let r = dot(position, position).sqrt();
        if (r - radius).abs() > SPHERE_TOL * radius.max(1.0) {
            return Err(GeometryError::Hypothesis(format!(
                "|F(u)| = {r} is off the ambient sphere of radius {radius}"
            )));
        }
        let mut radial: Vec<f64> = position.iter().map(|x| x / r).collect();
        // the numerical tangent is only orthogonal to x up to round-off
        for e in &tangent {
            let d = dot(&radial, e);
            radial.iter_mut().zip(e).for_each(|(x, y)| *x -= d * y);
        }
        let nr = dot(&radial, &radial).sqrt();
        radial.iter_mut().for_each(|x| *x /= nr);
        basis.push(radial);
    }

    let mut residuals: Vec<Vec<f64>> = (0..big_n)
        .map(|k| {
            let mut e = vec![0.0; big_n];
            e[k] = 1.0;
            e
        })
        .collect();
    let project = |v: &mut Vec<f64>, q: &[f64]| {
        let d = dot(v, q);
        v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
    };
    for q in &basis {
        residuals.iter_mut().for_each(|v| project(v, q));
    }
    let mut normals = Vec::with_capacity(p);
    let mut used = vec![false; big_n];
    for _ in 0..p {
        let mut best = None;
        let mut best_norm = 0.0;
        for (k, v) in residuals.iter().enumerate() {
            let nv = dot(v, v);
            if !used[k] && nv > best_norm {
                best = Some(k);
                best_norm = nv;
            }
        }
        let k = best.ok_or_else(|| {
            GeometryError::DegenerateImmersion("normal complement collapsed".into())
        })?;
        used[k] = true;
        let mut e = residuals[k].clone();
        // second pass keeps orthogonality at round-off level
        for q in basis.iter().chain(&normals) {
            project(&mut e, q);
        }
        let ne = dot(&e, &e).sqrt();
        e.iter_mut().for_each(|x| *x /= ne);
        residuals.iter_mut().for_each(|v| project(v, &e));
        normals.push(e);
    }
    Ok(Frames {
        tangent,
        normals,
        w,
    })
}

/// Second fundamental form with the frame record it was computed in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub u: Vec<f64>,
    pub data: FundamentalData,
    pub tangent: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
}

impl PointSample {
    /// Largest violation of orthonormality, tangent/normal orthogonality and
    /// (for a sphere) normal/radial orthogonality.
    pub fn frame_defect(&self, position: Option<&[f64]>) -> f64 {
        let all: Vec<&Vec<f64>> = self.tangent.iter().chain(&self.normals).collect();
        let mut defect: f64 = 0.0;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((dot(a, b) - target).abs());
            }
        }
        if let Some(x) = position {
            let r = dot(x, x).sqrt();
            for e in &self.normals {
                defect = defect.max((dot(e, x) / r).abs());
            }
        }
        defect
    }
}

pub fn second_fundamental_form(spec: &ImmersionSpec, u: &[f64], step: f64) -> Result<PointSample> {
    second_fundamental_form_with(
        spec,
        u,
        &DiffOptions {
            step,
            richardson: false,
        },
    )
}

/// `h^α_ij = e_α · Σ_ab W_ai W_bj ∂²F/∂u_a∂u_b`.
pub fn second_fundamental_form_with(
    spec: &ImmersionSpec,
    u: &[f64],
    opts: &DiffOptions,
) -> Result<PointSample> {
    let d = differentiate(spec, u, opts)?;
    let fr = frames(spec, &d.position, &d.jacobian)?;
    let n = spec.n;
    let mut forms = Vec::with_capacity(fr.normals.len());
    for e in &fr.normals {
        // coordinate second fundamental form, then change to the orthonormal frame
        let coord = Matrix::from_fn(n, n, |a, b| dot(e, d.second(a, b)));
        let h = fr.w.transpose() * coord * &fr.w;
        forms.push(SymMatrix::new(h)?);
    }
    let data = FundamentalData::new(n, spec.ambient.curvature(), forms, None)?;
    Ok(PointSample {
        u: u.to_vec(),
        data,
        tangent: fr.tangent,
        normals: fr.normals,
    })
}

/// `g^n` samples on the half-offset grid, in grid-index order.
pub fn sample_grid(spec: &ImmersionSpec, g: usize, opts: &DiffOptions) -> Result<Vec<PointSample>> {
    if g == 0 {
        return Err(GeometryError::OutOfRange(
            "grid size must be positive".into(),
        ));
    }
    let total = g
        .checked_pow(spec.n as u32)
        .ok_or_else(|| GeometryError::OutOfRange("grid too large".into()))?;
    (0..total)
        .into_par_iter()
        .map(|i| second_fundamental_form_with(spec, &spec.domain.grid_point(g, i), opts))
        .collect()
}

/// `count` uniform samples in the domain; point `i` draws from stream `i`.
pub fn sample_random(
    spec: &ImmersionSpec,
    count: usize,
    seed: u64,
    opts: &DiffOptions,
) -> Result<Vec<PointSample>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let u = spec.domain.random_point(&mut rng_for(seed, i as u64));
            second_fundamental_form_with(spec, &u, opts)
        })
        .collect()
}

pub const BUILTIN_NAMES: &[&str] = &["veronese", "clifford", "sphere", "paraboloid"];

pub fn builtin(name: &str) -> Result<ImmersionSpec> {
    match name {
        "veronese" => veronese_map(),
        "clifford" => clifford_map(),
        "sphere" => round_sphere_map(),
        "paraboloid" => graph(0.5, |x, y| 0.5 * (x * x + y * y)),
        other => Err(GeometryError::UnknownName(format!(
            "unknown builtin immersion {other:?} (expected one of {BUILTIN_NAMES:?})"
        ))),
    }
}

/// Quadratic Veronese map of the unit sphere into `S⁴(1) ⊂ R⁵`, in polar
/// coordinates `(θ, φ)`. The θ range stops short of the poles.
pub fn veronese_map() -> Result<ImmersionSpec> {
    let domain = Domain::new(vec![0.15, 0.0], vec![PI - 0.15, 2.0 * PI])?;
    ImmersionSpec::new(
        "veronese",
        2,
        5,
        Ambient::Sphere { radius: 1.0 },
        domain,
        |u| {
            let (st, ct) = u[0].sin_cos();
            let (sp, cp) = u[1].sin_cos();
            veronese_point(st * cp, st * sp, ct).to_vec()
        },
    )
}

pub fn veronese_point(x: f64, y: f64, z: f64) -> [f64; 5] {
    let s3 = 3f64.sqrt();
    [
        s3 * y * z,
        s3 * z * x,
        s3 * x * y,
        0.5 * s3 * (x * x - y * y),
        0.5 * (x * x + y * y - 2.0 * z * z),
    ]
}

/// `(θ, φ) ↦ (cos θ, sin θ, cos φ, sin φ)/√2` in `S³(1) ⊂ R⁴`.
pub fn clifford_map() -> Result<ImmersionSpec> {
    let domain = Domain::new(vec![0.0, 0.0], vec![2.0 * PI, 2.0 * PI])?;
    ImmersionSpec::new(
        "clifford",
        2,
        4,
        Ambient::Sphere { radius: 1.0 },
        domain,
        |u| {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                r * u[0].cos(),
                r * u[0].sin(),
                r * u[1].cos(),
                r * u[1].sin(),
            ]
        },
    )
}

/// Unit sphere in `R³`, polar coordinates.
pub fn round_sphere_map() -> Result<ImmersionSpec> {
    let domain = Domain::new(vec![0.15, 0.0], vec![PI - 0.15, 2.0 * PI])?;
    ImmersionSpec::new("sphere", 2, 3, Ambient::Euclidean, domain, |u| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        vec![st * cp, st * sp, ct]
    })
}

/// Graph `(x, y, f(x, y))` in `R³` over `[−half, half]²`.
pub fn graph(
    half: f64,
    f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> Result<ImmersionSpec> {
    let domain = Domain::new(vec![-half; 2], vec![half; 2])?;
    ImmersionSpec::new("graph", 2, 3, Ambient::Euclidean, domain, move |u| {
        vec![u[0], u[1], f(u[0], u[1])]
    })
}
