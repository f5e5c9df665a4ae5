//! Sectional-curvature pinching constants and pointwise verdicts.
//!
//! Thresholds are exact rationals in the codimension; those that scale with
//! the ambient curvature (`c`, or `c + H²` with a mean direction) are returned
//! as the rational coefficient and multiplied in by the `threshold_*` wrappers.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    align_mean_frame, gram_diagonalize, invariants, kmin_bracket, FundamentalData, KminBracket,
    DEFAULT_KMIN_STARTS,
};
use crate::ddvv::{self, DETECT_TOL};
use crate::error::{GeometryError, Result};
use crate::simons::sgn_int;
use crate::symmat::{commutes, sorted_eigen, MatrixTuple};

pub const DEFAULT_TOL: f64 = 1e-8;

pub type Rational = Ratio<i64>;

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(GeometryError::OutOfRange(what.into()))
    }
}

/// `(p−1)/(2p−1)`.
pub fn yau_exact(p: usize) -> Result<Rational> {
    require(p >= 1, "p must be at least 1")?;
    let p = p as i64;
    Ok(Ratio::new(p - 1, 2 * p - 1))
}

/// `n/(2(n+1))`.
pub fn itoh_exact(n: usize) -> Result<Rational> {
    require(n >= 2, "n must be at least 2")?;
    let n = n as i64;
    Ok(Ratio::new(n, 2 * (n + 1)))
}

/// `sgn(p−1) p / (2(p+1))`.
pub fn thm1_exact(p: usize) -> Result<Rational> {
    require(p >= 1, "p must be at least 1")?;
    let p = p as i64;
    Ok(Ratio::new(sgn_int(p - 1) * p, 2 * (p + 1)))
}

/// `sgn(p−2)(p−1)/(2p)`, the coefficient of `c + H²`.
pub fn thm2_coefficient_exact(p: usize) -> Result<Rational> {
    require(p >= 1, "p must be at least 1")?;
    let p = p as i64;
    Ok(Ratio::new(sgn_int(p - 2) * (p - 1), 2 * p))
}

/// `k(m, n) = min{sgn(m−1) m, n}`.
pub fn k_mn(m: usize, n: usize) -> Result<usize> {
    require(m >= 1, "m must be at least 1")?;
    require(n >= 2, "n must be at least 2")?;
    Ok(if m == 1 { 0 } else { m.min(n) })
}

/// `k/(2(k+1))` with `k = k(p, n)` when `minimal`, else `k(p−1, n)`.
pub fn generalized_coefficient_exact(p: usize, n: usize, minimal: bool) -> Result<Rational> {
    let m = if minimal { p } else { p.saturating_sub(1) };
    let k = k_mn(m, n)? as i64;
    Ok(Ratio::new(k, 2 * (k + 1)))
}

fn ambient(c: f64, h: f64) -> Result<f64> {
    let a = c + h * h;
    if a > 0.0 {
        Ok(a)
    } else {
        Err(GeometryError::Hypothesis(format!(
            "c + H² > 0 fails (c + H² = {a})"
        )))
    }
}

pub fn threshold_yau(p: usize) -> Result<f64> {
    yau_exact(p).map(to_f64)
}

pub fn threshold_itoh(n: usize) -> Result<f64> {
    itoh_exact(n).map(to_f64)
}

pub fn threshold_thm1(p: usize) -> Result<f64> {
    thm1_exact(p).map(to_f64)
}

pub fn threshold_thm2(p: usize, c: f64, h: f64) -> Result<f64> {
    let a = ambient(c, h)?;
    Ok(to_f64(thm2_coefficient_exact(p)?) * a)
}

/// Case (i) at `H = 0` scales by `c`, case (ii) by `c + H²`.
pub fn threshold_generalized(p: usize, n: usize, c: f64, h: f64) -> Result<f64> {
    let a = ambient(c, h)?;
    Ok(to_f64(generalized_coefficient_exact(p, n, h == 0.0)?) * a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    YauA,
    Itoh,
    Thm1,
    Thm2,
    Generalized,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::YauA,
        Theorem::Itoh,
        Theorem::Thm1,
        Theorem::Thm2,
        Theorem::Generalized,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::YauA => "yau-a",
            Theorem::Itoh => "itoh",
            Theorem::Thm1 => "thm1",
            Theorem::Thm2 => "thm2",
            Theorem::Generalized => "generalized",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s) || format!("{t:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| GeometryError::UnknownName(format!("unknown theorem {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PinchStatus {
    Strict,
    Boundary,
    Fails,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelLabel {
    TotallyGeodesic,
    ProductOfSpheres,
    Veronese,
    UmbilicalSphere,
    Undetermined,
}

/// Pointwise predicates recorded alongside a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Note {
    Minimal,
    /// Mean-direction form is `H·I`.
    PseudoUmbilical,
    /// Mean-direction form commutes with every other form.
    Commuting,
    DdvvEquality,
    /// Codimension at most two with a mean direction: the threshold is zero
    /// and the conclusion comes from the hypersurface classification.
    HypersurfaceBranch,
    /// `S_I = (2n/3)(c + H²)` at `p = 3`.
    VeroneseFingerprint,
    /// Boundary of the generalized constant beyond surfaces; the higher
    /// Veronese submanifolds are not modelled.
    HigherVeroneseDeferred,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinchVerdict {
    pub theorem: Theorem,
    pub threshold: f64,
    pub kmin_bracket: KminBracket,
    pub status: PinchStatus,
    pub label: ModelLabel,
    pub notes: Vec<Note>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictOptions {
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions {
            tol: DEFAULT_TOL,
            starts: DEFAULT_KMIN_STARTS,
            seed: 0,
        }
    }
}

/// Strict above `thr + tol`, fails below `thr − tol`, boundary when the
/// whole bracket sits within `tol` of `thr`.
pub fn classify(bracket: &KminBracket, threshold: f64, tol: f64) -> PinchStatus {
    if bracket.lo > threshold + tol {
        PinchStatus::Strict
    } else if bracket.hi < threshold - tol {
        PinchStatus::Fails
    } else if (bracket.lo - threshold).abs() <= tol && (bracket.hi - threshold).abs() <= tol {
        PinchStatus::Boundary
    } else {
        PinchStatus::Indeterminate
    }
}

pub fn is_minimal(data: &FundamentalData, tol: f64) -> bool {
    data.traces().iter().all(|t| t.abs() <= tol * data.scale())
}

/// Number of Gram eigenvalues above `tol`.
fn effective_codimension(t: &MatrixTuple, tol: f64) -> usize {
    if t.is_empty() {
        return 0;
    }
    sorted_eigen(&t.gram())
        .0
        .iter()
        .filter(|&&l| l > tol)
        .count()
}

/// `p_eff = 1`, two distinct principal curvatures with `λμ = −ambient`.
fn is_product_of_spheres(t: &MatrixTuple, ambient: f64, tol: f64) -> bool {
    if effective_codimension(t, tol) != 1 {
        return false;
    }
    let (_, vectors) = sorted_eigen(&t.gram());
    let n = t.dim();
    let mut lead = nalgebra::DMatrix::zeros(n, n);
    for (b, m) in t.iter().enumerate() {
        lead += m.as_matrix() * vectors[(b, 0)];
    }
    let (eig, _) = sorted_eigen(&lead);
    let gap = tol.sqrt().max(tol);
    let mut clusters: Vec<f64> = Vec::new();
    for &l in &eig {
        match clusters.last() {
            Some(&prev) if (prev - l).abs() <= gap => {}
            _ => clusters.push(l),
        }
    }
    matches!(clusters[..], [l, m] if (l * m + ambient).abs() <= gap)
}

pub fn verdict(
    data: &FundamentalData,
    theorem: Theorem,
    opts: &VerdictOptions,
) -> Result<PinchVerdict> {
    let tol = opts.tol;
    let n = data.n();
    let p = data.p();
    let c = data.c();
    require(n >= 2, "sectional curvature needs n >= 2")?;
    let minimal = is_minimal(data, tol);

    // frame with a distinguished mean slot whenever the data is not minimal
    let framed = match (minimal, data.mean_index()) {
        (true, _) => data
            .clone()
            .with_mean_index(None)
            .unwrap_or_else(|_| align_mean_frame(data)),
        (false, Some(_)) => data.clone(),
        (false, None) => align_mean_frame(data),
    };
    let h = framed.mean_curvature();

    let uses_mean = match theorem {
        Theorem::YauA | Theorem::Itoh | Theorem::Thm1 => {
            if !minimal {
                return Err(GeometryError::Hypothesis(format!(
                    "{} requires minimal data (H = {h:e})",
                    theorem.name()
                )));
            }
            if !(c > 0.0) {
                return Err(GeometryError::Hypothesis(format!(
                    "{} requires a spherical ambient space (c = {c})",
                    theorem.name()
                )));
            }
            false
        }
        Theorem::Thm2 => {
            if minimal || h <= tol {
                return Err(GeometryError::Hypothesis(format!(
                    "thm2 requires nonzero mean curvature (H = {h:e})"
                )));
            }
            true
        }
        Theorem::Generalized => !minimal,
    };

    let amb = if uses_mean { ambient(c, h)? } else { c };
    if !(amb > 0.0) {
        return Err(GeometryError::Hypothesis(format!(
            "ambient curvature {amb} must be positive"
        )));
    }
    let threshold = match theorem {
        Theorem::YauA => to_f64(yau_exact(p)?) * c,
        Theorem::Itoh => to_f64(itoh_exact(n)?) * c,
        Theorem::Thm1 => to_f64(thm1_exact(p)?) * c,
        Theorem::Thm2 => to_f64(thm2_coefficient_exact(p)?) * amb,
        Theorem::Generalized => {
            if uses_mean && p < 2 {
                return Err(GeometryError::Hypothesis(
                    "generalized case (ii) needs codimension at least 2".into(),
                ));
            }
            to_f64(generalized_coefficient_exact(p, n, !uses_mean)?) * amb
        }
    };

    let bracket = kmin_bracket(&framed, opts.starts, opts.seed)?;
    let status = classify(&bracket, threshold, tol);

    let inv = invariants(&framed);
    let rest = framed.subtuple(&framed.non_mean_labels());
    let flat = framed.scale().powi(2);
    let mut notes = Vec::new();
    if minimal {
        notes.push(Note::Minimal);
    }
    if let Some(m) = framed.mean_index() {
        let hm = framed.form(m);
        let umbilic = crate::symmat::SymMatrix::scalar(n, h);
        let dev = (hm.as_matrix() - umbilic.as_matrix()).amax();
        if dev <= tol * framed.scale() {
            notes.push(Note::PseudoUmbilical);
        }
        if framed
            .non_mean_labels()
            .iter()
            .all(|&a| commutes(hm, framed.form(a), tol * flat))
        {
            notes.push(Note::Commuting);
        }
    }
    let ddvv_tol = tol.max(DETECT_TOL);
    let ddvv_equal = ddvv::detect_equality(&rest, ddvv_tol).is_some();
    if ddvv_equal {
        notes.push(Note::DdvvEquality);
    }
    if theorem == Theorem::Thm2 && p <= 2 {
        notes.push(Note::HypersurfaceBranch);
    }
    let s_i = inv.s_i.unwrap_or(inv.s);
    if uses_mean && p == 3 {
        let fingerprint = 2.0 * n as f64 / 3.0 * amb;
        if (s_i - fingerprint).abs() <= tol * fingerprint.max(1.0) {
            notes.push(Note::VeroneseFingerprint);
        }
    }

    let label = match status {
        PinchStatus::Strict | PinchStatus::Boundary => {
            let p_eff = effective_codimension(
                &gram_diagonalize(&framed, None)?.subtuple(&framed.non_mean_labels()),
                tol,
            );
            if s_i <= tol {
                if uses_mean {
                    ModelLabel::UmbilicalSphere
                } else {
                    ModelLabel::TotallyGeodesic
                }
            } else if status == PinchStatus::Strict {
                ModelLabel::Undetermined
            } else if ddvv_equal && n == 2 && p_eff == 2 && bracket.width() <= 2.0 * tol {
                ModelLabel::Veronese
            } else if is_product_of_spheres(&rest, amb, tol) {
                ModelLabel::ProductOfSpheres
            } else {
                if theorem == Theorem::Generalized && n > 2 {
                    notes.push(Note::HigherVeroneseDeferred);
                }
                ModelLabel::Undetermined
            }
        }
        PinchStatus::Fails | PinchStatus::Indeterminate => ModelLabel::Undetermined,
    };

    Ok(PinchVerdict {
        theorem,
        threshold,
        kmin_bracket: bracket,
        status,
        label,
        notes,
    })
}

/// Thm1 for minimal data, Thm2 otherwise.
pub fn default_theorem(data: &FundamentalData, tol: f64) -> Theorem {
    if is_minimal(data, tol) {
        Theorem::Thm1
    } else {
        Theorem::Thm2
    }
}
