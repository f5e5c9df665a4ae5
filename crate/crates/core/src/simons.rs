//! Pointwise skeleton of the Simons-type estimate with Yau's free parameter.
//!
//! The Laplacian `Σ h^α_ij Δh^α_ij` of a minimal (or parallel-mean)
//! submanifold splits into a curvature contraction `T_curv`, a normal
//! commutator term `N_comm`, a Gram term `G_sq` and, in the parallel-mean
//! case, a coupling `T_mixed` with the mean direction. Each piece is computed
//! here two ways: by raw tensor contraction against the Gauss-equation
//! curvature tensor and by trace formulas in the `H_α`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curvature::{resolve_restriction, riemann, CurvatureTensor, FundamentalData};
use crate::error::{GeometryError, Result};
use crate::symmat::{commutator_norm_sq, pairwise_sum, sorted_eigen, Matrix};

/// `sgn(0) = 0`, `sgn(x) = x/|x|` otherwise.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn sgn_int(x: i64) -> i64 {
    x.signum()
}

/// Which estimate is being assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCase {
    /// Minimal submanifold: all normal directions, ambient factor `c`.
    Minimal,
    /// Parallel mean curvature: directions other than the mean slot,
    /// ambient factor `c + H²`.
    ParallelMean,
}

/// `Σ_{i,j,k,m,α∈restrict} (h^α_ij h^α_km R_mijk + h^α_ij h^α_mi R_mkjk)` by
/// direct contraction.
pub fn curvature_contraction(
    data: &FundamentalData,
    tensor: &CurvatureTensor,
    restrict: &[usize],
) -> f64 {
    let n = data.n();
    // Σ_k R_mkjk is independent of α
    let mut ricci = Matrix::zeros(n, n);
    for m in 0..n {
        for j in 0..n {
            ricci[(m, j)] = (0..n).map(|k| tensor.get(m, k, j, k)).sum();
        }
    }
    let mut terms = Vec::with_capacity(restrict.len());
    for &alpha in restrict {
        let h = data.form(alpha);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let hij = h.get(i, j);
                if hij == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for m in 0..n {
                        acc += hij * h.get(k, m) * tensor.get(m, i, j, k);
                    }
                }
                for m in 0..n {
                    acc += hij * h.get(m, i) * ricci[(m, j)];
                }
            }
        }
        terms.push(acc);
    }
    pairwise_sum(&terms)
}

/// Pairwise trace data for `α ∈ restrict` against every `β`.
struct TraceTable {
    /// `tr(H_α H_β)`
    ab: Matrix,
    /// `tr(H_α² H_β)`
    aab: Matrix,
    /// `tr(H_α² H_β²)`
    aabb: Matrix,
    /// `tr((H_α H_β)²)`
    abab: Matrix,
    traces: Vec<f64>,
}

impl TraceTable {
    fn new(data: &FundamentalData, restrict: &[usize]) -> Self {
        let p = data.p();
        let r = restrict.len();
        let mut t = TraceTable {
            ab: Matrix::zeros(r, p),
            aab: Matrix::zeros(r, p),
            aabb: Matrix::zeros(r, p),
            abab: Matrix::zeros(r, p),
            traces: data.traces(),
        };
        let squares: Vec<Matrix> = data
            .forms()
            .iter()
            .map(|h| h.as_matrix() * h.as_matrix())
            .collect();
        for (row, &alpha) in restrict.iter().enumerate() {
            let ha = data.form(alpha).as_matrix();
            for beta in 0..p {
                let hb = data.form(beta).as_matrix();
                let prod = ha * hb;
                t.ab[(row, beta)] = prod.trace();
                t.aab[(row, beta)] = squares[alpha].component_mul(hb).sum();
                t.aabb[(row, beta)] = squares[alpha].component_mul(&squares[beta]).sum();
                // tr(XX) = Σ X_ij X_ji
                t.abab[(row, beta)] = prod.component_mul(&prod.transpose()).sum();
            }
        }
        t
    }
}

/// `Σ_{α,β∈restrict} [tr(H_α²H_β²) − tr((H_αH_β)²)]`.
fn commutator_trace_sum(table: &TraceTable, restrict: &[usize]) -> f64 {
    let mut terms = Vec::new();
    for row in 0..restrict.len() {
        for &beta in restrict {
            terms.push(table.aabb[(row, beta)] - table.abab[(row, beta)]);
        }
    }
    pairwise_sum(&terms)
}

/// Right-hand side of the Gauss-equation expansion of `T_curv`:
///
/// `c(nS̃ − Σ_α (tr H_α)²) + Σ_{α,β} tr H_β · tr(H_α²H_β) − Σ_{α,β} [tr(H_αH_β)]²
///  − Σ_{α,β∈restrict} [tr(H_α²H_β²) − tr((H_αH_β)²)]`
///
/// with `α ∈ restrict` and `β` over all slots in the middle sums. The
/// `(tr H_α)²` term vanishes on minimal and mean-aligned data. When the
/// restriction omits slots, the expansion is exact only if those slots commute
/// with every restricted `H_α`.
pub fn gauss_expansion_rhs(data: &FundamentalData, restrict: &[usize]) -> f64 {
    let table = TraceTable::new(data, restrict);
    let n = data.n() as f64;
    let p = data.p();
    let mut terms = Vec::new();
    for (row, &alpha) in restrict.iter().enumerate() {
        let h = data.form(alpha);
        terms.push(data.c() * (n * h.frob_norm_sq() - h.trace().powi(2)));
        for beta in 0..p {
            terms.push(table.traces[beta] * table.aab[(row, beta)]);
            terms.push(-table.ab[(row, beta)].powi(2));
        }
    }
    terms.push(-commutator_trace_sum(&table, restrict));
    pairwise_sum(&terms)
}

/// `|T_curv − gauss_expansion_rhs|` over the restriction (default: every
/// non-mean slot).
pub fn gauss_expansion_check(data: &FundamentalData, restrict: Option<&[usize]>) -> Result<f64> {
    let labels = resolve_restriction(data, restrict)?;
    let tensor = riemann(data);
    let direct = curvature_contraction(data, &tensor, &labels);
    Ok((direct - gauss_expansion_rhs(data, &labels)).abs())
}

/// `(N_comm, ddvv_bound)` where
/// `N_comm = Σ_{α,β∈restrict} [tr(H_α²H_β²) − tr((H_αH_β)²)]` and
/// `ddvv_bound = ½ sgn(m−1) (Σ_α tr H_α²)²`, `m = |restrict|`.
pub fn commutator_trace_identity(
    data: &FundamentalData,
    restrict: Option<&[usize]>,
) -> Result<(f64, f64)> {
    let labels = resolve_restriction(data, restrict)?;
    let table = TraceTable::new(data, &labels);
    let n_comm = commutator_trace_sum(&table, &labels);
    let s: f64 = pairwise_sum(
        &labels
            .iter()
            .map(|&a| data.form(a).frob_norm_sq())
            .collect::<Vec<_>>(),
    );
    let m = labels.len() as f64;
    Ok((n_comm, 0.5 * sgn(m - 1.0) * s * s))
}

/// The separate terms of the Laplacian expansion on one restriction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub t_curv: f64,
    /// `½ Σ_{α,β∈restriction} ‖[H_α, H_β]‖²`.
    pub n_comm: f64,
    /// `Σ_{α∈restriction} (tr H_α²)²`.
    pub g_sq: f64,
    /// Coupling with the mean slot; present iff a mean slot is set.
    pub t_mixed: Option<f64>,
    /// `S̃ = Σ_{α∈restriction} tr H_α²`.
    pub s_restricted: f64,
    pub restriction: Vec<usize>,
}

pub fn contraction_report(
    data: &FundamentalData,
    restrict: Option<&[usize]>,
) -> Result<ContractionReport> {
    let labels = resolve_restriction(data, restrict)?;
    let tensor = riemann(data);
    let t_curv = curvature_contraction(data, &tensor, &labels);
    let mut comm = Vec::new();
    for &a in &labels {
        for &b in &labels {
            if a != b {
                comm.push(0.5 * commutator_norm_sq(data.form(a), data.form(b))?);
            }
        }
    }
    let norms: Vec<f64> = labels
        .iter()
        .map(|&a| data.form(a).frob_norm_sq())
        .collect();
    let t_mixed = match data.mean_index() {
        Some(_) => Some(mean_coupling(data)?),
        None => None,
    };
    Ok(ContractionReport {
        t_curv,
        n_comm: pairwise_sum(&comm),
        g_sq: pairwise_sum(&norms.iter().map(|x| x * x).collect::<Vec<_>>()),
        t_mixed,
        s_restricted: pairwise_sum(&norms),
        restriction: labels,
    })
}

/// `Σ_{α≠mean} tr(H_α² H_mean) · tr H_mean − Σ_{α≠mean} [tr(H_α H_mean)]²`.
/// Equals `nH² S_I` on pseudo-umbilical data.
pub fn mean_coupling(data: &FundamentalData) -> Result<f64> {
    let mean = data
        .mean_index()
        .ok_or_else(|| GeometryError::Hypothesis("mean_coupling requires a mean slot".into()))?;
    let hm = data.form(mean).as_matrix();
    let tr_m = hm.trace();
    let mut terms = Vec::new();
    for a in data.non_mean_labels() {
        let ha = data.form(a).as_matrix();
        let sq = ha * ha;
        terms.push(sq.component_mul(hm).sum() * tr_m);
        terms.push(-ha.component_mul(hm).sum().powi(2));
    }
    Ok(pairwise_sum(&terms))
}

/// Coefficient of the squared-norm term in the lower bound.
///
/// Minimal: `a/p + sgn(p−1)(a−1)/2`. Parallel mean with `p_eff = p − 1`:
/// `a/p_eff + (a−1)/2`.
pub fn s2_coefficient(a: f64, p_eff: usize, case: BoundCase) -> f64 {
    let p = p_eff as f64;
    match case {
        BoundCase::Minimal => a / p + sgn(p - 1.0) * (a - 1.0) / 2.0,
        BoundCase::ParallelMean => a / p + (a - 1.0) / 2.0,
    }
}

fn check_parameter(a: f64) -> Result<()> {
    if (0.0..1.0).contains(&a) {
        Ok(())
    } else {
        Err(GeometryError::OutOfRange(format!(
            "parameter a = {a} must lie in [0, 1)"
        )))
    }
}

fn bound_inputs(data: &FundamentalData, case: BoundCase) -> Result<(Vec<usize>, f64, usize)> {
    match case {
        BoundCase::Minimal => Ok((data.all_labels(), data.c(), data.p())),
        BoundCase::ParallelMean => {
            if data.mean_index().is_none() {
                return Err(GeometryError::Hypothesis(
                    "parallel-mean bound requires a mean slot".into(),
                ));
            }
            if data.p() < 2 {
                return Err(GeometryError::Hypothesis(
                    "parallel-mean bound requires p >= 2".into(),
                ));
            }
            let h = data.mean_curvature();
            Ok((data.non_mean_labels(), data.c() + h * h, data.p() - 1))
        }
    }
}

/// Closed-form lower bound `Φ(a)` for `Σ h Δh` given `kmin ≤ K_min`.
///
/// Minimal: `−ancS + (1+a)n·kmin·S + [a/p + sgn(p−1)(a−1)/2] S²`.
/// Parallel mean: `(1+a)n·kmin·S_I + (a/(p−1) + (a−1)/2) S_I² − an(c+H²)S_I`.
/// The covariant-derivative term is omitted.
pub fn laplacian_bound(data: &FundamentalData, a: f64, kmin: f64, case: BoundCase) -> Result<f64> {
    check_parameter(a)?;
    let (labels, ambient, p_eff) = bound_inputs(data, case)?;
    let s: f64 = labels.iter().map(|&l| data.form(l).frob_norm_sq()).sum();
    let n = data.n() as f64;
    Ok(-a * n * ambient * s + (1.0 + a) * n * kmin * s + s2_coefficient(a, p_eff, case) * s * s)
}

/// The exact pointwise expression the bound estimates:
/// `−a n c S̃ + (1+a)T_curv + (a−1)N_comm + a·G_sq [− a·T_mixed]`.
///
/// In a Gram-diagonal frame on minimal data this equals `T_curv − N_comm`
/// for every `a`.
pub fn laplacian_surrogate(
    data: &FundamentalData,
    report: &ContractionReport,
    a: f64,
    case: BoundCase,
) -> f64 {
    let n = data.n() as f64;
    let base = -a * n * data.c() * report.s_restricted
        + (1.0 + a) * report.t_curv
        + (a - 1.0) * report.n_comm
        + a * report.g_sq;
    match case {
        BoundCase::Minimal => base,
        BoundCase::ParallelMean => base - a * report.t_mixed.unwrap_or(0.0),
    }
}

/// Parameter `a*` that cancels the squared-norm coefficient, and the induced
/// pinching threshold `a*/(1+a*)` (times the ambient factor).
pub fn optimal_parameter(p_eff: usize, case: BoundCase) -> Result<(f64, f64)> {
    let (a, t) = optimal_parameter_exact(p_eff, case)?;
    let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    Ok((f(a), f(t)))
}

/// Rational form of [`optimal_parameter`].
pub fn optimal_parameter_exact(p_eff: usize, case: BoundCase) -> Result<(Ratio<i64>, Ratio<i64>)> {
    if p_eff == 0 {
        return Err(GeometryError::OutOfRange(
            "effective codimension must be at least 1".into(),
        ));
    }
    let p = p_eff as i64;
    let a = match case {
        BoundCase::Minimal => Ratio::new(sgn_int(p - 1) * p, p + 2),
        BoundCase::ParallelMean => Ratio::new(p, p + 2),
    };
    let one = Ratio::from_integer(1);
    Ok((a, a / (one + a)))
}

/// Exact rational S²-coefficient, for checking that `a*` cancels it.
pub fn s2_coefficient_exact(a: Ratio<i64>, p_eff: usize, case: BoundCase) -> Ratio<i64> {
    let p = p_eff as i64;
    let half = Ratio::new(1, 2);
    let one = Ratio::from_integer(1);
    match case {
        BoundCase::Minimal => a / p + half * sgn_int(p - 1) * (a - one),
        BoundCase::ParallelMean => a / p + half * (a - one),
    }
}

/// `½ Σ_{i,j} (λ_i − λ_j)² K(e_i, e_j)` in the eigenframe `{e_i}` of `H_α`;
/// equals the single-`α` curvature contraction.
pub fn rayleigh_form(tensor: &CurvatureTensor, data: &FundamentalData, alpha: usize) -> f64 {
    let (lambda, frame) = sorted_eigen(data.form(alpha).as_matrix());
    let n = data.n();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|i| frame.column(i).iter().copied().collect())
        .collect();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let k = tensor.quadratic(&cols[i], &cols[j]);
                terms.push(0.5 * (lambda[i] - lambda[j]).powi(2) * k);
            }
        }
    }
    pairwise_sum(&terms)
}
