use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use rigidity_core::curvature::{self, align_mean_frame};
use rigidity_core::ddvv;
use rigidity_core::pinching::{self, is_minimal, PinchStatus, VerdictOptions};
use rigidity_core::rng::derive_seed;
use rigidity_core::{
    DdvvReport, FundamentalData, KminBracket, PinchVerdict, ScalarInvariants, Theorem,
};

use crate::error::code;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    pub unix_time: f64,
}

/// One checked input. `timing` is null under `--no-timestamp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub input: String,
    pub invariants: ScalarInvariants,
    pub kmin_bracket: KminBracket,
    pub ddvv: DdvvReport,
    pub verdicts: Vec<PinchVerdict>,
    pub errors: Vec<String>,
    pub timing: Option<Timing>,
}

#[derive(Clone, Debug)]
pub struct CheckSettings {
    /// Empty means the default theorem for each input.
    pub theorems: Vec<Theorem>,
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
    pub timestamp: bool,
}

/// Rejections of a requested theorem's hypotheses are recorded in `errors`
/// rather than aborting the batch.
pub fn check_record(
    input: String,
    data: &FundamentalData,
    index: usize,
    settings: &CheckSettings,
) -> rigidity_core::Result<ReportRecord> {
    let start = Instant::now();
    let seed = derive_seed(settings.seed, index as u64);
    let framed = if is_minimal(data, settings.tol) || data.mean_index().is_some() {
        data.clone()
    } else {
        align_mean_frame(data)
    };
    let invariants = curvature::invariants(&framed);
    let kmin_bracket = curvature::kmin_bracket(&framed, settings.starts, seed)?;
    let ddvv = ddvv::evaluate(&framed.subtuple(&framed.non_mean_labels()));

    let theorems = if settings.theorems.is_empty() {
        vec![pinching::default_theorem(data, settings.tol)]
    } else {
        settings.theorems.clone()
    };
    let opts = VerdictOptions {
        tol: settings.tol,
        starts: settings.starts,
        seed,
    };
    let mut verdicts = Vec::new();
    let mut errors = Vec::new();
    for t in theorems {
        match pinching::verdict(data, t, &opts) {
            Ok(v) => verdicts.push(v),
            Err(e) => errors.push(format!("{}: {e}", t.name())),
        }
    }
    let timing = settings.timestamp.then(|| Timing {
        elapsed_seconds: start.elapsed().as_secs_f64(),
        unix_time: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0.0, |d| d.as_secs_f64()),
    });
    Ok(ReportRecord {
        input,
        invariants,
        kmin_bracket,
        ddvv,
        verdicts,
        errors,
        timing,
    })
}

/// Worst verdict over the batch: a hypothesis error outranks indeterminate,
/// which outranks fails.
pub fn exit_code(records: &[ReportRecord]) -> i32 {
    let mut worst = code::OK;
    for r in records {
        if !r.errors.is_empty() {
            worst = worst.max(code::INVALID);
        }
        for v in &r.verdicts {
            let c = match v.status {
                PinchStatus::Strict | PinchStatus::Boundary => code::OK,
                PinchStatus::Fails => code::FAILS,
                PinchStatus::Indeterminate => code::INDETERMINATE,
            };
            worst = worst.max(c);
        }
    }
    worst
}
