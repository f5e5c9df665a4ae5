use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rigidity_core::immersion::{self, DiffOptions};
use rigidity_core::models::{ModelKind, ModelSpec};
use rigidity_core::pinching::{self, to_f64, Rational};
use rigidity_core::rng::rng_for;
use rigidity_core::{ddvv, json as rjson, FundamentalData, MatrixTuple, PointSample, Theorem};

use crate::cli::{CheckArgs, DdvvArgs, ImmersionArgs, ModelArgs, ModelKindArg, PinchArgs};
use crate::error::{code, CliError, CliResult};
use crate::report::{check_record, exit_code, CheckSettings, ReportRecord};

pub struct Globals {
    pub seed: u64,
    pub timestamp: bool,
}

fn emit_text(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn emit_json<T: Serialize + ?Sized>(output: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text = rjson::to_string(value);
    text.push('\n');
    emit_text(output, &text)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(&path.display().to_string(), e))
}

fn invalid_at(id: &str, e: serde_json::Error) -> CliError {
    CliError::invalid(format!("{id}: {e}"))
}

/// A point sample is recognized by its `data` field.
fn value_to_data(id: &str, v: Value) -> CliResult<FundamentalData> {
    if v.get("data").is_some() {
        let sample: PointSample = serde_json::from_value(v).map_err(|e| invalid_at(id, e))?;
        Ok(sample.data)
    } else {
        serde_json::from_value(v).map_err(|e| invalid_at(id, e))
    }
}

pub fn load_inputs(path: &Path) -> CliResult<Vec<(String, FundamentalData)>> {
    let name = path.display().to_string();
    match read_json(path)? {
        Value::Array(items) => items
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let id = format!("{name}#{i}");
                value_to_data(&id, v).map(|d| (id, d))
            })
            .collect(),
        v => Ok(vec![(name.clone(), value_to_data(&name, v)?)]),
    }
}

pub fn check(args: &CheckArgs, g: &Globals) -> CliResult<i32> {
    let mut inputs = Vec::new();
    for path in &args.inputs {
        inputs.extend(load_inputs(path)?);
    }
    let settings = CheckSettings {
        theorems: args.theorems.iter().map(|&t| t.into()).collect(),
        tol: args.tol,
        starts: args.starts,
        seed: g.seed,
        timestamp: g.timestamp,
    };
    let records: Vec<ReportRecord> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, (id, data))| check_record(id.clone(), data, i, &settings))
        .collect::<rigidity_core::Result<_>>()?;
    emit_json(args.output.as_deref(), &records)?;
    for r in &records {
        for e in &r.errors {
            eprintln!("rigidity: {}: {e}", r.input);
        }
    }
    Ok(exit_code(&records))
}

fn dims(v: &[usize]) -> (usize, usize, usize) {
    (v[0], v[1], v[2])
}

pub fn ddvv_cmd(args: &DdvvArgs, g: &Globals) -> CliResult<i32> {
    let out = args.output.as_deref();
    if let Some(v) = &args.mode.random {
        let (n, m, trials) = dims(v);
        if n == 0 {
            return Err(CliError::invalid("n must be at least 1"));
        }
        let (max_ratio, argmax, total) = (0..trials)
            .into_par_iter()
            .map(|i| {
                let t = ddvv::random_tuple_with(&mut rng_for(g.seed, i as u64), n, m);
                let r = ddvv::ratio(&t);
                (r, i, r)
            })
            .reduce(
                || (f64::NEG_INFINITY, usize::MAX, 0.0),
                |a, b| {
                    let best = if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    };
                    (best.0, best.1, a.2 + b.2)
                },
            );
        let (max_ratio, argmax) = if trials == 0 {
            (0.0, None)
        } else {
            (max_ratio, Some(argmax))
        };
        let mean_ratio = if trials == 0 {
            0.0
        } else {
            total / trials as f64
        };
        emit_json(
            out,
            &json!({
                "mode": "random",
                "n": n,
                "p": m,
                "trials": trials,
                "seed": g.seed,
                "max_ratio": max_ratio,
                "argmax_trial": argmax,
                "mean_ratio": mean_ratio,
            }),
        )?;
    } else if let Some(v) = &args.mode.maximize {
        let (n, m, starts) = dims(v);
        let outcome = ddvv::maximize_ratio(n, m, g.seed, starts, args.iters)?;
        let structure = ddvv::detect_equality(&outcome.best, args.detect_tol);
        emit_json(
            out,
            &json!({
                "mode": "maximize",
                "n": n,
                "p": m,
                "starts": starts,
                "iters": args.iters,
                "seed": g.seed,
                "ratio": outcome.ratio,
                "best_start": outcome.start,
                "accepted_steps": outcome.trace.len().saturating_sub(1),
                "extremal_structure": structure,
                "best": outcome.best,
            }),
        )?;
    } else if let Some(path) = &args.mode.input {
        let name = path.display().to_string();
        let tuple = match read_json(path)? {
            v @ Value::Array(_) => {
                serde_json::from_value::<MatrixTuple>(v).map_err(|e| invalid_at(&name, e))?
            }
            v => {
                let d = value_to_data(&name, v)?;
                d.subtuple(&d.non_mean_labels())
            }
        };
        emit_json(out, &ddvv::evaluate(&tuple))?;
    }
    Ok(code::OK)
}

pub fn model(args: &ModelArgs) -> CliResult<i32> {
    let kind = match args.kind {
        ModelKindArg::TotallyGeodesic => ModelKind::TotallyGeodesic,
        ModelKindArg::ProductOfSpheres => ModelKind::ProductOfSpheres { k: args.k },
        ModelKindArg::Veronese => ModelKind::Veronese,
        ModelKindArg::UmbilicalSphere => ModelKind::UmbilicalSphere,
        ModelKindArg::PseudoUmbilicalExtension => ModelKind::PseudoUmbilicalExtension { k: args.k },
    };
    let spec = ModelSpec {
        kind,
        n: args.n,
        p: args.p,
        c: args.c,
        h: args.h,
    };
    emit_json(args.output.as_deref(), &spec.build()?)?;
    Ok(code::OK)
}

pub fn immersion_cmd(args: &ImmersionArgs) -> CliResult<i32> {
    let spec = immersion::builtin(&args.builtin)?;
    let opts = DiffOptions {
        step: args.step,
        richardson: args.richardson,
    };
    let samples = immersion::sample_grid(&spec, args.grid, &opts)?;
    emit_json(args.output.as_deref(), &samples)?;
    Ok(code::OK)
}

fn cell(r: Option<Rational>, exact: bool) -> String {
    match (r, exact) {
        (None, _) => String::new(),
        (Some(r), true) => r.to_string(),
        (Some(r), false) => to_f64(r).to_string(),
    }
}

/// CSV threshold table; columns scaled by the ambient factor are given at
/// `c = 1` and `c + H² = 1`.
pub fn pinch_table(pmax: usize, nmax: usize, exact: bool) -> CliResult<String> {
    if pmax < 1 || nmax < 2 {
        return Err(CliError::invalid("table needs PMAX >= 1 and NMAX >= 2"));
    }
    let mut out = String::from("p,n,yau,itoh,thm1,thm2,generalized_i,generalized_ii\n");
    for p in 1..=pmax {
        for n in 2..=nmax {
            let ii = (p >= 2)
                .then(|| pinching::generalized_coefficient_exact(p, n, false))
                .transpose()?;
            let row = [
                cell(Some(pinching::yau_exact(p)?), exact),
                cell(Some(pinching::itoh_exact(n)?), exact),
                cell(Some(pinching::thm1_exact(p)?), exact),
                cell(Some(pinching::thm2_coefficient_exact(p)?), exact),
                cell(
                    Some(pinching::generalized_coefficient_exact(p, n, true)?),
                    exact,
                ),
                cell(ii, exact),
            ];
            out.push_str(&format!("{p},{n},{}\n", row.join(",")));
        }
    }
    Ok(out)
}

pub fn pinch(args: &PinchArgs) -> CliResult<i32> {
    let out = args.output.as_deref();
    if let Some(v) = &args.table {
        emit_text(out, &pinch_table(v[0], v[1], args.exact)?)?;
        return Ok(code::OK);
    }
    let (Some(t), Some(p)) = (args.theorem, args.p) else {
        return Err(CliError::usage(
            "pinch needs --table PMAX NMAX or --theorem T --p P",
        ));
    };
    // with --exact the ambient-scaled constants print their rational coefficient
    let (exact, value) = match Theorem::from(t) {
        Theorem::YauA => (pinching::yau_exact(p)?, pinching::threshold_yau(p)?),
        Theorem::Itoh => (
            pinching::itoh_exact(args.n)?,
            pinching::threshold_itoh(args.n)?,
        ),
        Theorem::Thm1 => (pinching::thm1_exact(p)?, pinching::threshold_thm1(p)?),
        Theorem::Thm2 => (
            pinching::thm2_coefficient_exact(p)?,
            pinching::threshold_thm2(p, args.c, args.h)?,
        ),
        Theorem::Generalized => (
            pinching::generalized_coefficient_exact(p, args.n, args.h == 0.0)?,
            pinching::threshold_generalized(p, args.n, args.c, args.h)?,
        ),
    };
    let text = if args.exact {
        exact.to_string()
    } else {
        value.to_string()
    };
    emit_text(out, &format!("{text}\n"))?;
    Ok(code::OK)
}
