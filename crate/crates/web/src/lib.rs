//! Browser bindings. Every export takes plain strings and numbers and
//! returns a JSON document; failures come back as `{"error": "..."}`.

use ipslq_core::arith::{PrecisionContext, Real};
use ipslq_core::ipslq::{ipslq_observed, StageTrace};
use ipslq_core::minpoly::{minpoly, MinPolyOptions, MinPolyOutcome, MinPolyRequest};
use ipslq_core::pslq::{default_gamma, pslq_observed, Outcome, RelationOutcome};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

// keeps a stray click from freezing the tab
const MAX_DIGITS: u32 = 2000;
const MAX_LEN: usize = 24;

fn context(digits: u32) -> Result<PrecisionContext, String> {
    if digits > MAX_DIGITS {
        return Err(format!("at most {MAX_DIGITS} digits in the browser"));
    }
    PrecisionContext::new(digits, 0).map_err(|e| e.to_string())
}

fn parse_vector(input: &str, ctx: &PrecisionContext) -> Result<Vec<Real>, String> {
    let x = input
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| ctx.parse(s).map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if x.len() > MAX_LEN {
        return Err(format!("at most {MAX_LEN} entries"));
    }
    Ok(x)
}

fn parse_bound(text: &str, ctx: &PrecisionContext) -> Result<Real, String> {
    let m = ctx.parse(text.trim()).map_err(|e| e.to_string())?;
    if m.is_zero() || m.is_negative() {
        return Err("the norm bound must be positive".into());
    }
    Ok(m)
}

fn stages(trace: &StageTrace) -> Value {
    trace
        .records()
        .iter()
        .map(|r| {
            json!({
                "window_start": r.window_start,
                "suffix_len": r.suffix_len,
                "iterations": r.iterations,
                "swaps": r.swaps,
                "outcome": format!("{:?}", r.outcome).to_lowercase(),
            })
        })
        .collect()
}

fn outcome_json(run: &RelationOutcome) -> Value {
    let mut v = json!({
        "iterations": run.iterations,
        "swaps": run.swaps,
        "stages": stages(&run.stages),
    });
    match &run.outcome {
        Outcome::Relation { relation, residual } => {
            v["outcome"] = json!("relation");
            v["relation"] = relation.iter().map(|c| Value::String(c.to_string())).collect();
            v["residual"] = json!(residual.to_decimal_string(6));
        }
        Outcome::Bound(m) => {
            v["outcome"] = json!("bound");
            v["norm_bound"] = json!(m.to_f64());
        }
    }
    v
}

/// Relation search over a comma or space separated list of decimals.
pub fn relation(input: &str, norm_bound: &str, digits: u32, classic: bool) -> Result<Value, String> {
    let ctx = context(digits)?;
    let x = parse_vector(input, &ctx)?;
    let bound = parse_bound(norm_bound, &ctx)?;
    let gamma = default_gamma(&ctx);
    let noop = &mut |_: &_, _: &_| {};
    let run = if classic {
        pslq_observed(&x, &bound, &gamma, &ctx, noop)
    } else {
        ipslq_observed(&x, &bound, &gamma, &ctx, noop)
    }
    .map_err(|e| e.to_string())?;
    let mut v = outcome_json(&run);
    v["algorithm"] = json!(if classic { "pslq" } else { "ipslq" });
    Ok(v)
}

pub fn reconstruct(alpha: &str, degree_bound: usize, height_bound: u64, digits: u32) -> Result<Value, String> {
    let ctx = context(digits)?;
    if degree_bound + 1 > MAX_LEN {
        return Err(format!("degree bound at most {}", MAX_LEN - 1));
    }
    let alpha = ctx.parse(alpha.trim()).map_err(|e| e.to_string())?;
    let opts = MinPolyOptions::new(&ctx);
    let req = MinPolyRequest::new(alpha, degree_bound, height_bound, ctx).map_err(|e| e.to_string())?;
    let out = minpoly(&req, &opts).map_err(|e| e.to_string())?;
    let mut v = json!({
        "iterations": out.iterations(),
        "stages": stages(out.trace()),
    });
    match &out {
        MinPolyOutcome::Found(f) | MinPolyOutcome::HeightExceeded(f) => {
            v["outcome"] = json!(if matches!(out, MinPolyOutcome::Found(_)) { "polynomial" } else { "height-exceeded" });
            v["polynomial"] = json!(f.polynomial.to_string());
            v["coefficients"] = json!(f.polynomial.coefficient_list());
            v["degree"] = json!(f.polynomial.degree());
            v["height"] = json!(f.polynomial.height().to_string());
            v["residual"] = json!(f.check.residual.to_decimal_string(6));
        }
        MinPolyOutcome::Bound { norm_bound, .. } => {
            v["outcome"] = json!("bound");
            v["norm_bound"] = json!(norm_bound.to_f64());
        }
    }
    Ok(v)
}

/// log10 |h_jj| for every diagonal entry after every iteration, with the
/// window start at that point. Zero diagonals are reported as null.
pub fn trajectory(input: &str, norm_bound: &str, digits: u32, classic: bool) -> Result<Value, String> {
    let ctx = context(digits)?;
    let x = parse_vector(input, &ctx)?;
    let bound = parse_bound(norm_bound, &ctx)?;
    let gamma = default_gamma(&ctx);
    let mut steps = Vec::new();
    let mut record = |ws: &ipslq_core::Workspace, ev: &ipslq_core::pslq::IterationEvent| {
        let h = ws.h();
        let diag: Vec<Value> = (0..h.cols())
            .map(|j| {
                let l = h[(j, j)].log2_abs() * std::f64::consts::LOG10_2;
                if l.is_finite() { json!(l) } else { Value::Null }
            })
            .collect();
        steps.push(json!({ "window_start": ev.window_start, "pivot": ev.pivot, "log10_diag": diag }));
    };
    let run = if classic {
        pslq_observed(&x, &bound, &gamma, &ctx, &mut record)
    } else {
        ipslq_observed(&x, &bound, &gamma, &ctx, &mut record)
    }
    .map_err(|e| e.to_string())?;
    let mut v = outcome_json(&run);
    v["steps"] = Value::Array(steps);
    v["inverse_bound_log10"] = json!(-bound.log2_abs() * std::f64::consts::LOG10_2);
    Ok(v)
}

/// 3^(1/s) + 2^(1/t) to `digits` decimal digits.
pub fn radical_sum_digits(s: u32, t: u32, digits: u32) -> Result<String, String> {
    if s == 0 || t == 0 {
        return Err("root orders must be positive".into());
    }
    let ctx = context(digits + 10)?;
    let v = &ctx.int(3).nth_root(s) + &ctx.int(2).nth_root(t);
    Ok(v.to_decimal_string(digits as usize))
}

fn render(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

#[wasm_bindgen]
pub fn find_relation(input: &str, norm_bound: &str, digits: u32, classic: bool) -> String {
    render(relation(input, norm_bound, digits, classic))
}

#[wasm_bindgen]
pub fn reconstruct_minpoly(alpha: &str, degree_bound: usize, height_bound: u32, digits: u32) -> String {
    render(reconstruct(alpha, degree_bound, u64::from(height_bound), digits))
}

#[wasm_bindgen]
pub fn diagonal_trajectory(input: &str, norm_bound: &str, digits: u32, classic: bool) -> String {
    render(trajectory(input, norm_bound, digits, classic))
}

#[wasm_bindgen]
pub fn radical_sum(s: u32, t: u32, digits: u32) -> String {
    render(radical_sum_digits(s, t, digits).map(Value::String))
}
