use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ipslq_core::arith::{PrecisionContext, Real};
use ipslq_core::ipslq::StageTrace;
use ipslq_core::minpoly::{minpoly, MinPolyOptions, MinPolyOutcome, MinPolyRequest};
use ipslq_core::pslq::{default_gamma, pslq, Outcome};
use ipslq_core::{ipslq, Error};
use serde_json::{json, Value};

use crate::bench::{self, BenchCase};
use crate::{CliError, EXIT_BOUND, EXIT_FOUND};

#[derive(Debug, Parser)]
#[command(name = "ipslq", version, about = "Integer relations and minimal polynomials via incremental PSLQ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find an integer relation among decimal numbers, or certify that none
    /// has 2-norm at most the bound.
    Relation(RelationArgs),
    /// Reconstruct the minimal polynomial of a decimal approximation.
    Minpoly(MinpolyArgs),
    /// Compare incremental and classic PSLQ on 3^(1/s) + 2^(1/t).
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct RelationArgs {
    /// Comma-separated decimals, all nonzero.
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    #[arg(long)]
    pub norm_bound: String,
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub json: bool,
    /// Run classic PSLQ on the whole vector instead of the incremental search.
    #[arg(long)]
    pub classic: bool,
}

#[derive(Debug, Args)]
pub struct MinpolyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long)]
    pub degree_bound: usize,
    #[arg(long)]
    pub height_bound: u64,
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    #[arg(long)]
    pub gamma: Option<String>,
    /// Use sqrt(d+1)*M as the norm bound, so that a Bound also rules out
    /// every polynomial of height <= M.
    #[arg(long)]
    pub strict_norm: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// CSV file with header s,t,d,M,digits; overrides --rows.
    #[arg(long)]
    pub cases: Option<PathBuf>,
    /// Built-in table rows (1-10) to run when no case file is given.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub rows: Vec<u32>,
    #[arg(long, default_value_t = 500)]
    pub digits_default: u32,
    /// Deterministic mode: iteration counts only, no wall times.
    #[arg(long)]
    pub iterations_only: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Relation(a) => cmd_relation(a, out),
        Command::Minpoly(a) => cmd_minpoly(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn gamma_for(text: Option<&str>, ctx: &PrecisionContext) -> Result<Real, CliError> {
    match text {
        Some(t) => Ok(ctx.parse(t)?),
        None => Ok(default_gamma(ctx)),
    }
}

fn parse_bound(text: &str, ctx: &PrecisionContext) -> Result<Real, CliError> {
    let m = ctx.parse(text)?;
    if m.is_zero() || m.is_negative() {
        return Err(Error::NonPositiveBound.into());
    }
    Ok(m)
}

fn stage_json(trace: &StageTrace) -> Value {
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

fn write_stages(trace: &StageTrace, out: &mut dyn Write) -> std::io::Result<()> {
    for r in trace.records() {
        writeln!(
            out,
            "  window {}.. (length {}): {} iterations, {} swaps, {:?}",
            r.window_start, r.suffix_len, r.iterations, r.swaps, r.outcome
        )?;
    }
    Ok(())
}

pub fn cmd_relation(args: &RelationArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = PrecisionContext::new(args.digits, 0)?;
    let x = args
        .input
        .split(',')
        .map(|s| ctx.parse(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let bound = parse_bound(&args.norm_bound, &ctx)?;
    let gamma = gamma_for(args.gamma.as_deref(), &ctx)?;
    let started = Instant::now();
    let run = if args.classic {
        pslq(&x, &bound, &gamma, &ctx)?
    } else {
        ipslq(&x, &bound, &gamma, &ctx)?
    };
    let seconds = started.elapsed().as_secs_f64();
    let algorithm = if args.classic { "pslq" } else { "ipslq" };

    let code = match &run.outcome {
        Outcome::Relation { .. } => EXIT_FOUND,
        Outcome::Bound(_) => EXIT_BOUND,
    };
    if args.json {
        let mut v = json!({
            "algorithm": algorithm,
            "iterations": run.iterations,
            "swaps": run.swaps,
            "seconds": seconds,
            "stages": stage_json(&run.stages),
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
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)?;
        return Ok(code);
    }
    match &run.outcome {
        Outcome::Relation { relation, residual } => {
            let text: Vec<String> = relation.iter().map(ToString::to_string).collect();
            writeln!(out, "relation: ({})", text.join(", ")).map_err(io)?;
            writeln!(out, "residual: {}", residual.to_decimal_string(6)).map_err(io)?;
        }
        Outcome::Bound(_) => {
            writeln!(
                out,
                "bound: no integer relation with 2-norm <= {}",
                args.norm_bound.trim()
            )
            .map_err(io)?;
        }
    }
    writeln!(
        out,
        "{algorithm}: {} iterations, {} swaps, {seconds:.3}s",
        run.iterations, run.swaps
    )
    .map_err(io)?;
    write_stages(&run.stages, out).map_err(io)?;
    Ok(code)
}

pub fn cmd_minpoly(args: &MinpolyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = PrecisionContext::new(args.digits, 0)?;
    let alpha = ctx.parse(args.alpha.trim())?;
    let mut opts = MinPolyOptions::new(&ctx);
    opts.gamma = gamma_for(args.gamma.as_deref(), &ctx)?;
    opts.strict_norm = args.strict_norm;
    let req = MinPolyRequest::new(alpha, args.degree_bound, args.height_bound, ctx)?;
    let started = Instant::now();
    let result = minpoly(&req, &opts).map_err(|e| match e {
        Error::PrecisionExhausted(msg) => {
            CliError::Input(format!("precision exhausted ({msg}); raise --digits and retry"))
        }
        other => other.into(),
    })?;
    let seconds = started.elapsed().as_secs_f64();

    let (code, label) = match &result {
        MinPolyOutcome::Found(_) => (EXIT_FOUND, "polynomial"),
        MinPolyOutcome::Bound { .. } => (EXIT_BOUND, "bound"),
        MinPolyOutcome::HeightExceeded(_) => (EXIT_BOUND, "height-exceeded"),
    };
    let found = match &result {
        MinPolyOutcome::Found(f) | MinPolyOutcome::HeightExceeded(f) => Some(f),
        MinPolyOutcome::Bound { .. } => None,
    };

    if args.json {
        let mut v = json!({
            "outcome": label,
            "iterations": result.iterations(),
            "seconds": seconds,
            "stages": stage_json(result.trace()),
        });
        if let Some(f) = found {
            v["polynomial"] = json!(f.polynomial.to_string());
            v["coefficients"] = json!(f.polynomial.coefficient_list());
            v["degree"] = json!(f.polynomial.degree());
            v["height"] = json!(f.polynomial.height().to_string());
            v["residual"] = json!(f.check.residual.to_decimal_string(6));
            v["detected_at_suffix_len"] = json!(f.trace.last().map(|r| r.suffix_len));
        }
        if let MinPolyOutcome::Bound { norm_bound, .. } = &result {
            v["norm_bound"] = json!(norm_bound.to_f64());
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)?;
        return Ok(code);
    }

    match &result {
        MinPolyOutcome::Found(f) => {
            writeln!(out, "{}", f.polynomial).map_err(io)?;
            writeln!(out, "coefficients: {}", f.polynomial.coefficient_list()).map_err(io)?;
        }
        MinPolyOutcome::HeightExceeded(f) => {
            writeln!(
                out,
                "bound: the polynomial found, {}, has height {} > {}",
                f.polynomial,
                f.polynomial.height(),
                args.height_bound
            )
            .map_err(io)?;
        }
        MinPolyOutcome::Bound { norm_bound, .. } => {
            writeln!(
                out,
                "bound: no polynomial of degree <= {} with coefficient 2-norm <= {:.6}",
                args.degree_bound,
                norm_bound.to_f64()
            )
            .map_err(io)?;
        }
    }
    if let Some(f) = found {
        if let Some(last) = f.trace.last() {
            writeln!(
                out,
                "detected in the degree-{} window (start {})",
                last.suffix_len - 1,
                last.window_start
            )
            .map_err(io)?;
        }
        writeln!(
            out,
            "residual: {} (limit {})",
            f.check.residual.to_decimal_string(6),
            f.check.limit.to_decimal_string(6)
        )
        .map_err(io)?;
    }
    writeln!(out, "{} iterations, {seconds:.3}s", result.iterations()).map_err(io)?;
    write_stages(result.trace(), out).map_err(io)?;
    Ok(code)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cases: Vec<BenchCase> = match &args.cases {
        Some(path) => bench::read_case_file(path, args.digits_default)?,
        None => args
            .rows
            .iter()
            .map(|&r| {
                bench::table_case(r, args.digits_default)
                    .ok_or_else(|| CliError::Input(format!("no built-in row {r}; rows are 1-10")))
            })
            .collect::<Result<_, _>>()?,
    };
    let report = bench::run_bench(&cases, args.iterations_only)?;

    let mut buf = Vec::new();
    if args.json {
        writeln!(buf, "{}", bench::to_json(&report)).map_err(io)?;
    } else {
        bench::write_csv(&report, &mut buf)?;
    }
    match &args.out {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => out.write_all(&buf).map_err(io)?,
    }

    if let Some(row) = bench::first_mismatch(&report) {
        return Err(CliError::Mismatch(format!(
            "row {} (s={}, t={}): recovered {} does not match the exact minimal polynomial{}",
            row.no,
            row.s,
            row.t,
            row.polynomial.as_deref().unwrap_or("nothing"),
            row.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
        )));
    }
    Ok(EXIT_FOUND)
}
