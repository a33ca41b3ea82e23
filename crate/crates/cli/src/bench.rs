//! Incremental versus classic PSLQ on minimal polynomials of
//! `3^(1/s) + 2^(1/t)`.
//!
//! Each case runs the incremental search once with bounds `(d, M + 1)` and
//! the classic degree search (fresh PSLQ runs on powers vectors of length
//! 3, 4, ... up to `d + 1`). Both arms share every subroutine except the
//! window logic.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use ipslq_core::arith::{PrecisionContext, Real};
use ipslq_core::minpoly::{
    minpoly, powers_vector, relation_to_polynomial, residual_check, IntPolynomial, MinPolyOptions,
    MinPolyOutcome, MinPolyRequest,
};
use ipslq_core::oracle::exact_minpoly_radical_sum;
use ipslq_core::pslq::{default_gamma, pslq, Outcome};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchCase {
    pub no: u32,
    pub s: u32,
    pub t: u32,
    /// Degree bound handed to the search (true degree + 1 in the table).
    pub d: usize,
    /// Height of the exact minimal polynomial; the search uses `M + 1`.
    #[serde(rename = "M")]
    pub m: u64,
    pub digits: u32,
}

/// `(s, t, d, M)` for the ten rows of the reference comparison table.
pub const TABLE1: [(u32, u32, usize, u64); 10] = [
    (2, 2, 5, 10),
    (2, 3, 7, 36),
    (3, 3, 10, 125),
    (3, 4, 13, 540),
    (2, 7, 15, 5103),
    (3, 6, 19, 10278),
    (4, 5, 21, 11160),
    (5, 5, 26, 57500),
    (5, 6, 31, 538380),
    (6, 6, 37, 4281690),
];

pub fn table_case(row: u32, digits: u32) -> Option<BenchCase> {
    let (s, t, d, m) = *TABLE1.get((row as usize).checked_sub(1)?)?;
    Some(BenchCase {
        no: row,
        s,
        t,
        d,
        m,
        digits,
    })
}

#[derive(Debug, Deserialize)]
struct CaseLine {
    s: u32,
    t: u32,
    d: usize,
    #[serde(rename = "M")]
    m: u64,
    digits: Option<u32>,
}

/// Reads a case file with header `s,t,d,M,digits`; an empty `digits` cell
/// falls back to `digits_default`.
pub fn read_cases(reader: impl Read, digits_default: u32) -> Result<Vec<BenchCase>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| CliError::Input(format!("case file: {e}")))?.clone();
    let expected = ["s", "t", "d", "M", "digits"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Input(format!(
            "case file header must be {:?}, found {:?}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut cases = Vec::new();
    for (i, line) in rdr.deserialize::<CaseLine>().enumerate() {
        let line = line.map_err(|e| CliError::Input(format!("case file row {}: {e}", i + 1)))?;
        cases.push(BenchCase {
            no: i as u32 + 1,
            s: line.s,
            t: line.t,
            d: line.d,
            m: line.m,
            digits: line.digits.unwrap_or(digits_default),
        });
    }
    Ok(cases)
}

pub fn read_case_file(path: &Path, digits_default: u32) -> Result<Vec<BenchCase>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open case file {}: {e}", path.display())))?;
    read_cases(file, digits_default)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightProbe {
    /// Outcome label of the incremental search run with height bound `M`.
    pub outcome: String,
    pub match_oracle: bool,
    pub iterations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub no: u32,
    pub s: u32,
    pub t: u32,
    pub d: usize,
    #[serde(rename = "M")]
    pub m: u64,
    pub digits: u32,
    pub polynomial: Option<String>,
    pub degree: Option<usize>,
    pub height: Option<String>,
    pub t_ipslq_s: Option<f64>,
    pub t_pslq_s: Option<f64>,
    pub ratio: Option<f64>,
    pub iter_ipslq: u64,
    pub iter_pslq: u64,
    pub match_oracle: bool,
    /// Polynomial returned by the classic degree search, if any.
    pub pslq_polynomial: Option<String>,
    pub pslq_match_oracle: bool,
    /// Timings too small to compare meaningfully.
    pub below_noise: bool,
    pub at_height_m: HeightProbe,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub iterations_only: bool,
    pub rows: Vec<BenchRow>,
}

/// Timings under this many seconds are flagged as noise.
pub const NOISE_FLOOR_S: f64 = 1e-3;

/// `3^(1/s) + 2^(1/t)` at working precision.
pub fn radical_sum(s: u32, t: u32, ctx: &PrecisionContext) -> Real {
    &ctx.int(3).nth_root(s) + &ctx.int(2).nth_root(t)
}

fn label(out: &MinPolyOutcome) -> &'static str {
    match out {
        MinPolyOutcome::Found(_) => "polynomial",
        MinPolyOutcome::Bound { .. } => "bound",
        MinPolyOutcome::HeightExceeded(_) => "height-exceeded",
    }
}

/// Classic search: fresh PSLQ on `(a^(len-1), ..., 1)` for len = 3..=d+1.
/// Returns the first accepted polynomial and the cumulative iteration count.
pub fn classic_degree_search(
    alpha: &Real,
    degree_bound: usize,
    norm_bound: &Real,
    ctx: &PrecisionContext,
) -> Result<(Option<IntPolynomial>, u64), CliError> {
    let gamma = default_gamma(ctx);
    let mut iterations = 0;
    for len in 3..=degree_bound + 1 {
        let x = powers_vector(alpha, len, ctx)?;
        let run = pslq(&x, norm_bound, &gamma, ctx)?;
        iterations += run.iterations;
        if let Outcome::Relation { mut relation, .. } = run.outcome {
            while relation.len() > 1 && relation.last().is_some_and(|c| c.bits() == 0) {
                relation.pop();
            }
            let p = relation_to_polynomial(&relation)?;
            if residual_check(&p, alpha, ctx).accepted {
                return Ok((Some(p), iterations));
            }
        }
    }
    Ok((None, iterations))
}

pub fn run_case(case: &BenchCase, iterations_only: bool) -> Result<BenchRow, CliError> {
    let ctx = PrecisionContext::new(case.digits, 0)?;
    let alpha = radical_sum(case.s, case.t, &ctx);
    let oracle = exact_minpoly_radical_sum(case.s, case.t)?;
    let opts = MinPolyOptions::new(&ctx);
    let mut errors = Vec::new();

    let started = Instant::now();
    let req = MinPolyRequest::new(alpha.clone(), case.d, case.m + 1, ctx.clone())?;
    let incremental = minpoly(&req, &opts)
        .map_err(|e| errors.push(format!("ipslq: {e}")))
        .ok();
    let t_ipslq = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let (classic, iter_pslq) = classic_degree_search(&alpha, case.d, &req.norm_bound(false), &ctx)
        .unwrap_or_else(|e| {
            errors.push(format!("pslq: {e}"));
            (None, 0)
        });
    let t_pslq = started.elapsed().as_secs_f64();

    let probe_req = MinPolyRequest::new(alpha, case.d, case.m.max(1), ctx)?;
    let at_height_m = match minpoly(&probe_req, &opts) {
        Ok(probe) => HeightProbe {
            outcome: label(&probe).to_string(),
            match_oracle: probe.polynomial() == Some(&oracle),
            iterations: probe.iterations(),
        },
        Err(e) => HeightProbe {
            outcome: format!("error: {e}"),
            match_oracle: false,
            iterations: 0,
        },
    };

    let found = incremental.as_ref().and_then(MinPolyOutcome::polynomial);
    let timed = !iterations_only;
    Ok(BenchRow {
        no: case.no,
        s: case.s,
        t: case.t,
        d: case.d,
        m: case.m,
        digits: case.digits,
        polynomial: found.map(IntPolynomial::coefficient_list),
        degree: found.map(IntPolynomial::degree),
        height: found.map(|p| p.height().to_string()),
        t_ipslq_s: timed.then_some(t_ipslq),
        t_pslq_s: timed.then_some(t_pslq),
        ratio: (timed && found.is_some() && classic.is_some()).then(|| t_pslq / t_ipslq),
        iter_ipslq: incremental.as_ref().map_or(0, MinPolyOutcome::iterations),
        iter_pslq,
        match_oracle: found == Some(&oracle),
        pslq_polynomial: classic.as_ref().map(IntPolynomial::coefficient_list),
        pslq_match_oracle: classic.as_ref() == Some(&oracle),
        below_noise: timed && t_ipslq.min(t_pslq) < NOISE_FLOOR_S,
        at_height_m,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    })
}

/// Runs every case. Timed runs go one at a time; iteration-only runs are
/// deterministic and use one thread per case.
pub fn run_bench(cases: &[BenchCase], iterations_only: bool) -> Result<BenchReport, CliError> {
    let rows = if iterations_only {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cases
                .iter()
                .map(|c| scope.spawn(move || run_case(c, true)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker panicked"))
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        cases.iter().map(|c| run_case(c, false)).collect::<Result<Vec<_>, _>>()?
    };
    Ok(BenchReport {
        iterations_only,
        rows,
    })
}

pub const CSV_HEADER: &str = "no,s,t,d,M,t_ipslq_s,t_pslq_s,ratio,iter_ipslq,iter_pslq,match_oracle";

pub fn write_csv(report: &BenchReport, out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    let opt = |v: Option<f64>| v.map(|f| format!("{f:.6}")).unwrap_or_default();
    for r in &report.rows {
        w.write_record([
            r.no.to_string(),
            r.s.to_string(),
            r.t.to_string(),
            r.d.to_string(),
            r.m.to_string(),
            opt(r.t_ipslq_s),
            opt(r.t_pslq_s),
            opt(r.ratio),
            r.iter_ipslq.to_string(),
            r.iter_pslq.to_string(),
            r.match_oracle.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn to_json(report: &BenchReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// First row whose recovered polynomial disagrees with the oracle.
pub fn first_mismatch(report: &BenchReport) -> Option<&BenchRow> {
    report.rows.iter().find(|r| !r.match_oracle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let c = table_case(3, 500).unwrap();
        assert_eq!((c.s, c.t, c.d, c.m), (3, 3, 10, 125));
        assert!(table_case(0, 10).is_none());
        assert!(table_case(11, 10).is_none());
    }

    #[test]
    fn case_file_parsing() {
        let text = "s,t,d,M,digits\n2,2,5,10,60\n3,3,10,125,\n";
        let cases = read_cases(text.as_bytes(), 500).unwrap();
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[0].digits, 60);
        assert_eq!(cases[1].digits, 500);
        assert_eq!(cases[1].no, 2);
        assert!(read_cases("a,b\n1,2\n".as_bytes(), 10).is_err());
        assert!(read_cases("s,t,d,M,digits\nx,2,5,10,60\n".as_bytes(), 10).is_err());
    }

    #[test]
    fn degenerate_case() {
        let case = BenchCase {
            no: 1,
            s: 1,
            t: 1,
            d: 2,
            m: 5,
            digits: 40,
        };
        let row = run_case(&case, false).unwrap();
        assert_eq!(row.polynomial.as_deref(), Some("1,-5"));
        assert_eq!(row.degree, Some(1));
        assert!(row.match_oracle);
        assert!(row.ratio.is_some() || !row.pslq_match_oracle);
        assert!(row.below_noise);
    }

    #[test]
    fn csv_layout() {
        let case = table_case(1, 60).unwrap();
        let report = run_bench(&[case], true).unwrap();
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..5], ["1", "2", "2", "5", "10"]);
        assert_eq!(&row[5..8], ["", "", ""]);
        assert_eq!(row[10], "true");
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let case = table_case(1, 40).unwrap();
        let mut report = run_bench(&[case], false).unwrap();
        let mut t = 0.1f64;
        for _ in 0..200 {
            t = (t * 7.3 + 1e-9).fract() / 3.0;
            let row = &mut report.rows[0];
            row.t_ipslq_s = Some(t);
            row.t_pslq_s = Some(t * 5.77);
            row.ratio = Some(5.77 + t);
            let text = to_json(&report);
            let back: BenchReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, report);
            assert_eq!(to_json(&back), text);
        }
    }
}
