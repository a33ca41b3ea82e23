//! Minimal polynomial reconstruction: run incremental PSLQ on the descending
//! powers `(a^d, ..., a, 1)` of an approximation `a`. Windows grow from the
//! right, so candidate degrees are tried in increasing order and the first
//! hit has minimal degree within the bounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::ipslq::{ipslq, StageTrace};
use crate::pslq::Outcome;

/// Primitive integer polynomial with positive leading coefficient,
/// coefficients in descending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Strips leading zeros, divides out the content and makes the leading
    /// coefficient positive.
    pub fn normalized(coeffs: Vec<BigInt>) -> Result<Self> {
        let first = coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(Error::ZeroRelation)?;
        let mut coeffs = coeffs[first..].to_vec();
        let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let flip = coeffs[0].is_negative();
        for c in &mut coeffs {
            *c = &*c / &content;
            if flip {
                *c = -&*c;
            }
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::normalized(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The monomial `y`.
    pub fn identity() -> Self {
        IntPolynomial {
            coeffs: vec![BigInt::one(), BigInt::zero()],
        }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn norm2(&self, ctx: &PrecisionContext) -> Real {
        ctx.bigint(&self.coeffs.iter().map(|c| c * c).sum()).sqrt()
    }

    /// Horner evaluation at working precision.
    pub fn eval(&self, y: &Real, ctx: &PrecisionContext) -> Real {
        self.coeffs
            .iter()
            .fold(Real::zero(), |acc, c| &(&acc * y) + &ctx.bigint(c))
    }

    /// Comma-separated descending coefficients, e.g. `1,0,-10,0,1`.
    pub fn coefficient_list(&self) -> String {
        self.coeffs
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for IntPolynomial {
    /// Formats as `y^4 - 10*y^2 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = d - i;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let var = match power {
                0 => String::new(),
                1 => "y".to_string(),
                p => format!("y^{p}"),
            };
            match (mag.is_one(), var.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => f.write_str(&var)?,
                (false, false) => write!(f, "{mag}*{var}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Maps the relation `m` for `(a^(n-1), ..., a, 1)` to
/// `sum m_i y^(n-1-i)` in canonical form.
pub fn relation_to_polynomial(m: &[BigInt]) -> Result<IntPolynomial> {
    IntPolynomial::normalized(m.to_vec())
}

/// `(alpha^(n-1), ..., alpha, 1)` by repeated multiplication.
pub fn powers_vector(alpha: &Real, n: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if alpha.is_zero() {
        return Err(Error::ZeroEntry(0));
    }
    let alpha = alpha.with_precision(ctx.precision_bits());
    let mut powers = Vec::with_capacity(n);
    let mut p = ctx.one();
    for _ in 0..n {
        powers.push(p.clone());
        p = &p * &alpha;
    }
    powers.reverse();
    Ok(powers)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualCheck {
    pub accepted: bool,
    pub residual: Real,
    pub limit: Real,
}

/// Accepts `p` iff `|p(alpha)| <= eps_residual * |p|_2 * max(1, |alpha|)^deg`.
pub fn residual_check(p: &IntPolynomial, alpha: &Real, ctx: &PrecisionContext) -> ResidualCheck {
    let alpha = alpha.with_precision(ctx.precision_bits());
    let residual = p.eval(&alpha, ctx).abs();
    let scale = std::cmp::max(ctx.one(), alpha.abs()).powi(p.degree() as u32);
    let limit = &(&ctx.eps_residual() * &p.norm2(ctx)) * &scale;
    ResidualCheck {
        accepted: residual <= limit,
        residual,
        limit,
    }
}

#[derive(Clone, Debug)]
pub struct MinPolyRequest {
    pub alpha: Real,
    pub degree_bound: usize,
    pub height_bound: u64,
    pub ctx: PrecisionContext,
}

impl MinPolyRequest {
    pub fn new(alpha: Real, degree_bound: usize, height_bound: u64, ctx: PrecisionContext) -> Result<Self> {
        if degree_bound == 0 {
            return Err(Error::InvalidRequest("degree bound must be at least 1".into()));
        }
        if height_bound == 0 {
            return Err(Error::InvalidRequest("height bound must be at least 1".into()));
        }
        Ok(MinPolyRequest {
            alpha: alpha.with_precision(ctx.precision_bits()),
            degree_bound,
            height_bound,
            ctx,
        })
    }

    /// Norm bound handed to the relation search: the height bound itself, or
    /// `height_bound * sqrt(d + 1)` in strict mode, which covers every
    /// polynomial of degree `<= d` and height `<= height_bound`.
    pub fn norm_bound(&self, strict: bool) -> Real {
        let h = self.ctx.bigint(&BigInt::from(self.height_bound));
        if strict {
            &h * &self.ctx.int(self.degree_bound as i64 + 1).sqrt()
        } else {
            h
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinPolyFound {
    pub polynomial: IntPolynomial,
    pub check: ResidualCheck,
    pub trace: StageTrace,
    pub iterations: u64,
    pub swaps: u64,
}

#[derive(Clone, Debug)]
pub enum MinPolyOutcome {
    Found(MinPolyFound),
    /// No polynomial of degree `<= degree_bound` with norm below the search
    /// bound annihilates the approximation at this precision.
    Bound {
        norm_bound: Real,
        trace: StageTrace,
        iterations: u64,
        swaps: u64,
    },
    /// The search found an annihilating polynomial of minimal degree, but
    /// its height exceeds the requested bound.
    HeightExceeded(MinPolyFound),
}

impl MinPolyOutcome {
    pub fn polynomial(&self) -> Option<&IntPolynomial> {
        match self {
            MinPolyOutcome::Found(f) => Some(&f.polynomial),
            _ => None,
        }
    }

    pub fn trace(&self) -> &StageTrace {
        match self {
            MinPolyOutcome::Found(f) | MinPolyOutcome::HeightExceeded(f) => &f.trace,
            MinPolyOutcome::Bound { trace, .. } => trace,
        }
    }

    pub fn iterations(&self) -> u64 {
        match self {
            MinPolyOutcome::Found(f) | MinPolyOutcome::HeightExceeded(f) => f.iterations,
            MinPolyOutcome::Bound { iterations, .. } => *iterations,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinPolyOptions {
    pub gamma: Real,
    pub strict_norm: bool,
}

impl MinPolyOptions {
    pub fn new(ctx: &PrecisionContext) -> Self {
        MinPolyOptions {
            gamma: crate::pslq::default_gamma(ctx),
            strict_norm: false,
        }
    }
}

pub fn minpoly(req: &MinPolyRequest, opts: &MinPolyOptions) -> Result<MinPolyOutcome> {
    let ctx = &req.ctx;
    if req.alpha.is_zero() {
        let polynomial = IntPolynomial::identity();
        let check = residual_check(&polynomial, &req.alpha, ctx);
        return Ok(MinPolyOutcome::Found(MinPolyFound {
            polynomial,
            check,
            trace: StageTrace::default(),
            iterations: 0,
            swaps: 0,
        }));
    }
    let x = powers_vector(&req.alpha, req.degree_bound + 1, ctx)?;
    let bound = req.norm_bound(opts.strict_norm);
    let run = ipslq(&x, &bound, &opts.gamma, ctx)?;
    match run.outcome {
        Outcome::Relation { mut relation, .. } => {
            // alpha != 0, so a factor y carries no information
            while relation.len() > 1 && relation.last().is_some_and(Zero::is_zero) {
                relation.pop();
            }
            let polynomial = relation_to_polynomial(&relation)?;
            let check = residual_check(&polynomial, &req.alpha, ctx);
            if !check.accepted {
                return Err(Error::PrecisionExhausted(format!(
                    "{polynomial} leaves residual {:.6} above {:.6}",
                    check.residual, check.limit
                )));
            }
            let found = MinPolyFound {
                polynomial,
                check,
                trace: run.stages,
                iterations: run.iterations,
                swaps: run.swaps,
            };
            if found.polynomial.height() > BigInt::from(req.height_bound) {
                Ok(MinPolyOutcome::HeightExceeded(found))
            } else {
                Ok(MinPolyOutcome::Found(found))
            }
        }
        Outcome::Bound(norm_bound) => Ok(MinPolyOutcome::Bound {
            norm_bound,
            trace: run.stages,
            iterations: run.iterations,
            swaps: run.swaps,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d, 0).unwrap()
    }

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn relation_mapping() {
        let m = |v: &[i64]| v.iter().map(|&i| BigInt::from(i)).collect::<Vec<_>>();
        assert_eq!(relation_to_polynomial(&m(&[1, 0, -2])).unwrap().to_string(), "y^2 - 2");
        assert_eq!(relation_to_polynomial(&m(&[-2, 0, 4])).unwrap().to_string(), "y^2 - 2");
        let p = relation_to_polynomial(&m(&[0, 4, -3])).unwrap();
        assert_eq!(p.to_string(), "4*y - 3");
        assert_eq!(p.degree(), 1);
        assert_eq!(relation_to_polynomial(&m(&[0, 0])), Err(Error::ZeroRelation));
    }

    #[test]
    fn display_forms() {
        let p = poly(&[1, 0, -10, 0, 1]);
        assert_eq!(p.to_string(), "y^4 - 10*y^2 + 1");
        assert_eq!(p.coefficient_list(), "1,0,-10,0,1");
        assert_eq!(p.height(), BigInt::from(10));
        assert_eq!(poly(&[3, -1, 0]).to_string(), "3*y^2 - y");
        assert_eq!(poly(&[1, 5]).to_string(), "y + 5");
        assert_eq!(poly(&[7]).to_string(), "1");
    }

    #[test]
    fn powers() {
        let c = ctx(30);
        let two = c.int(2).sqrt();
        let v = powers_vector(&two, 3, &c).unwrap();
        assert!((&v[0] - &c.int(2)).abs() < c.one().mul_pow2(-95));
        assert_eq!(v[1], two);
        assert_eq!(v[2], c.one());
        assert_eq!(powers_vector(&c.one(), 4, &c).unwrap(), vec![c.one(); 4]);
        let v = powers_vector(&c.f64(0.75), 2, &c).unwrap();
        assert_eq!(v, vec![c.f64(0.75), c.one()]);
        assert_eq!(powers_vector(&Real::zero(), 3, &c), Err(Error::ZeroEntry(0)));
    }

    #[test]
    fn residual_examples() {
        let c = ctx(30);
        let r = residual_check(&poly(&[1, -1]), &c.one(), &c);
        assert!(r.accepted && r.residual.is_zero());
        let r = residual_check(&poly(&[1, 0, -2]), &c.f64(1.5), &c);
        assert!(!r.accepted);
        assert_eq!(r.residual, c.f64(0.25));
        let c11 = ctx(11);
        let r = residual_check(&poly(&[1, 0, -2]), &c11.parse("1.41421356237").unwrap(), &c11);
        assert!(r.residual < c11.parse("1e-10").unwrap());
        assert!(r.accepted);
    }

    #[test]
    fn sqrt_two_found_at_degree_two() {
        let c = ctx(100);
        let req = MinPolyRequest::new(c.int(2).sqrt(), 4, 5, c.clone()).unwrap();
        let out = minpoly(&req, &MinPolyOptions::new(&c)).unwrap();
        let MinPolyOutcome::Found(found) = out else {
            panic!("expected a polynomial")
        };
        assert_eq!(found.polynomial, poly(&[1, 0, -2]));
        let degrees: Vec<usize> = found.trace.records().iter().map(|r| r.suffix_len - 1).collect();
        assert_eq!(degrees, vec![1, 2]);
    }

    #[test]
    fn rational_input() {
        let c = ctx(30);
        let req = MinPolyRequest::new(c.parse("0.75").unwrap(), 3, 5, c.clone()).unwrap();
        let out = minpoly(&req, &MinPolyOptions::new(&c)).unwrap();
        // (4, -3) has norm exactly 5
        assert_eq!(out.polynomial(), Some(&poly(&[4, -3])));
        assert_eq!(out.trace().records().len(), 1);
        let strict = MinPolyOptions {
            strict_norm: true,
            ..MinPolyOptions::new(&c)
        };
        assert_eq!(minpoly(&req, &strict).unwrap().polynomial(), Some(&poly(&[4, -3])));
    }

    #[test]
    fn zero_input() {
        let c = ctx(30);
        let req = MinPolyRequest::new(Real::zero(), 3, 5, c.clone()).unwrap();
        let out = minpoly(&req, &MinPolyOptions::new(&c)).unwrap();
        assert_eq!(out.polynomial(), Some(&IntPolynomial::identity()));
    }

    #[test]
    fn height_one_is_a_bound() {
        let c = ctx(100);
        let req = MinPolyRequest::new(c.int(2).sqrt(), 4, 1, c.clone()).unwrap();
        let out = minpoly(&req, &MinPolyOptions::new(&c)).unwrap();
        // the minimal polynomial y^2 - 2 turns up but its height is 2
        let MinPolyOutcome::HeightExceeded(found) = &out else {
            panic!("expected an out-of-bound result, got {out:?}")
        };
        assert_eq!(found.polynomial, poly(&[1, 0, -2]));
        assert_eq!(out.polynomial(), None);
    }

    #[test]
    fn request_validation() {
        let c = ctx(10);
        assert!(MinPolyRequest::new(c.one(), 0, 5, c.clone()).is_err());
        assert!(MinPolyRequest::new(c.one(), 2, 0, c.clone()).is_err());
    }
}
