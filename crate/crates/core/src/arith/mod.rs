//! Precision regime: working precision, numeric thresholds, and exact
//! decimal input.

mod real;

pub use real::Real;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Working precision and the thresholds derived from it.
///
/// `precision_bits = ceil(decimal_digits * log2 10) + guard_bits`. A diagonal
/// entry counts as zero below `2^-floor(0.9 * bits)`; a relation is accepted
/// when its residual is below `2^-floor(bits / 2)` (relative).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    decimal_digits: u32,
    guard_bits: u32,
    precision_bits: u32,
    zero_exponent: u32,
    residual_exponent: u32,
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32, guard_bits: u32) -> Result<Self> {
        if decimal_digits == 0 {
            return Err(Error::ZeroDigits);
        }
        // 10^D is never a power of two, so its bit length is ceil(D log2 10).
        let base_bits = BigUint::from(10u32).pow(decimal_digits).bits() as u32;
        let precision_bits = base_bits + guard_bits;
        Ok(PrecisionContext {
            decimal_digits,
            guard_bits,
            precision_bits,
            zero_exponent: 9 * precision_bits / 10,
            residual_exponent: precision_bits / 2,
        })
    }

    /// Overrides the diagonal-zero threshold to `2^-bits`.
    pub fn with_zero_exponent(mut self, bits: u32) -> Self {
        self.zero_exponent = bits;
        self
    }

    /// Overrides the residual acceptance threshold to `2^-bits`.
    pub fn with_residual_exponent(mut self, bits: u32) -> Self {
        self.residual_exponent = bits;
        self
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn zero_exponent(&self) -> u32 {
        self.zero_exponent
    }

    pub fn residual_exponent(&self) -> u32 {
        self.residual_exponent
    }

    pub fn eps_zero(&self) -> Real {
        self.one().mul_pow2(-i64::from(self.zero_exponent))
    }

    pub fn eps_residual(&self) -> Real {
        self.one().mul_pow2(-i64::from(self.residual_exponent))
    }

    pub fn one(&self) -> Real {
        Real::from_i64(1, self.precision_bits)
    }

    pub fn int(&self, v: i64) -> Real {
        Real::from_i64(v, self.precision_bits)
    }

    pub fn bigint(&self, v: &BigInt) -> Real {
        Real::from_bigint(v, self.precision_bits)
    }

    pub fn f64(&self, v: f64) -> Real {
        Real::from_f64(v, self.precision_bits)
    }

    pub fn parse(&self, text: &str) -> Result<Real> {
        parse_decimal(text, self)
    }
}

/// Parses `[+-]digits[.digits][(e|E)[+-]digits]` (at least one mantissa
/// digit) and rounds the exact value once to the working precision.
pub fn parse_decimal(text: &str, ctx: &PrecisionContext) -> Result<Real> {
    let (num, den) = parse_decimal_exact(text)?;
    Ok(Real::from_ratio(&num, &den, ctx.precision_bits()))
}

/// The exact rational value of a decimal string as `(numerator, denominator)`.
pub fn parse_decimal_exact(text: &str) -> Result<(BigInt, BigUint)> {
    let fail = |reason| Error::Parse {
        input: text.to_string(),
        reason,
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(fail("empty string"));
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(fail("no digits"));
    }
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(fail("unexpected character"));
    }
    let mut exp10: i64 = match exponent {
        Some(e) => {
            let digits = e.strip_prefix(['+', '-']).unwrap_or(e);
            if digits.is_empty() || !all_digits(digits) {
                return Err(fail("malformed exponent"));
            }
            e.parse().map_err(|_| fail("exponent out of range"))?
        }
        None => 0,
    };
    exp10 -= frac_part.len() as i64;
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| fail("no digits"))?;
    if neg {
        num = -num;
    }
    if exp10.unsigned_abs() > 1_000_000 {
        return Err(fail("exponent out of range"));
    }
    let ten = BigUint::from(10u32);
    if exp10 >= 0 {
        num *= BigInt::from(ten.pow(exp10 as u32));
        Ok((num, BigUint::one()))
    } else {
        Ok((num, ten.pow((-exp10) as u32)))
    }
}

/// Whether the decimal string denotes zero.
pub fn is_zero_decimal(text: &str) -> Result<bool> {
    Ok(parse_decimal_exact(text)?.0.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_derivation() {
        assert_eq!(PrecisionContext::new(500, 0).unwrap().precision_bits(), 1661);
        assert_eq!(PrecisionContext::new(1, 0).unwrap().precision_bits(), 4);
        let c = PrecisionContext::new(10, 0).unwrap();
        assert_eq!(c.precision_bits(), 34);
        assert_eq!(c.eps_zero(), c.one().mul_pow2(-30));
        assert_eq!(c.eps_residual(), c.one().mul_pow2(-17));
        let g = PrecisionContext::new(10, 7).unwrap();
        assert_eq!(g.precision_bits(), 41);
    }

    #[test]
    fn threshold_ordering() {
        for digits in [1, 2, 5, 30, 500, 2000] {
            let c = PrecisionContext::new(digits, 3).unwrap();
            let one = c.one();
            assert!(Real::zero() < c.eps_zero());
            assert!(c.eps_zero() < c.eps_residual());
            assert!(c.eps_residual() < one);
        }
    }

    #[test]
    fn rejects_zero_digits() {
        assert_eq!(PrecisionContext::new(0, 4), Err(Error::ZeroDigits));
    }

    #[test]
    fn parse_examples() {
        let c = PrecisionContext::new(30, 0).unwrap();
        assert_eq!(c.parse("0.5").unwrap(), c.one().mul_pow2(-1));
        assert_eq!(c.parse("-3").unwrap(), c.int(-3));
        let pi_ish = c.parse("3.14").unwrap();
        let exact = Real::from_ratio(&BigInt::from(157), &BigUint::from(50u32), 4000);
        let err = (&pi_ish.with_precision(4000) - &exact).abs();
        // within half an ulp at precision_bits
        assert!(err.log2_abs() <= 1.0 - f64::from(c.precision_bits()) + 0.01);
        assert_eq!(c.parse("1e3").unwrap(), c.int(1000));
        assert_eq!(c.parse("+.25E+1").unwrap(), c.parse("2.5").unwrap());
        assert_eq!(c.parse("7.").unwrap(), c.int(7));
    }

    #[test]
    fn parse_errors() {
        let c = PrecisionContext::new(10, 0).unwrap();
        for bad in ["", "   ", "-", ".", "1.2.3", "abc", "1e", "1e+", "--1", "1,5", "0x10"] {
            assert!(matches!(c.parse(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
    }
}
