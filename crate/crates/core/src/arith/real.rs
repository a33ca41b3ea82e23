//! Arbitrary-precision binary floating point.
//!
//! A [`Real`] is `±mag · 2^exp` with `mag` odd (or zero) and at most `prec`
//! significant bits. Every operation computes the exact result (or enough
//! bits of it plus a sticky bit) and rounds once to nearest, ties to even.
//! Binary operations round to the larger precision of their operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct Real {
    neg: bool,
    mag: BigUint,
    exp: i64,
    prec: u32,
}

impl Real {
    pub fn zero() -> Self {
        Real {
            neg: false,
            mag: BigUint::zero(),
            exp: 0,
            prec: 0,
        }
    }

    /// Rounds `(-1)^neg · mag · 2^exp` to `prec` bits. `sticky` marks a
    /// nonzero remainder below the last bit of `mag`; callers that set it
    /// must supply at least `prec + 2` bits.
    fn round(neg: bool, mut mag: BigUint, mut exp: i64, prec: u32, sticky: bool) -> Self {
        if mag.is_zero() {
            return Real {
                prec,
                ..Real::zero()
            };
        }
        let bits = mag.bits();
        if prec > 0 && bits > u64::from(prec) {
            let shift = bits - u64::from(prec);
            let half = mag.bit(shift - 1);
            let below = sticky || lowest_set_bit(&mag) < shift - 1;
            mag >>= shift;
            exp += shift as i64;
            if half && (below || mag.bit(0)) {
                mag += 1u32;
            }
        }
        let tz = lowest_set_bit(&mag);
        if tz > 0 {
            mag >>= tz;
            exp += tz as i64;
        }
        Real {
            neg,
            mag,
            exp,
            prec,
        }
    }

    pub fn from_bigint(value: &BigInt, prec: u32) -> Self {
        Self::round(
            value.sign() == Sign::Minus,
            value.magnitude().clone(),
            0,
            prec,
            false,
        )
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(value), prec)
    }

    /// Exact conversion of a finite `f64`, then one rounding to `prec`.
    pub fn from_f64(value: f64, prec: u32) -> Self {
        assert!(value.is_finite(), "non-finite f64");
        if value == 0.0 {
            return Real {
                prec,
                ..Real::zero()
            };
        }
        let bits = value.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Self::round(neg, BigUint::from(mant), exp, prec, false)
    }

    /// Rounds the rational `num / den` (den > 0) once to `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigUint, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let neg = num.sign() == Sign::Minus;
        Self::div_mag(neg, num.magnitude(), 0, den, 0, prec)
    }

    fn div_mag(neg: bool, a: &BigUint, ea: i64, b: &BigUint, eb: i64, prec: u32) -> Self {
        if a.is_zero() {
            return Real {
                prec,
                ..Real::zero()
            };
        }
        let want = i64::from(prec.max(1)) + 3;
        let shift = (want + b.bits() as i64 - a.bits() as i64).max(0);
        let (q, r) = (a << shift as usize).div_rem(b);
        Self::round(neg, q, ea - shift - eb, prec, !r.is_zero())
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value, re-rounded to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::round(self.neg, self.mag.clone(), self.exp, prec, false)
    }

    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real {
            neg: false,
            ..self.clone()
        }
    }

    /// Multiplies by `2^e` exactly.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Real {
            exp: self.exp + e,
            ..self.clone()
        }
    }

    /// Exponent of the leading bit: `2^(top-1) <= |self| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.mag.bits() as i64
    }

    /// Floor of log2 |self|, or `None` for zero.
    pub fn ilog2(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.top() - 1)
    }

    /// Approximate log2 |self|; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mag.bits();
        let keep = bits.min(60);
        let lead = (&self.mag >> (bits - keep) as usize).to_u64().unwrap_or(u64::MAX);
        (lead as f64).log2() + (self.exp + (bits - keep) as i64) as f64
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mag.bits();
        let keep = bits.min(64);
        let lead = (&self.mag >> (bits - keep) as usize).to_u64().unwrap_or(u64::MAX);
        let e = self.exp + (bits - keep) as i64;
        let mut v = lead as f64;
        // split the scaling so intermediate powers stay finite
        let mut rest = e;
        while rest != 0 {
            let step = rest.clamp(-1000, 1000);
            v *= 2f64.powi(step as i32);
            rest -= step;
        }
        if self.neg {
            -v
        } else {
            v
        }
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_int(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        let mag = if self.exp >= 0 {
            &self.mag << self.exp as usize
        } else {
            let shift = (-self.exp) as u64;
            if shift > self.mag.bits() {
                BigUint::zero()
            } else {
                let half = self.mag.bit(shift - 1);
                let q = &self.mag >> shift as usize;
                if half {
                    q + 1u32
                } else {
                    q
                }
            }
        };
        let sign = if self.neg { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative value");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec.max(1);
        let want = 2 * (i64::from(prec) + 3);
        let mut shift = (want - self.mag.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled = &self.mag << shift as usize;
        let root = scaled.sqrt();
        let exact = &root * &root == scaled;
        Self::round(false, root, (self.exp - shift) / 2, prec, !exact)
    }

    /// Principal `n`-th root of a non-negative value.
    pub fn nth_root(&self, n: u32) -> Self {
        assert!(n >= 1);
        assert!(!self.is_negative(), "root of a negative value");
        if self.is_zero() || n == 1 {
            return self.clone();
        }
        let prec = self.prec.max(1);
        let n64 = i64::from(n);
        let want = n64 * (i64::from(prec) + 3);
        let mut shift = (want - self.mag.bits() as i64).max(0);
        shift += (self.exp - shift).rem_euclid(n64);
        let scaled = &self.mag << shift as usize;
        let root = scaled.nth_root(n);
        let exact = root.pow(n) == scaled;
        Self::round(false, root, (self.exp - shift) / n64, prec, !exact)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Real::from_i64(1, self.prec.max(1));
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Compares `|self|` with `|other| · 2^shift`.
    pub fn cmp_abs_scaled(&self, other: &Real, shift: i64) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let other_exp = other.exp + shift;
        let ta = self.top();
        let tb = other.top() + shift;
        if ta != tb {
            return ta.cmp(&tb);
        }
        let e = self.exp.min(other_exp);
        let a = &self.mag << (self.exp - e) as usize;
        let b = &other.mag << (other_exp - e) as usize;
        a.cmp(&b)
    }

    pub fn cmp_abs(&self, other: &Real) -> Ordering {
        self.cmp_abs_scaled(other, 0)
    }

    fn add_signed(&self, other: &Real, other_neg: bool) -> Real {
        let prec = self.prec.max(other.prec);
        if other.is_zero() {
            return self.with_precision(prec);
        }
        if self.is_zero() {
            let mut r = other.with_precision(prec);
            r.neg = other_neg;
            return r;
        }
        // An operand below a quarter ulp of the other cannot move the
        // rounded result.
        let (ta, tb) = (self.top(), other.top());
        if prec > 0 {
            let p = i64::from(prec);
            if tb < ta - p - 2 && self.mag.bits() <= u64::from(prec) {
                return self.with_precision(prec);
            }
            if ta < tb - p - 2 && other.mag.bits() <= u64::from(prec) {
                let mut r = other.with_precision(prec);
                r.neg = other_neg;
                return r;
            }
        }
        let e = self.exp.min(other.exp);
        let a = &self.mag << (self.exp - e) as usize;
        let b = &other.mag << (other.exp - e) as usize;
        if self.neg == other_neg {
            Self::round(self.neg, a + b, e, prec, false)
        } else {
            match a.cmp(&b) {
                Ordering::Equal => Real {
                    prec,
                    ..Real::zero()
                },
                Ordering::Greater => Self::round(self.neg, a - b, e, prec, false),
                Ordering::Less => Self::round(other_neg, b - a, e, prec, false),
            }
        }
    }

    fn mul_ref(&self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        if self.is_zero() || other.is_zero() {
            return Real {
                prec,
                ..Real::zero()
            };
        }
        Self::round(
            self.neg != other.neg,
            &self.mag * &other.mag,
            self.exp + other.exp,
            prec,
            false,
        )
    }

    fn div_ref(&self, other: &Real) -> Real {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.max(other.prec);
        Self::div_mag(
            self.neg != other.neg,
            &self.mag,
            self.exp,
            &other.mag,
            other.exp,
            prec,
        )
    }

    /// Scientific decimal with `digits` significant digits, rounded half up.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        // value = num / den
        let (num, den) = if self.exp >= 0 {
            (&self.mag << self.exp as usize, BigUint::one())
        } else {
            (self.mag.clone(), BigUint::one() << (-self.exp) as usize)
        };
        let mut e10 = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigUint::from(10u32);
        let scaled = |e10: i64| -> BigUint {
            let k = digits as i64 - 1 - e10;
            let (n, d) = if k >= 0 {
                (&num * ten.pow(k as u32), den.clone())
            } else {
                (num.clone(), &den * ten.pow((-k) as u32))
            };
            (n * 2u32 + &d) / (d * 2u32)
        };
        let lo = ten.pow(digits as u32 - 1);
        let hi = ten.pow(digits as u32);
        let mut q = scaled(e10);
        loop {
            if q >= hi {
                e10 += 1;
            } else if q < lo {
                e10 -= 1;
            } else {
                break;
            }
            q = scaled(e10);
        }
        let s = q.to_string();
        let sign = if self.neg { "-" } else { "" };
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let mut out = format!("{sign}{head}");
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e10 != 0 {
            out.push_str(&format!("e{e10}"));
        }
        out
    }

    /// Decimal digits sufficient for an exact round trip at this precision.
    pub fn round_trip_digits(&self) -> usize {
        // 1 + ceil(prec * log10 2)
        1 + (f64::from(self.prec.max(1)) * std::f64::consts::LOG10_2).ceil() as usize
    }
}

fn lowest_set_bit(v: &BigUint) -> u64 {
    v.trailing_zeros().unwrap_or(0)
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_negative(), other.is_negative()) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_abs(other),
            (true, true) => other.cmp_abs(self),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `pad` would read the precision as a truncation width
        let digits = f.precision().unwrap_or(20);
        let s = self.to_decimal_string(digits);
        match f.width() {
            Some(w) => write!(f, "{s:>w$}"),
            None => f.write_str(&s),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            neg: !self.neg,
            ..self.clone()
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(mut self) -> Real {
        self.neg = !self.neg;
        self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_signed(b, b.neg));
forward_binop!(Sub, sub, |a, b| a.add_signed(b, !b.neg));
forward_binop!(Mul, mul, |a, b| a.mul_ref(b));
forward_binop!(Div, div, |a, b| a.div_ref(b));

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> Real {
        Real::from_f64(v, 53)
    }

    #[test]
    fn matches_f64_arithmetic_at_53_bits() {
        let pairs = [(1.5, 2.25), (0.1, 0.2), (-3.7, 1e-3), (1e10, -1e-10), (7.0, 3.0)];
        for (a, b) in pairs {
            assert_eq!((r(a) + r(b)).to_f64(), a + b, "{a}+{b}");
            assert_eq!((r(a) - r(b)).to_f64(), a - b, "{a}-{b}");
            assert_eq!((r(a) * r(b)).to_f64(), a * b, "{a}*{b}");
            assert_eq!((r(a) / r(b)).to_f64(), a / b, "{a}/{b}");
        }
        for a in [2.0f64, 3.0, 0.5, 1e-7, 12345.678] {
            assert_eq!(r(a).sqrt().to_f64(), a.sqrt(), "sqrt {a}");
        }
    }

    #[test]
    fn round_to_int_ties_away() {
        assert_eq!(r(2.5).round_to_int(), BigInt::from(3));
        assert_eq!(r(-2.5).round_to_int(), BigInt::from(-3));
        assert_eq!(r(2.4999).round_to_int(), BigInt::from(2));
        assert_eq!(r(-0.4).round_to_int(), BigInt::from(0));
        assert_eq!(r(1e20).round_to_int(), BigInt::from(100000000000000000000u128));
    }

    #[test]
    fn nth_root_cubes_back() {
        let three = Real::from_i64(3, 200);
        let c = three.nth_root(3);
        let back = c.powi(3);
        assert!((back - &three).abs().log2_abs() < -190.0);
    }

    #[test]
    fn tiny_addend_does_not_move_result() {
        let one = Real::from_i64(1, 64);
        let tiny = Real::from_i64(1, 64).mul_pow2(-200);
        assert_eq!(&one + &tiny, one);
        assert_eq!(&one - &tiny, one);
        let wide = Real::from_i64(1, 300);
        assert!(&wide - &tiny.with_precision(300) < wide);
    }

    #[test]
    fn decimal_output() {
        assert_eq!(r(0.5).to_decimal_string(5), "5e-1");
        assert_eq!(r(-1234.5).to_decimal_string(3), "-1.23e3");
        assert_eq!(r(1.0).to_decimal_string(10), "1");
        assert_eq!(r(9.9999).to_decimal_string(2), "1e1");
        assert_eq!(format!("{:.3}", r(0.125)), "1.25e-1");
        assert_eq!(format!("{:>8.1}", r(0.5)), "    5e-1");
    }

    #[test]
    fn ordering() {
        assert!(r(-1.0) < r(0.5));
        assert!(r(-2.0) < r(-1.0));
        assert!(Real::zero() < r(1e-300));
        assert_eq!(r(0.0), Real::zero());
        assert_eq!(r(3.0).cmp_abs_scaled(&r(1.5), 1), Ordering::Equal);
    }
}
