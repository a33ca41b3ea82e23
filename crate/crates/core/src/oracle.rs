//! Independent ground truth: exhaustive relation search, exact minimal
//! polynomials of `3^(1/s) + 2^(1/t)` by resultants over the integers, and
//! seeded instances with a planted relation.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::minpoly::IntPolynomial;

pub const MAX_BRUTE_FORCE_DIM: usize = 6;
pub const MAX_BRUTE_FORCE_NORM: f64 = 1000.0;

/// Exhaustive search over nonzero integer vectors of 2-norm `<= bound`.
///
/// Returns the vector minimizing `|m.x|` (first in order of increasing norm,
/// then lexicographic, sign normalized so the first nonzero entry is
/// positive) if that minimum is `<= tol * |m| * |x|`.
///
/// Every coordinate but the last is enumerated; for each prefix only the
/// one or two last entries nearest the real solution can minimize the
/// residual. An `f64` pass shortlists candidates which are then checked at
/// working precision.
pub fn brute_force_relation(
    x: &[Real],
    bound: &Real,
    tol: &Real,
    ctx: &PrecisionContext,
) -> Result<Option<Vec<BigInt>>> {
    let n = x.len();
    let radius = bound.to_f64();
    if !(2..=MAX_BRUTE_FORCE_DIM).contains(&n) || !(radius <= MAX_BRUTE_FORCE_NORM) {
        return Err(Error::OracleGuard(format!(
            "brute force needs 2 <= n <= {MAX_BRUTE_FORCE_DIM} and bound <= {MAX_BRUTE_FORCE_NORM}"
        )));
    }
    let xf: Vec<f64> = x.iter().map(Real::to_f64).collect();
    let xnorm = xf.iter().map(|v| v * v).sum::<f64>().sqrt();
    let budget = (radius * radius + 1e-9).floor() as i64;
    let slack = tol.to_f64().max(0.0) + 1e-9;

    let mut shortlist: Vec<Vec<i64>> = Vec::new();
    let mut prefix = vec![0i64; n];
    enumerate_prefix(&xf, xnorm, slack, budget, 0, 0.0, &mut prefix, &mut shortlist);

    let mut best: Option<(Real, Vec<BigInt>, i64)> = None;
    let mut keyed: Vec<(i64, Vec<i64>)> = shortlist
        .into_iter()
        .map(|m| (m.iter().map(|v| v * v).sum(), canonical_i64(m)))
        .collect();
    keyed.sort();
    keyed.dedup();
    for (sq, m) in keyed {
        let big: Vec<BigInt> = m.iter().map(|&v| BigInt::from(v)).collect();
        let residual = big
            .iter()
            .zip(x)
            .fold(Real::zero(), |acc, (mi, xi)| &acc + &(&ctx.bigint(mi) * xi))
            .abs();
        let better = best.as_ref().is_none_or(|(r, _, _)| residual < *r);
        if better {
            best = Some((residual, big, sq));
        }
    }
    let Some((residual, m, sq)) = best else {
        return Ok(None);
    };
    let x_norm = x.iter().fold(Real::zero(), |acc, v| &acc + &(v * v)).sqrt();
    let limit = &(tol * &ctx.int(sq).sqrt()) * &x_norm;
    Ok((residual <= limit).then_some(m))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_prefix(
    x: &[f64],
    xnorm: f64,
    slack: f64,
    budget: i64,
    idx: usize,
    partial: f64,
    m: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let n = x.len();
    if idx == n - 1 {
        let reach = (budget as f64).sqrt().floor() as i64;
        let target = -partial / x[n - 1];
        let mut cands = vec![target.floor() as i64, target.ceil() as i64];
        for c in &mut cands {
            *c = (*c).clamp(-reach, reach);
        }
        cands.dedup();
        let used: i64 = m[..n - 1].iter().map(|v| v * v).sum();
        for c in cands {
            if c * c > budget {
                continue;
            }
            if c == 0 && used == 0 {
                continue;
            }
            let res = (partial + c as f64 * x[n - 1]).abs();
            let norm = ((used + c * c) as f64).sqrt();
            if res <= slack * norm * xnorm * 4.0 {
                m[n - 1] = c;
                out.push(m.clone());
            }
        }
        m[n - 1] = 0;
        return;
    }
    let reach = (budget as f64).sqrt().floor() as i64;
    for v in -reach..=reach {
        let rest = budget - v * v;
        if rest < 0 {
            continue;
        }
        m[idx] = v;
        enumerate_prefix(x, xnorm, slack, rest, idx + 1, partial + v as f64 * x[idx], m, out);
    }
    m[idx] = 0;
}

fn canonical_i64(mut m: Vec<i64>) -> Vec<i64> {
    if m.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
        m.iter_mut().for_each(|v| *v = -*v);
    }
    m
}

/// Exact minimal polynomial of `3^(1/s) + 2^(1/t)` for `1 <= s, t <= 7`:
/// `Res_z(z^s - 3, (y - z)^t - 2)` made primitive, positive and square-free.
///
/// The resultant is evaluated at `s*t + 1` integer points with fraction-free
/// Sylvester determinants and interpolated over the rationals.
pub fn exact_minpoly_radical_sum(s: u32, t: u32) -> Result<IntPolynomial> {
    if !(1..=7).contains(&s) || !(1..=7).contains(&t) {
        return Err(Error::OracleGuard(format!("(s, t) = ({s}, {t}) outside 1..=7")));
    }
    let degree = (s * t) as usize;
    let points: Vec<BigInt> = (0..=degree as i64).map(BigInt::from).collect();
    let values: Vec<BigInt> = points.iter().map(|y| radical_resultant_at(s, t, y)).collect();
    let ascending = interpolate(&points, &values);
    let ascending = square_free(&ascending);
    let denom_lcm = ascending
        .iter()
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut descending: Vec<BigInt> = ascending
        .iter()
        .map(|c| (c * BigRational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    descending.reverse();
    IntPolynomial::normalized(descending)
}

/// `Res_z(z^s - 3, (y - z)^t - 2)` at an integer `y`.
fn radical_resultant_at(s: u32, t: u32, y: &BigInt) -> BigInt {
    let s = s as usize;
    let t = t as usize;
    // descending coefficients in z
    let mut f = vec![BigInt::zero(); s + 1];
    f[0] = BigInt::one();
    f[s] = BigInt::from(-3);
    let mut g = vec![BigInt::zero(); t + 1];
    for k in 0..=t {
        // coefficient of z^k in (y - z)^t
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        g[t - k] = sign * binomial(t, k) * y.pow((t - k) as u32);
    }
    g[t] -= 2;
    let size = s + t;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for r in 0..t {
        for (c, v) in f.iter().enumerate() {
            m[r][r + c] = v.clone();
        }
    }
    for r in 0..s {
        for (c, v) in g.iter().enumerate() {
            m[t + r][r + c] = v.clone();
        }
    }
    bareiss_determinant(m)
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Fraction-free Gaussian elimination; every division is exact.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Newton interpolation; returns ascending rational coefficients.
fn interpolate(points: &[BigInt], values: &[BigInt]) -> Vec<BigRational> {
    let n = points.len();
    let xs: Vec<BigRational> = points.iter().cloned().map(BigRational::from_integer).collect();
    let mut dd: Vec<BigRational> = values.iter().cloned().map(BigRational::from_integer).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner on the Newton form
    let mut coeffs = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs = coeffs * (y - x_i) + dd[i]
        let mut next = vec![BigRational::zero(); n];
        for d in 0..n - 1 {
            next[d + 1] = &next[d + 1] + &coeffs[d];
            next[d] = &next[d] - &(&coeffs[d] * &xs[i]);
        }
        next[0] = &next[0] + &dd[i];
        coeffs = next;
    }
    trim(coeffs)
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn rem_div(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &b[db];
        for (j, bj) in b.iter().enumerate() {
            r[i + j] = &r[i + j] - &(&c * bj);
        }
        q[i] = c;
    }
    (trim(q), trim(r[..db.max(1)].to_vec()))
}

fn square_free(p: &[BigRational]) -> Vec<BigRational> {
    let deriv: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    if deriv.is_empty() {
        return p.to_vec();
    }
    let (mut a, mut b) = (p.to_vec(), trim(deriv));
    while !(b.len() == 1 && b[0].is_zero()) {
        let (_, r) = rem_div(&a, &b);
        a = b;
        b = r;
    }
    if a.len() <= 1 {
        p.to_vec()
    } else {
        rem_div(p, &a).0
    }
}

/// A vector with a known integer relation.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub x: Vec<Real>,
    pub m: Vec<BigInt>,
    pub seed: u64,
}

/// Draws `m` with entries in `[-coeff_bound, coeff_bound]` and `m[n-1] != 0`,
/// `x[0..n-1]` uniform in `[1, 2]`, and solves for `x[n-1]`. Deterministic
/// per seed.
pub fn plant_relation(seed: u64, n: usize, coeff_bound: u32, ctx: &PrecisionContext) -> Result<PlantedInstance> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if coeff_bound == 0 {
        return Err(Error::InvalidRequest("coefficient bound must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = i64::from(coeff_bound);
    loop {
        let mut m: Vec<i64> = (0..n).map(|_| rng.gen_range(-b..=b)).collect();
        while m[n - 1] == 0 {
            m[n - 1] = rng.gen_range(-b..=b);
        }
        let mut x: Vec<Real> = (0..n - 1).map(|_| uniform_one_two(&mut rng, ctx)).collect();
        let partial = m[..n - 1]
            .iter()
            .zip(&x)
            .fold(Real::zero(), |acc, (&mi, xi)| &acc + &(&ctx.int(mi) * xi));
        let last = -(&partial / &ctx.int(m[n - 1]));
        if last.is_zero() {
            continue;
        }
        x.push(last);
        return Ok(PlantedInstance {
            x,
            m: m.into_iter().map(BigInt::from).collect(),
            seed,
        });
    }
}

/// Uniform value in `[1, 2]` with `precision_bits` random fraction bits.
pub fn uniform_one_two(rng: &mut impl RngCore, ctx: &PrecisionContext) -> Real {
    let bits = ctx.precision_bits();
    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill_bytes(&mut bytes);
    let mut frac = BigUint::from_bytes_le(&bytes);
    frac >>= bytes.len() * 8 - bits as usize;
    let one = BigUint::one() << bits as usize;
    Real::from_ratio(&BigInt::from(frac + &one), &one, bits)
}

/// Height of a polynomial as `u64`, for reports.
pub fn height_u64(p: &IntPolynomial) -> Option<u64> {
    p.height().to_u64()
}

/// Orders integer vectors by squared norm, then lexicographically.
pub fn norm_lex_cmp(a: &[BigInt], b: &[BigInt]) -> Ordering {
    let sq = |v: &[BigInt]| v.iter().map(|c| c * c).sum::<BigInt>();
    sq(a).cmp(&sq(b)).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40, 0).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&i| BigInt::from(i)).collect()
    }

    #[test]
    fn brute_force_examples() {
        let c = ctx();
        let tol = c.eps_residual();
        let x: Vec<Real> = [1, 2, 3].iter().map(|&v| c.int(v)).collect();
        assert_eq!(brute_force_relation(&x, &c.int(2), &tol, &c).unwrap(), Some(ints(&[1, 1, -1])));
        let x = vec![c.one(), c.int(2).sqrt()];
        assert_eq!(brute_force_relation(&x, &c.int(10), &tol, &c).unwrap(), None);
        let x = vec![c.int(5), c.int(5)];
        assert_eq!(brute_force_relation(&x, &c.int(1), &tol, &c).unwrap(), None);
        let x = vec![c.int(2), c.int(2).sqrt(), c.one()];
        assert_eq!(brute_force_relation(&x, &c.int(3), &tol, &c).unwrap(), Some(ints(&[1, 0, -2])));
    }

    #[test]
    fn brute_force_prefers_short_relations() {
        let c = ctx();
        let tol = c.eps_residual();
        let x = vec![c.one(), c.one(), c.int(2)];
        // (1,-1,0) and (1,1,-1) both vanish; (1,-1,0) comes first lexicographically
        assert_eq!(brute_force_relation(&x, &c.int(5), &tol, &c).unwrap(), Some(ints(&[1, -1, 0])));
    }

    #[test]
    fn brute_force_sign_symmetric() {
        let c = ctx();
        let tol = c.eps_residual();
        let x: Vec<Real> = [1.5, 2.25, -0.75].iter().map(|&v| c.f64(v)).collect();
        let neg: Vec<Real> = x.iter().map(|v| -v).collect();
        let a = brute_force_relation(&x, &c.int(6), &tol, &c).unwrap();
        let b = brute_force_relation(&neg, &c.int(6), &tol, &c).unwrap();
        assert!(a.is_some());
        assert_eq!(a, b);
    }

    #[test]
    fn brute_force_guard() {
        let c = ctx();
        let tol = c.eps_residual();
        let x = vec![c.one(); 7];
        assert!(matches!(brute_force_relation(&x, &c.int(2), &tol, &c), Err(Error::OracleGuard(_))));
        let x = vec![c.one(); 3];
        assert!(matches!(
            brute_force_relation(&x, &c.int(1001), &tol, &c),
            Err(Error::OracleGuard(_))
        ));
    }

    #[test]
    fn radical_sum_small_cases() {
        assert_eq!(exact_minpoly_radical_sum(1, 1).unwrap().to_string(), "y - 5");
        assert_eq!(exact_minpoly_radical_sum(2, 2).unwrap().to_string(), "y^4 - 10*y^2 + 1");
        let p = exact_minpoly_radical_sum(3, 3).unwrap();
        assert_eq!(p.degree(), 9);
        assert_eq!(p.height(), BigInt::from(125));
        assert!(exact_minpoly_radical_sum(0, 2).is_err());
        assert!(exact_minpoly_radical_sum(2, 8).is_err());
    }

    #[test]
    fn radical_sum_vanishes_numerically() {
        let c = PrecisionContext::new(200, 0).unwrap();
        for (s, t) in [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let alpha = &c.int(3).nth_root(s) + &c.int(2).nth_root(t);
            let p = exact_minpoly_radical_sum(s, t).unwrap();
            let v = p.eval(&alpha, &c).abs();
            let limit = c.one().mul_pow2(-(i64::from(c.precision_bits()) / 2));
            assert!(v < limit, "({s},{t}) residual {v}");
        }
    }

    #[test]
    fn square_free_reduction() {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        // (y - 1)^2 (y + 2) = y^3 - 3y + 2, ascending
        let p = vec![q(2), q(-3), q(0), q(1)];
        let sf = square_free(&p);
        // (y - 1)(y + 2) = y^2 + y - 2
        let lead = sf.last().unwrap().clone();
        let monic: Vec<BigRational> = sf.iter().map(|c| c / &lead).collect();
        assert_eq!(monic, vec![q(-2), q(1), q(1)]);
    }

    #[test]
    fn planted_examples_hold() {
        let c = ctx();
        for seed in 0..20 {
            let inst = plant_relation(seed, 4, 10, &c).unwrap();
            assert!(!inst.m[3].is_zero());
            let res = inst
                .m
                .iter()
                .zip(&inst.x)
                .fold(Real::zero(), |acc, (mi, xi)| &acc + &(&c.bigint(mi) * xi))
                .abs();
            let mnorm = c.bigint(&inst.m.iter().map(|v| v * v).sum()).sqrt();
            let xnorm = inst.x.iter().fold(Real::zero(), |a, v| &a + &(v * v)).sqrt();
            let limit = (&mnorm * &xnorm).mul_pow2(4 - i64::from(c.precision_bits()));
            assert!(res <= limit, "seed {seed}");
            for v in &inst.x[..3] {
                assert!(*v >= c.one() && *v <= c.int(2));
            }
        }
        let a = plant_relation(7, 5, 3, &c).unwrap();
        let b = plant_relation(7, 5, 3, &c).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.m, b.m);
    }

    #[test]
    fn planted_by_hand() {
        let c = ctx();
        // m = (1, 1, -1), x = (1, 2) -> x3 = 3
        let last = -(&(&c.int(1) + &c.int(2)) / &c.int(-1));
        assert_eq!(last, c.int(3));
        // m = (2, -1), x1 = 1.5 -> x2 = 3
        let last = -(&(&c.int(2) * &c.f64(1.5)) / &c.int(-1));
        assert_eq!(last, c.int(3));
    }
}
