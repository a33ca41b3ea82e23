//! Machinery shared by classic PSLQ and the incremental variant: the
//! hyperplane matrix, size reduction, pivot choice, the swap/corner step,
//! termination tests, and the driver loop.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::ipslq::{StageOutcome, StageRecord, StageTrace};
use crate::matrix::Matrix;

/// The default pivot weight `sqrt(2)`.
pub fn default_gamma(ctx: &PrecisionContext) -> Real {
    ctx.int(2).sqrt()
}

/// Lower-trapezoidal `n x (n-1)` matrix whose orthonormal columns span the
/// hyperplane orthogonal to `x`.
///
/// With tail norms `s_j = sqrt(x_j^2 + ... + x_{n-1}^2)`:
/// `H[j][j] = s_{j+1} / s_j` and `H[i][j] = -x_i x_j / (s_j s_{j+1})` for
/// `i > j`. Tail norms are accumulated from the end, so the lower-right
/// block for a suffix of `x` is bit-identical to the matrix of that suffix.
pub fn compute_hyperplane(x: &[Real]) -> Result<Matrix<Real>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if let Some(i) = x.iter().position(Real::is_zero) {
        return Err(Error::ZeroEntry(i));
    }
    let mut sq = vec![Real::zero(); n];
    let mut acc = Real::zero();
    for i in (0..n).rev() {
        acc = &acc + &(&x[i] * &x[i]);
        sq[i] = acc.clone();
    }
    let s: Vec<Real> = sq.iter().map(Real::sqrt).collect();
    let mut h = Matrix::from_fn(n, n - 1, |_, _| Real::zero());
    for j in 0..n - 1 {
        h[(j, j)] = &s[j + 1] / &s[j];
        let denom = &s[j] * &s[j + 1];
        for i in j + 1..n {
            h[(i, j)] = -(&(&x[i] * &x[j]) / &denom);
        }
    }
    Ok(h)
}

/// Result of the window termination test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    Continue,
    /// Every window diagonal is below `1/M`: no relation of norm `<= M`
    /// exists for the sub-vector in play.
    WindowExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Relation { relation: Vec<BigInt>, residual: Real },
    /// Certifies `lambda_1(x) > bound`.
    Bound(Real),
}

impl Outcome {
    pub fn is_relation(&self) -> bool {
        matches!(self, Outcome::Relation { .. })
    }

    pub fn relation(&self) -> Option<&[BigInt]> {
        match self {
            Outcome::Relation { relation, .. } => Some(relation),
            Outcome::Bound(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RelationOutcome {
    pub outcome: Outcome,
    pub iterations: u64,
    pub swaps: u64,
    pub stages: StageTrace,
}

/// Information passed to iteration observers.
#[derive(Clone, Copy, Debug)]
pub struct IterationEvent {
    pub pivot: usize,
    pub reductions: usize,
    pub window_start: usize,
}

/// Mutable PSLQ state. Indices are 0-based: rows `0..n`, columns `0..n-1`,
/// and the active window covers diagonal positions `k..=n-2`.
#[derive(Clone, Debug)]
pub struct Workspace {
    n: usize,
    x: Vec<Real>,
    unit_x: Vec<Real>,
    h: Matrix<Real>,
    a: Matrix<BigInt>,
    b: Matrix<BigInt>,
    k: usize,
    gamma: Real,
    gamma_powers: Vec<Real>,
    bound: Real,
    inv_bound: Real,
    ctx: PrecisionContext,
    swap_count: u64,
    iterations: u64,
}

impl Workspace {
    /// Validates the input and builds `H = H_x`, `A = B = I` with the window
    /// spanning the whole vector. No reduction is performed yet.
    pub fn new(x: &[Real], bound: &Real, gamma: &Real, ctx: &PrecisionContext) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if let Some(i) = x.iter().position(Real::is_zero) {
            return Err(Error::ZeroEntry(i));
        }
        if bound.is_zero() || bound.is_negative() {
            return Err(Error::NonPositiveBound);
        }
        // gamma > 2/sqrt(3)  <=>  3 gamma^2 > 4
        if gamma.is_negative() || &ctx.int(3) * &(gamma * gamma) <= ctx.int(4) {
            return Err(Error::InvalidGamma);
        }
        let prec = ctx.precision_bits();
        let x: Vec<Real> = x.iter().map(|v| v.with_precision(prec)).collect();
        let norm = x
            .iter()
            .fold(Real::zero(), |acc, v| &acc + &(v * v))
            .sqrt();
        let unit_x: Vec<Real> = x.iter().map(|v| v / &norm).collect();
        let h = compute_hyperplane(&unit_x)?;
        let gamma = gamma.with_precision(prec);
        let mut gamma_powers = Vec::with_capacity(n - 1);
        let mut g = gamma.clone();
        for _ in 0..n - 1 {
            gamma_powers.push(g.clone());
            g = &g * &gamma;
        }
        let bound = bound.with_precision(prec);
        Ok(Workspace {
            n,
            x,
            unit_x,
            h,
            a: Matrix::identity(n),
            b: Matrix::identity(n),
            k: 0,
            gamma,
            gamma_powers,
            // shrunk by a relative eps_residual so a relation of norm exactly
            // M is never ruled out by rounding
            inv_bound: &(&ctx.one() - &ctx.eps_residual()) / &bound,
            bound,
            ctx: ctx.clone(),
            swap_count: 0,
            iterations: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &[Real] {
        &self.x
    }

    pub fn unit_x(&self) -> &[Real] {
        &self.unit_x
    }

    pub fn h(&self) -> &Matrix<Real> {
        &self.h
    }

    pub fn a(&self) -> &Matrix<BigInt> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<BigInt> {
        &self.b
    }

    /// First diagonal position of the active window.
    pub fn window_start(&self) -> usize {
        self.k
    }

    pub fn set_window_start(&mut self, k: usize) {
        assert!(k <= self.n - 2, "window start {k} beyond last diagonal");
        self.k = k;
    }

    pub fn gamma(&self) -> &Real {
        &self.gamma
    }

    pub fn bound(&self) -> &Real {
        &self.bound
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn swap_count(&self) -> u64 {
        self.swap_count
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    fn last_diag(&self) -> usize {
        self.n - 2
    }

    /// Hermite-reduces every row against the rows above it, recording the
    /// row operations in `A` and their inverses in `B`. Returns the number
    /// of nonzero multipliers applied. Diagonals at or below the zero
    /// threshold are skipped, since dividing by rounding noise would only
    /// blow up `A` and `B`.
    pub fn size_reduce(&mut self) -> usize {
        let zero = self.zero_threshold();
        let mut applied = 0;
        for i in 1..self.n {
            for j in (0..i.min(self.n - 1)).rev() {
                if self.h[(j, j)].cmp_abs(&zero) != Ordering::Greater {
                    continue;
                }
                // |h_ij| < |h_jj| / 2 forces t = 0
                if self.h[(i, j)].cmp_abs_scaled(&self.h[(j, j)], -1) == Ordering::Less {
                    continue;
                }
                let t = (&self.h[(i, j)] / &self.h[(j, j)]).round_to_int();
                if t.is_zero() {
                    continue;
                }
                self.apply_reduction(i, j, &t);
                applied += 1;
            }
        }
        applied
    }

    /// Row `i` -= `t` * row `j` in `H` and `A`; column `j` += `t` * column `i`
    /// in `B`.
    fn apply_reduction(&mut self, i: usize, j: usize, t: &BigInt) {
        let tr = self.ctx.bigint(t);
        for c in 0..=j {
            let delta = &tr * &self.h[(j, c)];
            let (hi, _) = self.h.pair_mut((i, c), (j, c));
            *hi = &*hi - &delta;
        }
        for c in 0..self.n {
            if self.a[(j, c)].is_zero() {
                continue;
            }
            let delta = t * &self.a[(j, c)];
            self.a[(i, c)] -= delta;
        }
        for r in 0..self.n {
            if self.b[(r, i)].is_zero() {
                continue;
            }
            let delta = t * &self.b[(r, i)];
            self.b[(r, j)] += delta;
        }
    }

    /// The window position maximizing `gamma^(j+1) |h_jj|`; ties go to the
    /// smallest index.
    pub fn select_pivot(&self) -> usize {
        let mut best = self.k;
        let mut best_weight = &self.gamma_powers[self.k] * &self.h[(self.k, self.k)].abs();
        for j in self.k + 1..=self.last_diag() {
            let w = &self.gamma_powers[j] * &self.h[(j, j)].abs();
            if w > best_weight {
                best = j;
                best_weight = w;
            }
        }
        best
    }

    /// Swaps rows `r` and `r+1` (columns of `B`), then, unless `r` is the
    /// last diagonal position, rotates columns `r` and `r+1` of `H` to
    /// restore lower-trapezoidal form.
    pub fn swap_and_restore(&mut self, r: usize) -> Result<()> {
        if r < self.k || r > self.last_diag() {
            return Err(Error::PivotOutOfWindow {
                r,
                k: self.k,
                last: self.last_diag(),
            });
        }
        self.h.swap_rows(r, r + 1);
        self.a.swap_rows(r, r + 1);
        self.b.swap_cols(r, r + 1);
        self.swap_count += 1;
        if r < self.last_diag() && !self.h[(r, r + 1)].is_zero() {
            let a = self.h[(r, r)].clone();
            let b = self.h[(r, r + 1)].clone();
            let d = (&(&a * &a) + &(&b * &b)).sqrt();
            let c = &a / &d;
            let s = &b / &d;
            for i in r + 1..self.n {
                let u = self.h[(i, r)].clone();
                let v = self.h[(i, r + 1)].clone();
                self.h[(i, r)] = &(&c * &u) + &(&s * &v);
                self.h[(i, r + 1)] = &(&c * &v) - &(&s * &u);
            }
            self.h[(r, r)] = d;
            self.h[(r, r + 1)] = Real::zero();
        }
        Ok(())
    }

    /// Exhausted once every window diagonal sits below `(1 - eps_residual)/M`
    /// by more than the rounding noise of `H`.
    pub fn termination_scan(&self) -> Scan {
        let limit = &self.inv_bound - &self.noise_floor();
        let exhausted = !limit.is_negative()
            && (self.k..=self.last_diag()).all(|j| self.h[(j, j)].cmp_abs(&limit) == Ordering::Less);
        if exhausted {
            Scan::WindowExhausted
        } else {
            Scan::Continue
        }
    }

    /// Bit length of the largest entry of `A`. Rounding noise in `H` grows
    /// roughly in proportion to it.
    pub fn a_bits(&self) -> u64 {
        (0..self.n)
            .flat_map(|i| self.a.row(i).iter().map(BigInt::bits))
            .max()
            .unwrap_or(0)
    }

    /// Diagonal zero threshold: `eps_zero` scaled by the magnitude of `A`.
    pub fn zero_threshold(&self) -> Real {
        self.ctx.eps_zero().mul_pow2(self.a_bits().saturating_sub(1) as i64)
    }

    pub fn relation_detected(&self) -> bool {
        let last = self.last_diag();
        self.h[(last, last)].abs() <= self.zero_threshold()
    }

    /// First window diagonal before the last one that has collapsed to zero.
    pub fn collapsed_interior(&self) -> Option<usize> {
        let eps = self.zero_threshold();
        (self.k..self.last_diag()).find(|&j| self.h[(j, j)].abs() <= eps)
    }

    /// Estimated absolute rounding error of the entries of `H`:
    /// `n * 2^(bits(A) - precision)`.
    pub fn noise_floor(&self) -> Real {
        let log_n = usize::BITS - (self.n - 1).leading_zeros();
        let e = self.a_bits() as i64 + log_n as i64 - self.ctx.precision_bits() as i64;
        self.ctx.one().mul_pow2(e)
    }

    /// True once the noise of `H` is so large (`delta * M >= 1/2`) that no
    /// window can be certified any more.
    pub fn precision_spent(&self) -> bool {
        (&self.noise_floor() * &self.bound).mul_pow2(1) >= self.ctx.one()
    }

    /// Last column of `B`, checked against the original input:
    /// `|m.x| <= eps_residual * |m| * |x|`.
    pub fn extract_relation(&self) -> Result<(Vec<BigInt>, Real)> {
        let m: Vec<BigInt> = self.b.column(self.n - 1).cloned().collect();
        if m.iter().all(Zero::is_zero) {
            return Err(Error::ZeroRelation);
        }
        let residual = relation_residual(&m, &self.x, &self.ctx);
        let m_norm = self.ctx.bigint(&m.iter().map(|v| v * v).sum()).sqrt();
        let x_norm = self
            .x
            .iter()
            .fold(Real::zero(), |acc, v| &acc + &(v * v))
            .sqrt();
        let limit = &(&self.ctx.eps_residual() * &m_norm) * &x_norm;
        if residual > limit {
            return Err(Error::PrecisionExhausted(format!(
                "candidate relation has residual {residual:.6} above {limit:.6}"
            )));
        }
        Ok((m, residual))
    }

    /// Drags a collapsed interior diagonal down to the last position.
    fn push_collapse_down(&mut self, j: usize) -> Result<()> {
        for r in j..self.last_diag() {
            self.swap_and_restore(r)?;
        }
        Ok(())
    }

    /// One pass: pivot, swap/corner, size reduction.
    pub fn iterate(&mut self) -> Result<IterationEvent> {
        let pivot = self.select_pivot();
        self.swap_and_restore(pivot)?;
        let reductions = self.size_reduce();
        self.iterations += 1;
        Ok(IterationEvent {
            pivot,
            reductions,
            window_start: self.k,
        })
    }
}

/// `|sum m_i x_i|` at working precision.
pub fn relation_residual(m: &[BigInt], x: &[Real], ctx: &PrecisionContext) -> Real {
    m.iter()
        .zip(x)
        .filter(|(mi, _)| !mi.is_zero())
        .fold(Real::zero(), |acc, (mi, xi)| &acc + &(&ctx.bigint(mi) * xi))
        .abs()
}

/// `10 n^3 log2(M n)` iterations, shared by all stages of one run.
pub fn iteration_cap(n: usize, bound: &Real) -> u64 {
    let log = (bound.log2_abs() + (n as f64).log2()).max(1.0);
    (10.0 * (n as f64).powi(3) * log).ceil() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum WindowPolicy {
    /// Window pinned to the whole vector (classic PSLQ).
    Fixed,
    /// Start at the shortest suffix and extend leftward on exhaustion.
    Incremental,
}

pub(crate) fn drive(
    ws: &mut Workspace,
    policy: WindowPolicy,
    observer: &mut dyn FnMut(&Workspace, &IterationEvent),
) -> Result<RelationOutcome> {
    let n = ws.n();
    ws.set_window_start(match policy {
        WindowPolicy::Fixed => 0,
        WindowPolicy::Incremental => n - 2,
    });
    ws.size_reduce();
    let cap = iteration_cap(n, ws.bound());
    let mut trace = StageTrace::default();
    let mut stage_iters = 0u64;
    let mut stage_swaps = ws.swap_count();

    let outcome = loop {
        if let Some(j) = ws.collapsed_interior() {
            ws.push_collapse_down(j)?;
        }
        if ws.relation_detected() {
            let (relation, residual) = ws.extract_relation()?;
            break Outcome::Relation { relation, residual };
        }
        if ws.iterations() >= cap {
            return Err(Error::PrecisionExhausted(format!(
                "iteration cap {cap} reached without a decision"
            )));
        }
        let event = ws.iterate()?;
        stage_iters += 1;
        observer(ws, &event);
        if ws.relation_detected() || ws.collapsed_interior().is_some() {
            continue;
        }
        if ws.precision_spent() {
            return Err(Error::PrecisionExhausted(format!(
                "entries of A reached 2^{} after {} iterations; H is too noisy to certify a bound",
                ws.a_bits(),
                ws.iterations()
            )));
        }
        if ws.termination_scan() == Scan::WindowExhausted {
            if policy == WindowPolicy::Incremental && ws.window_start() > 0 {
                trace.push(StageRecord {
                    window_start: ws.window_start(),
                    suffix_len: n - ws.window_start(),
                    iterations: stage_iters,
                    swaps: ws.swap_count() - stage_swaps,
                    outcome: StageOutcome::Extended,
                });
                crate::ipslq::extend_window(ws)?;
                stage_iters = 0;
                stage_swaps = ws.swap_count();
                continue;
            }
            break Outcome::Bound(ws.bound().clone());
        }
    };

    trace.push(StageRecord {
        window_start: ws.window_start(),
        suffix_len: n - ws.window_start(),
        iterations: stage_iters,
        swaps: ws.swap_count() - stage_swaps,
        outcome: if outcome.is_relation() {
            StageOutcome::Relation
        } else {
            StageOutcome::Bound
        },
    });
    Ok(RelationOutcome {
        outcome,
        iterations: ws.iterations(),
        swaps: ws.swap_count(),
        stages: trace,
    })
}

/// Classic PSLQ over the whole vector.
pub fn pslq(x: &[Real], bound: &Real, gamma: &Real, ctx: &PrecisionContext) -> Result<RelationOutcome> {
    pslq_observed(x, bound, gamma, ctx, &mut |_, _| {})
}

/// [`pslq`] with a callback after every iteration.
pub fn pslq_observed(
    x: &[Real],
    bound: &Real,
    gamma: &Real,
    ctx: &PrecisionContext,
    observer: &mut dyn FnMut(&Workspace, &IterationEvent),
) -> Result<RelationOutcome> {
    let mut ws = Workspace::new(x, bound, gamma, ctx)?;
    drive(&mut ws, WindowPolicy::Fixed, observer)
}

/// Euclidean norm of an integer vector, rounded to working precision.
pub fn int_norm(m: &[BigInt], ctx: &PrecisionContext) -> Real {
    ctx.bigint(&m.iter().map(|v| v * v).sum()).sqrt()
}

/// Negates `m` if needed so its first nonzero entry is positive.
pub fn canonical_sign(mut m: Vec<BigInt>) -> Vec<BigInt> {
    if m.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
        for v in &mut m {
            *v = -&*v;
        }
    }
    m
}
