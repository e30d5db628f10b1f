//! Double-exponential quadrature.
//!
//! Both rules are trapezoidal sums in a variable `u` with step `h = 2^(−ℓ)`:
//!
//! * tanh-sinh on `[a, b]`: `x = c + d·tanh(π/2·sinh u)`,
//! * exp-sinh on `[a, ∞)`: `x = a + exp(π/2·sinh u)`.
//!
//! Each level halves `h` and only evaluates the new (odd) nodes, so the
//! difference between consecutive levels comes almost for free and serves as
//! the error estimate. Distances to the endpoints are stored directly rather
//! than as `1 − tanh`, so integrands singular at `0` see their arguments to
//! full relative precision.

use std::sync::Mutex;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numkernel::{exp, pi, BigReal, PrecisionContext};

const GUARD_BITS: u32 = 32;
pub const DEFAULT_MAX_LEVEL: u32 = 12;
pub const DEFAULT_MIN_LEVEL: u32 = 3;

/// Outcome of one quadrature run.
#[derive(Debug, Clone)]
pub struct IntegralResult {
    pub value: BigReal,
    /// Nonnegative; the last inter-level difference plus any truncated tail.
    pub error_estimate: BigReal,
    pub levels_used: u32,
    pub converged: bool,
    /// Inter-level differences, one per level from level 1 on.
    pub level_estimates: Vec<BigReal>,
    pub evaluations: usize,
}

impl IntegralResult {
    /// Turns a non-converged result into [`Error::NonConvergence`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                levels: self.levels_used,
                error_estimate: self.error_estimate.to_string_digits(6),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOptions {
    pub max_level: u32,
    /// Convergence is not declared before this level.
    pub min_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { max_level: DEFAULT_MAX_LEVEL, min_level: DEFAULT_MIN_LEVEL }
    }
}

/// `|f(t)| ≤ scale · e^(−rate·t)` for all `t ≥ from`.
#[derive(Debug, Clone)]
pub struct DecayCertificate {
    pub scale: BigReal,
    pub rate: BigReal,
    pub from: BigReal,
}

impl DecayCertificate {
    fn log2_bound(&self, t: &BigReal) -> f64 {
        self.scale.log2_abs_f64() - self.rate.to_f64() * t.to_f64() * std::f64::consts::LOG2_E
    }
}

/// The nodes of one tanh-sinh level on `[−1, 1]`, weights including `h`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub level: u32,
    pub h: BigReal,
    pub nodes: Vec<(BigReal, BigReal)>,
}

/// Full tanh-sinh rule at `level` on `[−1, 1]`, truncated where the distance
/// to ±1 drops below the working precision.
pub fn tanh_sinh_rule(level: u32, ctx: &PrecisionContext) -> Result<QuadratureRule> {
    let table = DeTable::new(Map::TanhSinh, ctx);
    let w = table.bits;
    let h = BigReal::one(w).mul_pow2(-(level as i64));
    let mut nodes = Vec::new();
    let mut k: u64 = 0;
    while let Some(node) = table.node_at(level, k, true)? {
        if node.xp.magnitude_exp() < -(ctx.bits() as i64) {
            break;
        }
        let one = BigReal::one(w);
        let wt = &node.wp * &h;
        if k == 0 {
            nodes.push((BigReal::zero(w), wt));
        } else {
            nodes.push((&one - &node.xp, wt.clone()));
            nodes.push((&node.xp - &one, wt));
        }
        k += 1;
    }
    nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite abscissae"));
    Ok(QuadratureRule { level, h, nodes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Map {
    TanhSinh,
    ExpSinh,
}

/// Canonical node data at `u = k·h`, `k ≥ 0`.
///
/// tanh-sinh: `xp` is the distance `1 − tanh(π/2·sinh u)` and `wp` the weight;
/// the mirrored node shares both.
/// exp-sinh: `(xp, wp)` belong to `+u`, `(xm, wm)` to `−u`.
#[derive(Debug, Clone)]
struct Node {
    xp: BigReal,
    wp: BigReal,
    xm: BigReal,
    wm: BigReal,
}

/// Lazily built node tables, shared between runs at one precision. Nodes
/// depend only on the map and the precision, never on the integrand.
struct DeTable {
    map: Map,
    bits: u32,
    ctx: PrecisionContext,
    half_pi: BigReal,
    /// largest admissible π/2·sinh u
    s_cap: f64,
    levels: Mutex<Vec<Vec<Option<Node>>>>,
}

impl DeTable {
    fn new(map: Map, ctx: &PrecisionContext) -> Self {
        let wide = ctx.with_extra_bits(GUARD_BITS);
        let bits = wide.bits();
        let half_pi = pi(&wide).mul_pow2(-1);
        // allow endpoint distances down to about 2^(-4w) so integrable
        // singularities at 0 are resolved
        let s_cap = 2.0 * (bits as f64 * std::f64::consts::LN_2 + 64.0);
        Self { map, bits, ctx: wide, half_pi, s_cap, levels: Mutex::new(Vec::new()) }
    }

    /// Node number `idx` among those evaluated at `level` (all `k` on level 0,
    /// odd `k` afterwards). With `all` set, `idx` is `k` itself.
    fn node_at(&self, level: u32, idx: u64, all: bool) -> Result<Option<Node>> {
        let k = if all || level == 0 { idx } else { 2 * idx + 1 };
        let u_f = k as f64 * (-(level as f64)).exp2();
        if std::f64::consts::FRAC_PI_2 * u_f.sinh() > self.s_cap {
            return Ok(None);
        }
        if all {
            return self.compute(level, k).map(Some);
        }
        let mut guard = self.levels.lock().expect("node cache poisoned");
        while guard.len() <= level as usize {
            guard.push(Vec::new());
        }
        let slot = &mut guard[level as usize];
        while slot.len() <= idx as usize {
            let j = slot.len() as u64;
            let kj = if level == 0 { j } else { 2 * j + 1 };
            slot.push(Some(self.compute(level, kj)?));
        }
        Ok(slot[idx as usize].clone())
    }

    fn compute(&self, level: u32, k: u64) -> Result<Node> {
        let w = self.bits;
        let ctx = &self.ctx;
        let u = BigReal::from_parts(BigInt::from(k), -(level as i64), w);
        let eu = exp(&u, ctx)?;
        let emu = eu.recip();
        let sinh = (&eu - &emu).mul_pow2(-1);
        let cosh = (&eu + &emu).mul_pow2(-1);
        let s = &self.half_pi * &sinh;
        let dsdu = &self.half_pi * &cosh;
        let one = BigReal::one(w);
        Ok(match self.map {
            Map::TanhSinh => {
                // 1 − tanh s = 2e^(−2s)/(1 + e^(−2s)), sech² s = 4e^(−2s)/(1 + e^(−2s))²
                let e2 = exp(&-s.mul_pow2(1), ctx)?;
                let den = &one + &e2;
                let xp = e2.mul_pow2(1) / &den;
                let wp = (&dsdu * &xp).mul_pow2(1) / &den;
                Node { xp, wp, xm: BigReal::zero(w), wm: BigReal::zero(w) }
            }
            Map::ExpSinh => {
                let es = exp(&s, ctx)?;
                let ems = es.recip();
                let wp = &dsdu * &es;
                let wm = &dsdu * &ems;
                Node { xp: es, wp, xm: ems, wm }
            }
        })
    }
}

/// Reusable integrator: one map, one precision, cached nodes. Safe to use
/// from inside its own integrand (the cache lock is never held while `f`
/// runs), which is what nested cubature needs.
pub struct DeIntegrator {
    table: DeTable,
    opts: QuadOptions,
}

impl DeIntegrator {
    pub fn tanh_sinh(ctx: &PrecisionContext, opts: QuadOptions) -> Self {
        Self { table: DeTable::new(Map::TanhSinh, ctx), opts }
    }

    pub fn exp_sinh(ctx: &PrecisionContext, opts: QuadOptions) -> Self {
        Self { table: DeTable::new(Map::ExpSinh, ctx), opts }
    }

    pub fn options(&self) -> QuadOptions {
        self.opts
    }

    /// `∫_a^b f` for the tanh-sinh table, `∫_a^∞ f` (with `b` ignored) for
    /// the exp-sinh one.
    pub fn integrate<F>(&self, f: F, a: &BigReal, b: Option<&BigReal>, eps: &BigReal) -> Result<IntegralResult>
    where
        F: Fn(&BigReal) -> Result<BigReal>,
    {
        let w = self.table.bits;
        let a = a.round_to(w.max(a.bits()));
        let (center, half) = match (self.table.map, b) {
            (Map::TanhSinh, Some(b)) => {
                if b <= &a {
                    return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
                }
                let b = b.round_to(w.max(b.bits()));
                ((&a + &b).mul_pow2(-1), (&b - &a).mul_pow2(-1))
            }
            (Map::TanhSinh, None) => {
                return Err(Error::InvalidInput("finite rule needs an upper limit".into()))
            }
            (Map::ExpSinh, _) => (a.clone(), BigReal::one(w)),
        };
        let b_end = &center + &half;

        let eval = |x: &BigReal| -> Result<BigReal> {
            f(x).map_err(|e| match e {
                Error::IntegrandFailure { .. } | Error::TailBoundViolation { .. } => e,
                other => Error::IntegrandFailure { at: x.to_string_digits(20), reason: other.to_string() },
            })
        };

        let mut evaluations = 0usize;
        let mut prev: Option<BigReal> = None;
        let mut estimates = Vec::new();
        let mut biggest = f64::NEG_INFINITY; // log2 of the largest |term|
        let mut last = BigReal::zero(w);
        let mut last_err = BigReal::zero(w);
        // per side, the largest u that carried a non-negligible term; finer
        // levels always cover at least that far
        let mut extent = [0f64; 2];

        for level in 0..=self.opts.max_level {
            let h = BigReal::one(w).mul_pow2(-(level as i64));
            let mut sum = BigReal::zero(w);
            // per side: consecutive negligible terms, and whether the side is finished
            let mut quiet = [0u32; 2];
            let mut done = [false; 2];
            let mut prev_log = [f64::INFINITY; 2];
            let mut idx: u64 = 0;
            while !(done[0] && done[1]) {
                let Some(node) = self.table.node_at(level, idx, false)? else {
                    break;
                };
                let k_is_zero = level == 0 && idx == 0;
                let k = if level == 0 { idx } else { 2 * idx + 1 };
                let u = k as f64 * (-(level as f64)).exp2();
                idx += 1;
                for side in 0..2 {
                    if done[side] || (k_is_zero && side == 1) {
                        continue;
                    }
                    let (x, wt) = match self.table.map {
                        Map::TanhSinh => {
                            let off = half.mul(&node.xp);
                            if k_is_zero {
                                (center.clone(), half.mul(&node.wp))
                            } else {
                                let x = if side == 0 { &b_end - &off } else { &a + &off };
                                // node has merged with the endpoint
                                let end = if side == 0 { &b_end } else { &a };
                                if !end.is_zero() && off.magnitude_exp() < end.magnitude_exp() - w as i64 {
                                    done[side] = true;
                                    continue;
                                }
                                (x, half.mul(&node.wp))
                            }
                        }
                        Map::ExpSinh => {
                            if side == 0 {
                                (&a + &node.xp, node.wp.clone())
                            } else {
                                if !a.is_zero() && node.xm.magnitude_exp() < a.magnitude_exp() - w as i64 {
                                    done[side] = true;
                                    continue;
                                }
                                (&a + &node.xm, node.wm.clone())
                            }
                        }
                    };
                    let fx = eval(&x)?;
                    evaluations += 1;
                    let term = (fx * wt).round_to(w);
                    let lt = term.log2_abs_f64();
                    if lt > biggest {
                        biggest = lt;
                    }
                    sum = &sum + &term;
                    let negligible = term.is_zero() || lt < biggest - w as f64 - 8.0;
                    if !negligible {
                        extent[side] = extent[side].max(u);
                    }
                    // on the coarsest level a small term only ends the side once
                    // the terms are also decaying; later levels know the extent
                    let decaying = level > 0 || lt <= prev_log[side];
                    prev_log[side] = lt;
                    if negligible && decaying && u > extent[side] {
                        quiet[side] += 1;
                        if quiet[side] >= 2 {
                            done[side] = true;
                        }
                    } else {
                        quiet[side] = 0;
                    }
                }
            }
            let value = match &prev {
                None => &sum * &h,
                Some(p) => &p.mul_pow2(-1) + &(&sum * &h),
            };
            if let Some(p) = &prev {
                let diff = (&value - p).abs();
                estimates.push(diff.clone());
                // rounding noise floor of the sum itself
                let floor = value.abs().mul_pow2(-(self.table.ctx.bits() as i64 - GUARD_BITS as i64 - 8));
                let tol = BigReal::max_of(eps, &floor);
                last_err = diff.clone();
                if level >= self.opts.min_level && diff <= tol {
                    return Ok(IntegralResult {
                        value: value.round_to(self.table.ctx.bits() - GUARD_BITS),
                        error_estimate: diff,
                        levels_used: level,
                        converged: true,
                        level_estimates: estimates,
                        evaluations,
                    });
                }
            }
            last = value.clone();
            prev = Some(value);
        }
        Ok(IntegralResult {
            value: last.round_to(self.table.ctx.bits() - GUARD_BITS),
            error_estimate: last_err,
            levels_used: self.opts.max_level,
            converged: false,
            level_estimates: estimates,
            evaluations,
        })
    }
}

/// `∫_a^b f(x) dx` by tanh-sinh. `f` may be singular at either endpoint as
/// long as the integral converges.
pub fn integrate_finite<F>(f: F, a: &BigReal, b: &BigReal, eps: &BigReal, ctx: &PrecisionContext) -> Result<IntegralResult>
where
    F: Fn(&BigReal) -> Result<BigReal>,
{
    integrate_finite_with(f, a, b, eps, ctx, QuadOptions::default())
}

pub fn integrate_finite_with<F>(
    f: F,
    a: &BigReal,
    b: &BigReal,
    eps: &BigReal,
    ctx: &PrecisionContext,
    opts: QuadOptions,
) -> Result<IntegralResult>
where
    F: Fn(&BigReal) -> Result<BigReal>,
{
    DeIntegrator::tanh_sinh(ctx, opts).integrate(f, a, Some(b), eps)
}

/// `∫_a^∞ f(t) dt`.
///
/// With a decay certificate the range is cut at the `T` where the certified
/// tail drops below `eps/4`, `[a, T]` goes to tanh-sinh and the tail bound is
/// added to the error estimate; every node beyond `certificate.from` is
/// checked against the certificate. Without one the exp-sinh map is used.
pub fn integrate_semi_infinite<F>(
    f: F,
    a: &BigReal,
    eps: &BigReal,
    ctx: &PrecisionContext,
    tail_bound: Option<&DecayCertificate>,
) -> Result<IntegralResult>
where
    F: Fn(&BigReal) -> Result<BigReal>,
{
    integrate_semi_infinite_with(f, a, eps, ctx, tail_bound, QuadOptions::default())
}

pub fn integrate_semi_infinite_with<F>(
    f: F,
    a: &BigReal,
    eps: &BigReal,
    ctx: &PrecisionContext,
    tail_bound: Option<&DecayCertificate>,
    opts: QuadOptions,
) -> Result<IntegralResult>
where
    F: Fn(&BigReal) -> Result<BigReal>,
{
    let Some(cert) = tail_bound else {
        return DeIntegrator::exp_sinh(ctx, opts).integrate(f, a, None, eps);
    };
    let rate = cert.rate.to_f64();
    if rate.is_nan() || rate <= 0.0 || !cert.scale.is_positive() {
        return Err(Error::InvalidInput("decay certificate needs positive scale and rate".into()));
    }
    // C/λ · e^(−λT) ≤ eps/4
    let ln_c = cert.scale.log2_abs_f64() * std::f64::consts::LN_2;
    let ln_eps = eps.log2_abs_f64() * std::f64::consts::LN_2;
    let cut = ((ln_c - rate.ln() - ln_eps + 4f64.ln()) / rate).max(0.0);
    let start = BigReal::max_of(a, &cert.from).to_f64();
    let t_end = (start.max(a.to_f64()) + cut).ceil() + 1.0;
    let w = ctx.bits() + GUARD_BITS;
    let t = BigReal::from_f64(t_end, w)
        .ok_or_else(|| Error::InvalidInput(format!("truncation point {t_end} not finite")))?;
    let tail_log2 = cert.log2_bound(&t) - rate.log2();
    let eps_log2 = eps.log2_abs_f64();

    let checked = |x: &BigReal| -> Result<BigReal> {
        let covered = x >= &cert.from;
        match f(x) {
            Ok(v) => {
                if covered && !v.is_zero() {
                    let bound = cert.log2_bound(x);
                    if v.log2_abs_f64() > bound + 1e-9 * bound.abs().max(1.0) {
                        return Err(Error::TailBoundViolation {
                            at: x.to_string_digits(20),
                            observed: v.abs().to_string_digits(12),
                            bound: format!("2^{bound:.3}"),
                        });
                    }
                }
                Ok(v)
            }
            // overflow/underflow far inside the certified region contributes nothing
            Err(_) if covered && cert.log2_bound(x) < eps_log2 - 20.0 => Ok(BigReal::zero(w)),
            Err(e) => Err(e),
        }
    };
    let mut r = integrate_finite_with(checked, a, &t, &eps.mul_pow2(-1), ctx, opts)?;
    let tail = BigReal::from_f64(tail_log2.exp2(), 64).unwrap_or_else(|| BigReal::zero(64));
    r.error_estimate = &r.error_estimate + &tail;
    r.converged = r.converged && r.error_estimate <= *eps;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{sqrt, ten_to_minus};

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d)
    }

    fn r(x: i64, c: &PrecisionContext) -> BigReal {
        BigReal::from_i64(x, c.bits())
    }

    #[test]
    fn constant_and_sqrt_singularity() {
        let c = ctx(40);
        let eps = ten_to_minus(30, &c);
        let one = integrate_finite(|_| Ok(BigReal::one(c.bits())), &r(0, &c), &r(1, &c), &eps, &c).unwrap();
        assert!(one.converged);
        assert!((&one.value - &r(1, &c)).abs() < ten_to_minus(32, &c));

        let c2 = c;
        let two = integrate_finite(
            move |x| Ok(sqrt(x, &c2)?.recip()),
            &r(0, &c),
            &r(1, &c),
            &eps,
            &c,
        )
        .unwrap();
        assert!(two.converged, "{two:?}");
        assert!((&two.value - &r(2, &c)).abs() < ten_to_minus(30, &c), "{}", two.value);
    }

    #[test]
    fn exponential_tail() {
        let c = ctx(30);
        let eps = ten_to_minus(25, &c);
        let c2 = c;
        let res = integrate_semi_infinite(move |t| exp(&-t, &c2), &r(0, &c), &eps, &c, None).unwrap();
        assert!(res.converged);
        assert!((&res.value - &r(1, &c)).abs() < ten_to_minus(25, &c));
    }

    #[test]
    fn certified_tail() {
        let c = ctx(30);
        let eps = ten_to_minus(20, &c);
        let cert = DecayCertificate { scale: r(1, &c), rate: r(1, &c), from: r(0, &c) };
        let c2 = c;
        let res = integrate_semi_infinite(move |t| exp(&-t, &c2), &r(0, &c), &eps, &c, Some(&cert)).unwrap();
        assert!(res.converged, "{res:?}");
        assert!((&res.value - &r(1, &c)).abs() < eps);
    }

    #[test]
    fn certificate_violation_is_reported() {
        let c = ctx(20);
        let eps = ten_to_minus(15, &c);
        // e^(−t/2) does not decay like e^(−t)
        let cert = DecayCertificate { scale: r(1, &c), rate: r(1, &c), from: r(1, &c) };
        let c2 = c;
        let half = BigReal::from_ratio(1, 2, c.bits()).unwrap();
        let err = integrate_semi_infinite(move |t| exp(&-(t * &half), &c2), &r(0, &c), &eps, &c, Some(&cert))
            .unwrap_err();
        assert!(matches!(err, Error::TailBoundViolation { .. }), "{err}");
    }

    #[test]
    fn integrand_failure_propagates() {
        let c = ctx(20);
        let eps = ten_to_minus(15, &c);
        let err = integrate_finite(
            |x| {
                if x.to_f64() > 0.7 {
                    Err(Error::NonFinite("boom".into()))
                } else {
                    Ok(x.clone())
                }
            },
            &r(0, &c),
            &r(1, &c),
            &eps,
            &c,
        )
        .unwrap_err();
        assert!(matches!(err, Error::IntegrandFailure { .. }));
    }

    #[test]
    fn rule_shape() {
        let c = ctx(30);
        let mut prev = 0usize;
        for level in 0..5 {
            let rule = tanh_sinh_rule(level, &c).unwrap();
            let n = rule.nodes.len();
            let one = BigReal::one(c.bits());
            for (x, wt) in &rule.nodes {
                assert!(wt.is_positive());
                assert!(x.abs() < one);
            }
            if level > 0 {
                let ratio = n as f64 / prev as f64;
                assert!((1.7..=2.3).contains(&ratio), "level {level}: {prev} -> {n}");
            }
            prev = n;
        }
    }

    #[test]
    fn reports_non_convergence() {
        let c = ctx(30);
        let eps = ten_to_minus(28, &c);
        // a kink in the middle of the interval spoils the exponential rate
        let opts = QuadOptions { max_level: 4, min_level: 3 };
        let res = integrate_finite_with(
            |x| Ok((x - &BigReal::from_ratio(1, 3, 128).unwrap()).abs()),
            &r(0, &c),
            &r(1, &c),
            &eps,
            &c,
            opts,
        )
        .unwrap();
        assert!(!res.converged);
        assert_eq!(res.levels_used, 4);
        assert!(res.clone().require_converged().is_err());
    }
}
