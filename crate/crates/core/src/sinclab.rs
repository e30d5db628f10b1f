//! The sinc sum-versus-integral identity
//!
//! `½ + Σ_{n≥1} Π_{k=0}^N sinc(n/(2k+1)) = ∫₀^∞ Π_{k=0}^N sinc(x/(2k+1)) dx`
//!
//! and the frequency criterion `Σ_{k=0}^N 1/(2k+1) > 2π` that marks where it
//! stops holding.
//!
//! Both sides decay only like `n^(−(N+1))`, far too slowly for plain
//! truncation when `N` is small. Writing `a_k = 1/(2k+1)`, `m = N + 1` and
//! `C = Π(2k+1)`,
//!
//! `Π sin(a_k x) = (2i)^(−m) Σ_σ ε_σ e^(iβ_σ x)`, `β_σ = Σ σ_k a_k`,
//!
//! so every tail is a finite combination of `Σ_{n>M} cos(nβ)/n^m` (or `sin`)
//! and `∫_T^∞ cos(βx)/x^m dx`. Both have Laplace representations through
//! `1/x^m = 1/(m−1)! ∫₀^∞ u^(m−1) e^(−xu) du` whose integrands decay like
//! `e^(−Mu)` and are handled by exp-sinh quadrature.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{exp, pi, sin_cos, sinh_cosh, BigReal, PrecisionContext};
use crate::quadrature::{integrate_finite, DeIntegrator, QuadOptions};

const GUARD_BITS: u32 = 64;
/// Plain truncation of the sum is used while it needs at most this many terms.
pub const DIRECT_SUM_LIMIT: u64 = 100_000;
/// Terms summed directly before the analytic tail takes over.
const PARTIAL_TERMS: u64 = 64;
/// Length of the integral's finite part, and its panel width.
const FINITE_RANGE: i64 = 32;
const PANEL: i64 = 4;

/// `sin(x)/x`, and `1` at `0`.
pub fn sinc(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    crate::numkernel::sinc(x, ctx)
}

#[derive(Debug, Clone)]
pub struct SincIdentityReport {
    pub n: u32,
    pub lhs: BigReal,
    pub rhs: BigReal,
    pub difference: BigReal,
    /// Bound on what the sum side leaves out or approximates.
    pub truncation_bound: BigReal,
}

/// One side of the identity with its error accounting.
#[derive(Debug, Clone)]
pub struct SideValue {
    pub value: BigReal,
    /// Rigorous envelope bound after plain truncation, otherwise the
    /// quadrature error estimates of the analytic tail scaled by their
    /// weights.
    pub tail_bound: BigReal,
    /// Terms summed explicitly (sum side) or the finite range (integral side).
    pub cutoff: u64,
    pub analytic_tail: bool,
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("N must satisfy N ≥ 1".into()));
    }
    Ok(())
}

/// `Π_{k=0}^N (2k+1)`.
fn odd_product(n: u32) -> BigInt {
    (0..=n as u64).map(|k| BigInt::from(2 * k + 1)).product()
}

/// Frequencies `β_σ` with `σ₀ = +1` (the mirrored half pairs up) and signs
/// `ε_σ = Π σ_k`, as exact rationals.
fn frequencies(n: u32) -> Vec<(BigRational, i32)> {
    let a: Vec<BigRational> =
        (0..=n as i64).map(|k| BigRational::new(BigInt::one(), BigInt::from(2 * k + 1))).collect();
    (0u64..1 << n)
        .map(|mask| {
            let mut beta = a[0].clone();
            let mut eps = 1;
            for (k, ak) in a.iter().enumerate().skip(1) {
                if mask >> (k - 1) & 1 == 1 {
                    beta -= ak;
                    eps = -eps;
                } else {
                    beta += ak;
                }
            }
            (beta, eps)
        })
        .collect()
}

fn rational_to_real(q: &BigRational, bits: u32) -> BigReal {
    BigReal::from_bigint(q.numer().clone(), bits) / BigReal::from_bigint(q.denom().clone(), bits)
}

/// `Π sin(a_k x) = K Σ_σ ε_σ trig(β_σ x)` with `trig = cos` for even `m`,
/// `sin` for odd `m`; returns `(K·2^(m−1), uses_cos)` as a sign and flag:
/// `K = s · 2^(1−m)`.
fn expansion_sign(m: u32) -> (i64, bool) {
    if m.is_multiple_of(2) {
        (if (m / 2).is_multiple_of(2) { 1 } else { -1 }, true)
    } else {
        (if ((m - 1) / 2).is_multiple_of(2) { 1 } else { -1 }, false)
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k as u64).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

/// `1 − e^(−u)` without cancellation for small `u`.
fn one_minus_exp_neg(u: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if u.to_f64() < 0.5 {
        let half = u.mul_pow2(-1);
        let (s, _) = sinh_cosh(&half, ctx)?;
        Ok(s.mul_pow2(1) * exp(&-half, ctx)?)
    } else {
        Ok(BigReal::one(ctx.bits()) - exp(&-u, ctx)?)
    }
}

/// `Σ_{n>M} trig(nβ)/n^m` through its Laplace representation. Returns the
/// value and the quadrature error estimate.
fn discrete_tail(
    beta: &BigReal,
    m: u32,
    big_m: u64,
    use_cos: bool,
    quad: &DeIntegrator,
    eps: &BigReal,
    ctx: &PrecisionContext,
) -> Result<(BigReal, BigReal)> {
    let bits = ctx.bits();
    let (s1, c1) = sin_cos(&beta.mul_int(big_m as i64 + 1), ctx)?;
    let (s0, c0) = sin_cos(&beta.mul_int(big_m as i64), ctx)?;
    let (sh, _) = sin_cos(&beta.mul_pow2(-1), ctx)?;
    let four_sin2 = sh.square().mul_pow2(2);
    let (top1, top0) = if use_cos { (c1, c0) } else { (s1, s0) };
    let mm = BigReal::from_i64(big_m as i64 + 1, bits);
    let f = |u: &BigReal| -> Result<BigReal> {
        // z = e^(−u); 1 − 2z cos β + z² = (1 − z)² + 4z sin²(β/2)
        let z = exp(&-u, ctx)?;
        let d = one_minus_exp_neg(u, ctx)?;
        let den = d.square() + &z * &four_sin2;
        let num = &top1 - &(&z * &top0);
        let decay = exp(&-(u * &mm), ctx)?;
        Ok(u.powi(m as i64 - 1) * decay * num / den)
    };
    let zero = BigReal::zero(bits);
    let r = quad.integrate(f, &zero, None, eps)?.require_converged()?;
    let fact = BigReal::from_bigint(factorial(m - 1), bits);
    Ok((r.value / &fact, r.error_estimate / fact))
}

/// `∫_T^∞ trig(βx)/x^m dx` through its Laplace representation.
fn continuous_tail(
    beta: &BigReal,
    m: u32,
    t: i64,
    use_cos: bool,
    quad: &DeIntegrator,
    eps: &BigReal,
    ctx: &PrecisionContext,
) -> Result<(BigReal, BigReal)> {
    let bits = ctx.bits();
    let tt = BigReal::from_i64(t, bits);
    let (sbt, cbt) = sin_cos(&(beta * &tt), ctx)?;
    let b2 = beta.square();
    // Re / Im of e^(iβT)(u + iβ)
    let f = |u: &BigReal| -> Result<BigReal> {
        let num = if use_cos { u * &cbt - beta * &sbt } else { u * &sbt + beta * &cbt };
        let den = u.square() + &b2;
        let decay = exp(&-(u * &tt), ctx)?;
        Ok(u.powi(m as i64 - 1) * decay * num / den)
    };
    let zero = BigReal::zero(bits);
    let r = quad.integrate(f, &zero, None, eps)?.require_converged()?;
    let fact = BigReal::from_bigint(factorial(m - 1), bits);
    Ok((r.value / &fact, r.error_estimate / fact))
}

/// Sum over frequencies of `ε_σ · tail(β_σ)`, scaled to `Σ_{n>M} Π sinc`
/// (or the integral analogue).
fn expanded_tail<F>(n: u32, ctx: &PrecisionContext, eps: &BigReal, mut tail: F) -> Result<(BigReal, BigReal)>
where
    F: FnMut(&BigReal, bool, &BigReal) -> Result<(BigReal, BigReal)>,
{
    let bits = ctx.bits();
    let m = n + 1;
    let (sign, use_cos) = expansion_sign(m);
    let freqs = frequencies(n);
    // K = sign · C · 2^(1−m)
    let weight = BigReal::from_bigint(odd_product(n), bits).mul_pow2(1 - m as i64).mul_int(sign);
    let per_term = (eps / &weight.abs()).mul_pow2(-(n as i64) - 2);
    let mut total = BigReal::zero(bits);
    let mut err = BigReal::zero(bits);
    for (beta_q, e) in &freqs {
        let beta = rational_to_real(beta_q, bits);
        let (v, ve) = tail(&beta, use_cos, &per_term)?;
        total = if *e > 0 { total + v } else { total - v };
        err = err + ve;
    }
    Ok((&total * &weight, (&err * &weight).abs()))
}

/// Explicit `Σ_{n=1}^{M} Π_k sinc(n a_k)`, with `sin(n a_k)` by the Chebyshev
/// recurrence.
fn partial_sum(n: u32, big_m: u64, ctx: &PrecisionContext) -> Result<BigReal> {
    let wide = ctx.with_extra_bits(GUARD_BITS);
    let bits = wide.bits();
    let mut prev = Vec::new();
    let mut cur = Vec::new();
    let mut two_cos = Vec::new();
    for k in 0..=n as i64 {
        let a = BigReal::from_ratio(1, 2 * k + 1, bits)?;
        let (s, c) = sin_cos(&a, &wide)?;
        prev.push(BigReal::zero(bits));
        cur.push(s);
        two_cos.push(c.mul_pow2(1));
    }
    let c = BigReal::from_bigint(odd_product(n), bits);
    let m = n as i64 + 1;
    let mut sum = BigReal::zero(bits);
    for j in 1..=big_m {
        let mut prod = c.clone();
        for s in &cur {
            prod = &prod * s;
        }
        let jm = BigReal::from_bigint(num_traits::pow(BigInt::from(j), m as usize), bits);
        sum = sum + prod / jm;
        for k in 0..cur.len() {
            let next = &two_cos[k] * &cur[k] - &prev[k];
            prev[k] = std::mem::replace(&mut cur[k], next);
        }
    }
    Ok(sum.round_to(ctx.bits()))
}

/// Terms needed for `C/((m−1) M^(m−1)) ≤ eps`.
fn envelope_terms(n: u32, eps: &BigReal) -> f64 {
    let m = n as f64 + 1.0;
    let log2_c: f64 = (0..=n).map(|k| ((2 * k + 1) as f64).log2()).sum();
    let log2_need = log2_c - (m - 1.0).log2() - eps.log2_abs_f64();
    (log2_need / (m - 1.0)).exp2().ceil()
}

/// `Σ_{n>M} C/n^m ≤ C/((m−1) M^(m−1))`.
fn envelope_bound(n: u32, big_m: u64, bits: u32) -> BigReal {
    let m = n as i64 + 1;
    let c = BigReal::from_bigint(odd_product(n), bits);
    let den = BigReal::from_bigint(num_traits::pow(BigInt::from(big_m), (m - 1) as usize), bits).mul_int(m - 1);
    c / den
}

/// `½ + Σ_{n≥1} Π_{k=0}^N sinc(n/(2k+1))` within `eps`.
pub fn sinc_sum(n: u32, eps: &BigReal, ctx: &PrecisionContext) -> Result<SideValue> {
    check_n(n)?;
    let bits = ctx.bits();
    let half = BigReal::one(bits).mul_pow2(-1);
    let need = envelope_terms(n, eps);
    if need <= DIRECT_SUM_LIMIT as f64 {
        let big_m = (need as u64).max(1);
        let s = partial_sum(n, big_m, ctx)?;
        return Ok(SideValue {
            value: s + half,
            tail_bound: envelope_bound(n, big_m, bits),
            cutoff: big_m,
            analytic_tail: false,
        });
    }
    let wide = ctx.with_extra_bits(GUARD_BITS / 2);
    let quad = DeIntegrator::exp_sinh(&wide, QuadOptions::default());
    let s = partial_sum(n, PARTIAL_TERMS, ctx)?;
    let (tail, err) = expanded_tail(n, &wide, &eps.mul_pow2(-1), |beta, use_cos, e| {
        discrete_tail(beta, n + 1, PARTIAL_TERMS, use_cos, &quad, e, &wide)
    })?;
    Ok(SideValue {
        value: (s + tail + half).round_to(bits),
        tail_bound: err,
        cutoff: PARTIAL_TERMS,
        analytic_tail: true,
    })
}

/// `Π_k sinc(x a_k)`.
pub fn sinc_product(n: u32, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let mut p = BigReal::one(ctx.bits());
    for k in 0..=n as i64 {
        p = p * sinc(&x.div_int(2 * k + 1), ctx)?;
    }
    Ok(p)
}

/// `∫₀^∞ Π_{k=0}^N sinc(x/(2k+1)) dx` within `eps`: tanh-sinh panels on
/// `[0, T]` plus the exact tail beyond `T`.
pub fn sinc_integral(n: u32, eps: &BigReal, ctx: &PrecisionContext) -> Result<SideValue> {
    check_n(n)?;
    let bits = ctx.bits();
    let wide = ctx.with_extra_bits(GUARD_BITS / 2);
    let panels = FINITE_RANGE / PANEL;
    let panel_eps = eps.div_int(4 * panels);
    let mut finite = BigReal::zero(wide.bits());
    let mut finite_err = BigReal::zero(wide.bits());
    for p in 0..panels {
        let a = BigReal::from_i64(p * PANEL, wide.bits());
        let b = BigReal::from_i64((p + 1) * PANEL, wide.bits());
        let r = integrate_finite(|x| sinc_product(n, x, &wide), &a, &b, &panel_eps, &wide)?.require_converged()?;
        finite = finite + r.value;
        finite_err = finite_err + r.error_estimate;
    }
    let quad = DeIntegrator::exp_sinh(&wide, QuadOptions::default());
    let (tail, err) = expanded_tail(n, &wide, &eps.mul_pow2(-1), |beta, use_cos, e| {
        continuous_tail(beta, n + 1, FINITE_RANGE, use_cos, &quad, e, &wide)
    })?;
    Ok(SideValue {
        value: (finite + tail).round_to(bits),
        tail_bound: err + finite_err,
        cutoff: FINITE_RANGE as u64,
        analytic_tail: true,
    })
}

/// Both sides for one `N`.
pub fn sinc_identity(n: u32, eps: &BigReal, ctx: &PrecisionContext) -> Result<SincIdentityReport> {
    let lhs = sinc_sum(n, eps, ctx)?;
    let rhs = sinc_integral(n, eps, ctx)?;
    Ok(SincIdentityReport {
        n,
        difference: &lhs.value - &rhs.value,
        truncation_bound: lhs.tail_bound,
        lhs: lhs.value,
        rhs: rhs.value,
    })
}

/// Smallest `N` with `Σ_{k=0}^N 1/(2k+1) > threshold`.
///
/// A [`BigReal`] is a dyadic rational, so the comparison is against its exact
/// value; see [`threshold_scan_rational`].
pub fn threshold_scan(threshold: &BigReal, ctx: &PrecisionContext) -> Result<u64> {
    let m = BigRational::from_integer(threshold.mantissa().clone());
    let e = threshold.exponent();
    let two = BigRational::from_integer(BigInt::from(2));
    let q = if e >= 0 { m * num_traits::pow(two, e as usize) } else { m / num_traits::pow(two, (-e) as usize) };
    threshold_scan_rational(&q, ctx)
}

/// Smallest `N` with `Σ_{k=0}^N 1/(2k+1) > q`.
///
/// The partial sums are accumulated in fixed point with floor division,
/// which pins them down to `N+1` units of the last place. A step the bounds
/// cannot decide is settled with the exact rational partial sum.
pub fn threshold_scan_rational(q: &BigRational, ctx: &PrecisionContext) -> Result<u64> {
    if q <= &BigRational::one() {
        return Err(Error::InvalidInput(format!("threshold must exceed 1, got {q}")));
    }
    // Σ ≈ ½ ln(2N+1) + γ/2 + ln 2
    let qf = rational_to_real(q, 64).to_f64();
    let est = ((qf - 0.98) * 2.0).exp() / 2.0;
    if est.is_nan() || est >= 1e9 {
        return Err(Error::InvalidInput(format!("threshold {qf} needs about {est:.3e} terms")));
    }
    let w = ctx.bits() + GUARD_BITS;
    let thr_lo = (q.numer() << w as usize).div_floor(q.denom());
    let thr_hi = &thr_lo + 1;
    let one = BigInt::one() << w as usize;
    let mut lo = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        lo += &one / BigInt::from(2 * k + 1);
        let hi = &lo + BigInt::from(k + 1);
        if lo > thr_hi {
            return Ok(k);
        }
        if hi > thr_lo {
            let exact: BigRational =
                (0..=k).map(|j| BigRational::new(BigInt::one(), BigInt::from(2 * j + 1))).sum();
            if &exact > q {
                return Ok(k);
            }
        }
        k += 1;
    }
}

/// `threshold_scan` at the default threshold `2π`.
pub fn breakdown_index(ctx: &PrecisionContext) -> Result<u64> {
    let wide = ctx.with_extra_bits(GUARD_BITS);
    threshold_scan(&pi(&wide).mul_pow2(1), ctx)
}

/// Σ_{k=0}^N 1/(2k+1), for reports.
pub fn frequency_sum(n: u64, ctx: &PrecisionContext) -> BigReal {
    let w = ctx.bits() + GUARD_BITS;
    let one = BigInt::one() << w as usize;
    let s: BigInt = (0..=n).map(|k| &one / BigInt::from(2 * k + 1)).sum();
    BigReal::from_fixed(s, w, ctx.bits())
}
