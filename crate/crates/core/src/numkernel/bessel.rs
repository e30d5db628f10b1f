//! Modified Bessel function of the second kind, order zero.
//!
//! Two evaluation routes:
//!
//! * the ascending series
//!   `K₀(t) = −(ln(t/2) + γ) I₀(t) + Σ_{k≥1} (t²/4)^k / (k!)² · H_k`,
//!   which cancels about `2t / ln 2` bits and is therefore evaluated with that
//!   many extra bits;
//! * the Hankel asymptotic expansion
//!   `K₀(t) ~ √(π/2t) e^(−t) Σ (−1)^k ((2k−1)!!)² / (k! (8t)^k)`,
//!   whose smallest term is about `e^(−2t)` relative, used once `t` is large
//!   enough for that to drop below the working precision.
//!
//! [`bessel_k0_integral`] evaluates `∫₀^∞ e^(−t cosh u) du` with the
//! trapezoidal rule and serves as an independent check of both.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::bigreal::BigReal;
use super::constants::euler_gamma;
use super::context::PrecisionContext;
use super::elementary::{exp, ln, pi_fixed, sqrt};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 32;

/// The asymptotic expansion is used when `t ≥ K0_ASYMPTOTIC_SWITCH · w`,
/// `w` the working precision in bits. Its smallest term is roughly
/// `e^(−2t)`, so `2t·log₂e ≥ w` is the bare minimum (factor 0.347); the
/// extra margin keeps the truncation error well below one ulp.
pub const K0_ASYMPTOTIC_SWITCH: f64 = 0.40;

fn check_positive(t: &BigReal) -> Result<()> {
    if !t.is_positive() {
        return Err(Error::NonPositiveArgument(format!("K0 argument {t}")));
    }
    Ok(())
}

fn uses_asymptotic(t: &BigReal, w: u32) -> bool {
    t.to_f64() >= K0_ASYMPTOTIC_SWITCH * w as f64
}

/// K₀(t) for `t > 0`, relative accuracy `ctx.target_digits()`.
///
/// Values are never flushed to zero: the exponent range of [`BigReal`] covers
/// `e^(−t)` for any `t` representable here. Use [`bessel_k0_ln`] when only
/// `ln K₀` is needed (e.g. for high powers).
pub fn bessel_k0(t: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    K0Evaluator::new(ctx)?.value(t)
}

/// ln K₀(t), computed without forming `e^(−t)` on the asymptotic branch.
pub fn bessel_k0_ln(t: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    K0Evaluator::new(ctx)?.ln_value(t)
}

/// K₀ by the ascending series alone (any `t > 0`; cost grows with `t`).
pub fn bessel_k0_series(t: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    check_positive(t)?;
    let cancel = series_cancellation_bits(t);
    let gamma = euler_gamma(&ctx.with_extra_bits(GUARD_BITS + cancel))?;
    k0_series(t, ctx, &gamma)
}

/// Repeated K₀ evaluations at one precision, sharing γ across calls.
#[derive(Debug, Clone)]
pub struct K0Evaluator {
    ctx: PrecisionContext,
    gamma: BigReal,
}

impl K0Evaluator {
    pub fn new(ctx: &PrecisionContext) -> Result<Self> {
        // the series branch runs at most up to the switch point, where it
        // needs about 1.16·w extra bits
        let w = ctx.bits() + GUARD_BITS;
        let most = (2.0 * K0_ASYMPTOTIC_SWITCH * w as f64 * std::f64::consts::LOG2_E).ceil() as u32;
        let gamma = euler_gamma(&ctx.with_extra_bits(2 * GUARD_BITS + most + 8))?;
        Ok(Self { ctx: *ctx, gamma })
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn value(&self, t: &BigReal) -> Result<BigReal> {
        check_positive(t)?;
        let ctx = &self.ctx;
        let w = ctx.bits() + GUARD_BITS;
        if uses_asymptotic(t, w) {
            let (scaled, _) = k0_asymptotic_scaled(t, ctx)?;
            let wide = ctx.with_extra_bits(GUARD_BITS);
            let decay = exp(&-t.round_to(wide.bits()), &wide)?;
            Ok((scaled * decay).round_to(ctx.bits()))
        } else {
            k0_series(t, ctx, &self.gamma)
        }
    }

    pub fn ln_value(&self, t: &BigReal) -> Result<BigReal> {
        check_positive(t)?;
        let ctx = &self.ctx;
        let w = ctx.bits() + GUARD_BITS;
        let wide = ctx.with_extra_bits(GUARD_BITS);
        if uses_asymptotic(t, w) {
            let (scaled, _) = k0_asymptotic_scaled(t, &wide)?;
            let l = ln(&scaled, &wide)? - t;
            Ok(l.round_to(ctx.bits()))
        } else {
            let v = k0_series(t, &wide, &self.gamma)?;
            ln(&v, ctx)
        }
    }
}

fn series_cancellation_bits(t: &BigReal) -> u32 {
    (2.0 * t.to_f64().max(0.0) * std::f64::consts::LOG2_E).ceil() as u32
}

fn k0_series(t: &BigReal, ctx: &PrecisionContext, gamma: &BigReal) -> Result<BigReal> {
    let tf = t.to_f64();
    let cancel = series_cancellation_bits(t);
    let w = ctx.bits() + GUARD_BITS + cancel;
    if gamma.bits() < w {
        return Err(Error::PrecisionUnachievable(format!(
            "K0 series at t = {tf} needs γ to {w} bits"
        )));
    }
    let wctx = PrecisionContext::from_bits(w);
    let half_t = t.round_to(w.max(t.bits())).mul_pow2(-1);
    let gamma = gamma.round_to(w);
    let log_term = (ln(&half_t, &wctx)? + gamma).to_fixed(w);
    let x = (&half_t * &half_t).to_fixed(w);

    let one = BigInt::one() << w as usize;
    let mut term = one.clone(); // (t²/4)^k / (k!)²
    let mut harmonic = BigInt::zero(); // H_k in fixed point
    let mut i0 = one;
    let mut s = BigInt::zero();
    let mut k: u64 = 1;
    let mut peaked = false;
    loop {
        let kk = BigInt::from(k);
        let prev = term.clone();
        term = ((&term * &x) >> w as usize) / (&kk * &kk);
        harmonic += (BigInt::one() << w as usize) / &kk;
        if term < prev {
            peaked = true;
        }
        if term.is_zero() && peaked {
            break;
        }
        i0 += &term;
        s += (&term * &harmonic) >> w as usize;
        k += 1;
        if k > 100_000 + 4 * w as u64 {
            return Err(Error::PrecisionUnachievable(format!(
                "K0 series did not converge for t = {tf}"
            )));
        }
    }
    let val = s - ((&log_term * &i0) >> w as usize);
    if !val.is_positive() {
        return Err(Error::PrecisionUnachievable(format!(
            "K0 series lost all precision at t = {tf}"
        )));
    }
    Ok(BigReal::from_fixed(val, w, ctx.bits()))
}

/// `e^t K₀(t)` from the asymptotic expansion, plus the number of terms used.
fn k0_asymptotic_scaled(t: &BigReal, ctx: &PrecisionContext) -> Result<(BigReal, u64)> {
    let w = ctx.bits() + GUARD_BITS;
    let tw = t.round_to(w.max(t.bits()));
    // 1/(8t) in fixed point
    let inv8t = BigReal::one(w).div(&tw.mul_int(8)).to_fixed(w);
    let one = BigInt::one() << w as usize;
    let mut term = one.clone();
    let mut sum = one;
    let tf = t.to_f64();
    let mut k: u64 = 0;
    loop {
        // term_{k+1} = -term_k (2k+1)² / ((k+1) 8t)
        let num = BigInt::from((2 * k + 1) * (2 * k + 1));
        // truncate toward zero so the terms really reach zero
        let prod = &term * &inv8t;
        let scaled = if prod.is_negative() { -((-prod) >> w as usize) } else { prod >> w as usize };
        let next = -(scaled * num) / BigInt::from(k + 1);
        let ratio = ((2 * k + 1) as f64).powi(2) / ((k + 1) as f64 * 8.0 * tf);
        if ratio >= 1.0 {
            // smallest term reached before the precision target
            return Err(Error::PrecisionUnachievable(format!(
                "K0 asymptotic expansion diverges before reaching 2^-{w} at t = {tf}"
            )));
        }
        term = next;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    let wctx = PrecisionContext::from_bits(w);
    // √(π / 2t)
    let pi = BigReal::from_fixed(pi_fixed(w), w, w);
    let pref = sqrt(&(pi / tw.mul_int(2)), &wctx)?;
    let s = BigReal::from_fixed(sum, w, w);
    Ok(((pref * s).round_to(ctx.bits()), k))
}

/// K₀ by the asymptotic expansion alone; fails when `t` is too small for the
/// expansion to reach the requested precision.
pub fn bessel_k0_asymptotic(t: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    check_positive(t)?;
    let wide = ctx.with_extra_bits(GUARD_BITS);
    let (scaled, _) = k0_asymptotic_scaled(t, &wide)?;
    let decay = exp(&-t.round_to(wide.bits()), &wide)?;
    Ok((scaled * decay).round_to(ctx.bits()))
}

/// K₀ from `∫₀^∞ exp(−t cosh u) du` by the trapezoidal rule, which converges
/// geometrically in the step for this analytic, rapidly decaying integrand.
pub fn bessel_k0_integral(t: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    check_positive(t)?;
    let w = ctx.bits() + GUARD_BITS;
    let wctx = PrecisionContext::from_bits(w);
    let tf = t.to_f64();
    // discretisation error ≈ 2 e^(0.293 t) e^(−π²/(2h)) relative, using the
    // strip |Im u| < π/4
    let budget = w as f64 * std::f64::consts::LN_2 + 0.3 * tf + 8.0;
    let h_f = std::f64::consts::PI.powi(2) / (2.0 * budget);
    // h = 2^-j style steps are not needed; use a dyadic-rational h for exact
    // node positions
    let denom: i64 = 1 << 20;
    let h = BigReal::from_ratio((h_f * denom as f64).floor() as i64, denom, w)?;
    let tw = t.round_to(w.max(t.bits()));
    let eh = exp(&h, &wctx)?;
    let mut e_u = BigReal::one(w);
    let mut total = BigReal::zero(w);
    let mut first: Option<BigReal> = None;
    let mut j: u64 = 0;
    loop {
        let cosh = (&e_u + e_u.recip()).mul_pow2(-1);
        let f = exp(&-(&tw * &cosh), &wctx)?;
        if j == 0 {
            total = f.mul_pow2(-1);
            first = Some(f.clone());
        } else {
            if let Some(f0) = &first {
                if f.magnitude_exp() < f0.magnitude_exp() - w as i64 - 4 {
                    break;
                }
            }
            total = total + &f;
        }
        e_u = &e_u * &eh;
        j += 1;
        if j > 10_000_000 {
            return Err(Error::PrecisionUnachievable("K0 integral did not terminate".into()));
        }
    }
    Ok((total * h).round_to(ctx.bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::elementary::agree_to_bits;

    fn bt(s: &str, ctx: &PrecisionContext) -> BigReal {
        BigReal::parse_decimal(s, ctx.bits()).unwrap()
    }

    #[test]
    fn k0_at_one() {
        let ctx = PrecisionContext::new(20);
        let v = bessel_k0(&bt("1", &ctx), &ctx).unwrap();
        assert_eq!(v.to_string_digits(20), "0.42102443824070833334");
    }

    #[test]
    fn k0_small_argument_log_asymptotic() {
        let ctx = PrecisionContext::new(30);
        let t = bt("1e-8", &ctx);
        let k0 = bessel_k0(&t, &ctx).unwrap();
        let g = euler_gamma(&ctx).unwrap();
        let l = ln(&bt("5e-9", &ctx), &ctx).unwrap();
        let resid = (k0 + l + g).abs().to_f64();
        assert!(resid < 1e-14, "residual {resid}");
    }

    #[test]
    fn k0_at_fifty_ratio() {
        let ctx = PrecisionContext::new(30);
        let t = bt("50", &ctx);
        let k0 = bessel_k0(&t, &ctx).unwrap();
        let pi = crate::numkernel::pi(&ctx);
        let approx = sqrt(&(pi / BigReal::from_i64(100, ctx.bits())), &ctx).unwrap()
            * exp(&-t.clone(), &ctx).unwrap();
        let ratio = (k0 / approx).to_f64();
        assert!(ratio > 0.99 && ratio < 1.0, "ratio {ratio}");
    }

    #[test]
    fn routes_agree() {
        let ctx = PrecisionContext::new(30);
        for s in ["0.1", "1", "5", "20"] {
            let t = bt(s, &ctx);
            let a = bessel_k0_series(&t, &ctx).unwrap();
            let b = bessel_k0_integral(&t, &ctx).unwrap();
            assert!(agree_to_bits(&a, &b, ctx.bits() as i64 - 40 + b.magnitude_exp().min(0)), "t = {s}: {a} vs {b}");
            assert_eq!(a.to_string_digits(30), b.to_string_digits(30), "t = {s}");
        }
    }

    #[test]
    fn asymptotic_branch_matches_series() {
        let ctx = PrecisionContext::new(20);
        let t = bt("80", &ctx);
        let a = bessel_k0_asymptotic(&t, &ctx).unwrap();
        let s = bessel_k0_series(&t, &ctx).unwrap();
        assert_eq!(a.to_string_digits(20), s.to_string_digits(20));
        assert!(bessel_k0_asymptotic(&bt("1", &ctx), &ctx).is_err());
    }

    #[test]
    fn log_form_matches() {
        let ctx = PrecisionContext::new(25);
        for s in ["0.5", "3", "200"] {
            let t = bt(s, &ctx);
            let l = bessel_k0_ln(&t, &ctx).unwrap();
            let v = bessel_k0(&t, &ctx).unwrap();
            let l2 = ln(&v, &ctx).unwrap();
            assert_eq!(l.to_string_digits(22), l2.to_string_digits(22), "t = {s}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        let ctx = PrecisionContext::new(10);
        assert!(matches!(
            bessel_k0(&BigReal::zero(64), &ctx),
            Err(Error::NonPositiveArgument(_))
        ));
        assert!(bessel_k0(&BigReal::from_i64(-1, 64), &ctx).is_err());
    }
}
