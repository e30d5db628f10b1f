//! exp, ln, sqrt, n-th root, sin, cos and real powers on [`BigReal`].
//!
//! Series are summed in fixed point (`BigInt` scaled by `2^w`) at a few dozen
//! guard bits above the context, then rounded once.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::bigreal::BigReal;
use super::context::PrecisionContext;
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 40;

/// The elementary operations exposed through [`elementary`].
#[derive(Debug, Clone, PartialEq)]
pub enum Elementary {
    Exp,
    Ln,
    Sqrt,
    NthRoot(u32),
    Sin,
    Cos,
    /// `x^y` for `x > 0` (or integral `y`).
    Power(BigReal),
}

/// Dispatches one elementary function, rounding to `ctx.bits()`.
pub fn elementary(op: &Elementary, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    match op {
        Elementary::Exp => exp(x, ctx),
        Elementary::Ln => ln(x, ctx),
        Elementary::Sqrt => sqrt(x, ctx),
        Elementary::NthRoot(n) => nth_root(x, *n, ctx),
        Elementary::Sin => sin(x, ctx),
        Elementary::Cos => cos(x, ctx),
        Elementary::Power(y) => pow(x, y, ctx),
    }
}

/// Σ_{k≥0} (-1)^k / ((2k+1) q^(2k+1)) or its non-alternating twin, in
/// fixed point with `w` fractional bits.
fn arctan_like_recip(q: u64, w: u32, alternating: bool) -> BigInt {
    let q2 = BigInt::from(q) * BigInt::from(q);
    let mut power = (BigInt::one() << w as usize) / BigInt::from(q);
    let mut sum = power.clone();
    let mut k: u64 = 1;
    loop {
        power /= &q2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if alternating && k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// π in fixed point, `w` fractional bits (Machin's formula).
pub(crate) fn pi_fixed(w: u32) -> BigInt {
    let wg = w + 16;
    let v = arctan_like_recip(5, wg, true) * 16 - arctan_like_recip(239, wg, true) * 4;
    v >> 16usize
}

/// ln 2 in fixed point, `w` fractional bits.
pub(crate) fn ln2_fixed(w: u32) -> BigInt {
    let wg = w + 16;
    // ln 2 = 18 atanh(1/26) - 2 atanh(1/4801) + 8 atanh(1/8749)
    let v = arctan_like_recip(26, wg, false) * 18 - arctan_like_recip(4801, wg, false) * 2
        + arctan_like_recip(8749, wg, false) * 8;
    v >> 16usize
}

/// π rounded to the context.
pub fn pi(ctx: &PrecisionContext) -> BigReal {
    let w = ctx.bits() + GUARD_BITS;
    BigReal::from_fixed(pi_fixed(w), w, ctx.bits())
}

pub fn ln2(ctx: &PrecisionContext) -> BigReal {
    let w = ctx.bits() + GUARD_BITS;
    BigReal::from_fixed(ln2_fixed(w), w, ctx.bits())
}

fn mul_fixed(a: &BigInt, b: &BigInt, w: u32) -> BigInt {
    (a * b) >> w as usize
}

/// e^r for |r| ≲ 1 given in fixed point; result in fixed point.
fn exp_fixed_small(r: &BigInt, w: u32) -> BigInt {
    // halve the argument s times, then square back
    let s = ((w as f64).sqrt() / 2.0) as u32 + 1;
    let ws = w + s + 8;
    let rr = (r << (ws - w) as usize) >> s as usize;
    let one = BigInt::one() << ws as usize;
    let mut sum = one.clone();
    let mut term = one;
    let mut k: i64 = 1;
    loop {
        term = mul_fixed(&term, &rr, ws) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..s {
        sum = mul_fixed(&sum, &sum, ws);
    }
    sum >> (ws - w) as usize
}

/// e^x.
pub fn exp(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let bits = ctx.bits();
    if x.is_zero() {
        return Ok(BigReal::one(bits));
    }
    let mag = x.magnitude_exp();
    if mag > 62 {
        return Err(Error::PrecisionUnachievable(format!(
            "exp argument too large in magnitude ({})",
            x.to_f64()
        )));
    }
    if mag < -(bits as i64) - 8 {
        // 1 + x with x below half an ulp
        return Ok((BigReal::one(bits + 8) + x).round_to(bits));
    }
    let int_bits = mag.max(0) as u32;
    let w = bits + GUARD_BITS + int_bits;
    let ln2 = BigReal::from_fixed(ln2_fixed(w + 8), w + 8, w + 8);
    let n = (x.round_to(w + 8) / &ln2).round_to_bigint();
    let r = x.round_to(w + 8) - ln2.mul_bigint(&n);
    let rf = r.to_fixed(w);
    let v = exp_fixed_small(&rf, w);
    let n_i64: i64 = n.try_into().map_err(|_| Error::PrecisionUnachievable("exp exponent overflow".into()))?;
    Ok(BigReal::from_parts(v, n_i64 - w as i64, bits))
}

/// Natural logarithm, `x > 0`.
pub fn ln(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if !x.is_positive() {
        return Err(Error::DomainViolation {
            op: "ln",
            detail: format!("argument must be positive, got {x}"),
        });
    }
    let bits = ctx.bits();
    // x = m · 2^e with m in [1/√2, √2)
    let top = x.magnitude_exp();
    let mut e = top - 1;
    let mut m = x.mul_pow2(-e);
    // m now in [1, 2)
    let sqrt2 = std::f64::consts::SQRT_2;
    if m.to_f64() >= sqrt2 {
        e += 1;
        m = m.mul_pow2(-1);
    }
    let one = BigReal::one(8);
    let d = &m - &one;
    if d.is_zero() && e == 0 {
        return Ok(BigReal::zero(bits));
    }
    // extra bits so that z keeps full relative precision when m ≈ 1
    let lead = if d.is_zero() { 0 } else { (-d.magnitude_exp()).max(0) as u32 };
    let w = bits + GUARD_BITS + lead;
    let mw = m.round_to(w.max(m.bits()) + 2);
    let z = d.round_to(w) / (&mw + &one);
    // atanh(z)/z = Σ z^(2k)/(2k+1) in fixed point
    let z2 = (&z * &z).to_fixed(w);
    let mut power = BigInt::one() << w as usize;
    let mut series = power.clone();
    let mut k: i64 = 1;
    loop {
        power = mul_fixed(&power, &z2, w);
        if power.is_zero() {
            break;
        }
        series += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    let log_m = BigReal::from_fixed(series, w, w).mul(&z).mul_pow2(1);
    if e == 0 {
        return Ok(log_m.round_to(bits));
    }
    let eb = 64 - e.unsigned_abs().leading_zeros();
    let wl = w + eb;
    let ln2 = BigReal::from_fixed(ln2_fixed(wl), wl, wl);
    Ok((ln2.mul_int(e) + log_m).round_to(bits))
}

pub fn sqrt(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if x.is_negative() {
        return Err(Error::DomainViolation {
            op: "sqrt",
            detail: format!("argument must be nonnegative, got {x}"),
        });
    }
    x.round_to(x.bits().max(ctx.bits())).sqrt().map(|v| v.round_to(ctx.bits()))
}

pub fn nth_root(x: &BigReal, n: u32, ctx: &PrecisionContext) -> Result<BigReal> {
    x.round_to(x.bits().max(ctx.bits()))
        .nth_root(n)
        .map(|v| v.round_to(ctx.bits()))
}

/// `x^y`; `x > 0`, or any `x` when `y` is an integer.
pub fn pow(x: &BigReal, y: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if y.is_integer() {
        if let Ok(n) = i64::try_from(y.floor()) {
            if x.is_zero() && n < 0 {
                return Err(Error::DomainViolation {
                    op: "pow",
                    detail: "zero to a negative power".into(),
                });
            }
            return Ok(x.round_to(ctx.bits()).powi(n));
        }
    }
    if !x.is_positive() {
        return Err(Error::DomainViolation {
            op: "pow",
            detail: format!("non-integral power of nonpositive base {x}"),
        });
    }
    let mag = (y.to_f64() * x.log2_abs_f64()).abs().log2().max(0.0).ceil() as u32;
    let wide = ctx.with_extra_bits(mag + 8);
    let l = ln(x, &wide)?;
    exp(&(l * y).round_to(wide.bits()), ctx)
}

/// Reduces `x` modulo π/2: returns `(r, q mod 4)` with `x = q·π/2 + r` and
/// `|r| ≤ π/4`, `r` carrying at least `bits + GUARD_BITS` relative bits.
fn reduce_half_pi(x: &BigReal, bits: u32) -> (BigReal, u8) {
    let mut extra = 0u32;
    loop {
        let int_bits = x.magnitude_exp().max(0) as u32;
        let w = bits + GUARD_BITS + int_bits + extra + 8;
        let half_pi = BigReal::from_fixed(pi_fixed(w), w + 1, w);
        let xw = x.round_to(x.bits().max(w));
        let q = (&xw / &half_pi).round_to_bigint();
        let r = xw - half_pi.mul_bigint(&q);
        let lost = if r.is_zero() {
            w
        } else {
            (-r.magnitude_exp()).max(0) as u32
        };
        if lost + bits + GUARD_BITS / 2 <= w - int_bits || extra > 4 * bits + 4096 {
            let q4 = q.mod_floor_u8();
            return (r, q4);
        }
        extra = lost + 16;
    }
}

trait ModFour {
    fn mod_floor_u8(&self) -> u8;
}

impl ModFour for BigInt {
    fn mod_floor_u8(&self) -> u8 {
        let four = BigInt::from(4);
        let m = ((self % &four) + &four) % &four;
        u8::try_from(m).unwrap_or(0)
    }
}

/// sin(r)/r and cos(r) for |r| ≤ π/4 via Taylor series in fixed point.
fn sin_cos_small(r: &BigReal, w: u32) -> (BigReal, BigReal) {
    let r2 = (r * r).to_fixed(w);
    let one = BigInt::one() << w as usize;
    // sin(r)/r = Σ (-1)^k r^(2k)/(2k+1)!
    let mut term = one.clone();
    let mut s = one.clone();
    let mut k: i64 = 1;
    loop {
        term = mul_fixed(&term, &r2, w) / BigInt::from((2 * k) * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            s -= &term;
        } else {
            s += &term;
        }
        k += 1;
    }
    let mut term = one.clone();
    let mut c = one;
    let mut k: i64 = 1;
    loop {
        term = mul_fixed(&term, &r2, w) / BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            c -= &term;
        } else {
            c += &term;
        }
        k += 1;
    }
    (BigReal::from_fixed(s, w, w), BigReal::from_fixed(c, w, w))
}

pub fn sin(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    sin_cos(x, ctx).map(|(s, _)| s)
}

pub fn cos(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    sin_cos(x, ctx).map(|(_, c)| c)
}

/// Both sin(x) and cos(x) from a single argument reduction.
pub fn sin_cos(x: &BigReal, ctx: &PrecisionContext) -> Result<(BigReal, BigReal)> {
    let bits = ctx.bits();
    if x.is_zero() {
        return Ok((BigReal::zero(bits), BigReal::one(bits)));
    }
    if x.magnitude_exp() > 1 << 20 {
        return Err(Error::PrecisionUnachievable(
            "trigonometric argument too large to reduce".into(),
        ));
    }
    let (r, q) = reduce_half_pi(x, bits);
    let w = bits + GUARD_BITS;
    let (sinc_r, cos_r) = sin_cos_small(&r, w);
    let sin_r = sinc_r * &r;
    let (s, c) = match q {
        0 => (sin_r, cos_r),
        1 => (cos_r, -sin_r),
        2 => (-sin_r, -cos_r),
        _ => (-cos_r, sin_r),
    };
    Ok((s.round_to(bits), c.round_to(bits)))
}

/// sin(x)/x with the removable singularity filled in; small arguments use the
/// series directly so no cancellation occurs.
pub fn sinc(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let bits = ctx.bits();
    if x.is_zero() {
        return Ok(BigReal::one(bits));
    }
    if x.magnitude_exp() <= -1 {
        let (s, _) = sin_cos_small(x, bits + GUARD_BITS);
        return Ok(s.round_to(bits));
    }
    let wide = ctx.with_extra_bits(8);
    Ok((sin(x, &wide)? / x.round_to(wide.bits())).round_to(bits))
}

/// sinh and cosh together, from one exponential.
pub fn sinh_cosh(x: &BigReal, ctx: &PrecisionContext) -> Result<(BigReal, BigReal)> {
    let wide = ctx.with_extra_bits(16 + (-x.magnitude_exp()).clamp(0, 1 << 16) as u32);
    let e = exp(x, &wide)?;
    let ei = e.recip();
    let s = (&e - &ei).mul_pow2(-1);
    let c = (&e + &ei).mul_pow2(-1);
    Ok((s.round_to(ctx.bits()), c.round_to(ctx.bits())))
}

/// |a - b| ≤ 2^(-bits) · max(1, |b|): loose agreement test for tests and
/// convergence checks.
pub fn agree_to_bits(a: &BigReal, b: &BigReal, bits: i64) -> bool {
    let d = (a - b).abs();
    if d.is_zero() {
        return true;
    }
    let scale = b.magnitude_exp().max(1);
    d.magnitude_exp() <= scale - bits
}

/// 10^(-digits) as a BigReal at the context's precision.
pub fn ten_to_minus(digits: i64, ctx: &PrecisionContext) -> BigReal {
    BigReal::from_decimal_parts(BigInt::one(), -digits, ctx.bits())
}


#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d)
    }

    #[test]
    fn pi_and_ln2_digits() {
        let c = ctx(60);
        assert_eq!(
            pi(&c).to_string_digits(60),
            "3.14159265358979323846264338327950288419716939937510582097494"
        );
        assert_eq!(
            ln2(&c).to_string_digits(40),
            "0.6931471805599453094172321214581765680755"
        );
    }

    #[test]
    fn exp_of_zero_is_one() {
        assert_eq!(exp(&BigReal::zero(64), &ctx(30)).unwrap(), BigReal::one(64));
    }

    #[test]
    fn exp_ln_values() {
        let c = ctx(50);
        let one = BigReal::one(c.bits());
        let e = exp(&one, &c).unwrap();
        assert_eq!(
            e.to_string_digits(50),
            "2.7182818284590452353602874713526624977572470937000"
        );
        let l = ln(&e, &c).unwrap();
        assert!(agree_to_bits(&l, &one, c.bits() as i64 - 8));
        let ten = BigReal::from_i64(10, c.bits());
        assert_eq!(
            ln(&ten, &c).unwrap().to_string_digits(40),
            "2.302585092994045684017991454684364207601"
        );
        let small = BigReal::parse_decimal("-1e-30", c.bits()).unwrap();
        let em = exp(&small, &c).unwrap();
        assert!(em < one);
        let big = BigReal::from_i64(-300, c.bits());
        let v = exp(&big, &c).unwrap();
        assert_eq!(v.to_string_digits(20), "5.1482002224120137812e-131");
    }

    #[test]
    fn ln_near_one_keeps_relative_precision() {
        let c = ctx(40);
        let x = BigReal::parse_decimal("1.000000000000000000001", c.bits() + 100).unwrap();
        let l = ln(&x, &c).unwrap();
        // ln(1+d) = d - d²/2 + …, d = 1e-21
        assert_eq!(l.to_string_digits(30), "9.99999999999999999999500000000e-22");
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert!(ln(&BigReal::zero(64), &ctx(10)).is_err());
        assert!(ln(&BigReal::from_i64(-1, 64), &ctx(10)).is_err());
    }

    #[test]
    fn sqrt_identity() {
        let c = ctx(40);
        let two = BigReal::from_i64(2, c.bits());
        let s = sqrt(&two, &c).unwrap();
        let resid = (&s * &s - &two).abs();
        assert!(resid < ten_to_minus(c.target_digits() as i64 - 2, &c));
    }

    #[test]
    fn trig_values() {
        let c = ctx(40);
        let one = BigReal::one(c.bits());
        assert_eq!(
            sin(&one, &c).unwrap().to_string_digits(30),
            "0.841470984807896506652502321630"
        );
        assert_eq!(
            cos(&one, &c).unwrap().to_string_digits(30),
            "0.540302305868139717400936607443"
        );
        let x = BigReal::from_i64(1000, c.bits());
        assert_eq!(
            sin(&x, &c).unwrap().to_string_digits(25),
            "0.8268795405320025602558874"
        );
        let p = pi(&c);
        let s = sin(&p, &c).unwrap();
        assert!(s.abs() < ten_to_minus(c.target_digits() as i64 - 2, &c));
    }

    #[test]
    fn sinc_is_even_and_one_at_zero() {
        let c = ctx(30);
        assert_eq!(sinc(&BigReal::zero(64), &c).unwrap(), BigReal::one(64));
        let x = BigReal::parse_decimal("1.7", c.bits()).unwrap();
        assert_eq!(sinc(&x, &c).unwrap(), sinc(&-&x, &c).unwrap());
        let tiny = BigReal::parse_decimal("1e-12", c.bits()).unwrap();
        let v = sinc(&tiny, &c).unwrap();
        assert!(v < BigReal::one(64));
    }

    #[test]
    fn power_and_roots() {
        let c = ctx(30);
        let two = BigReal::from_i64(2, c.bits());
        let half = BigReal::from_ratio(1, 2, c.bits()).unwrap();
        let p = pow(&two, &half, &c).unwrap();
        assert_eq!(p.to_string_digits(25), sqrt(&two, &c).unwrap().to_string_digits(25));
        let cube = nth_root(&BigReal::from_i64(27, c.bits()), 3, &c).unwrap();
        assert_eq!(cube.to_f64(), 3.0);
        assert!(pow(&BigReal::from_i64(-2, 64), &half, &c).is_err());
        assert_eq!(pow(&BigReal::from_i64(-2, 64), &BigReal::from_i64(3, 64), &c).unwrap().to_f64(), -8.0);
    }

    #[test]
    fn elementary_dispatch() {
        let c = ctx(20);
        let x = BigReal::from_i64(4, c.bits());
        assert_eq!(elementary(&Elementary::Sqrt, &x, &c).unwrap().to_f64(), 2.0);
        assert!(elementary(&Elementary::Ln, &-&x, &c).is_err());
    }
}
