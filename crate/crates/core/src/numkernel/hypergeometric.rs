//! Gauss hypergeometric series ₂F₁(a, b; c; z) for exact rational
//! parameters and |z| < 1.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use super::bigreal::BigReal;
use super::context::PrecisionContext;
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 40;

fn is_nonpositive_integer(q: &Rational64) -> bool {
    q.is_integer() && *q.numer() <= 0
}

/// Sum of the Gauss series `Σ (a)_k (b)_k / ((c)_k k!) z^k`.
///
/// The parameters are exact rationals; each term ratio is applied as an
/// integer multiplication and an integer division, so the only rounding is
/// in the running product with `z`.
pub fn hyp2f1(
    a: Rational64,
    b: Rational64,
    c: Rational64,
    z: &BigReal,
    ctx: &PrecisionContext,
) -> Result<BigReal> {
    if is_nonpositive_integer(&c) {
        return Err(Error::DivergentParameters(format!(
            "c = {c} is a nonpositive integer"
        )));
    }
    let one = BigReal::one(64);
    if z.abs() >= one {
        return Err(Error::ArgumentOutOfRange(format!(
            "|z| must be < 1, got {}",
            z.to_string_digits(20)
        )));
    }
    let bits = ctx.bits();
    // the number of terms grows like bits / -log2|z|; account for the
    // accumulated rounding of that many steps
    let zf = z.to_f64().abs();
    let rate = if zf == 0.0 { 64.0 } else { -zf.log2() };
    let est_terms = (bits as f64 / rate.max(1e-12)).min(1e9) + 16.0;
    let w = bits + GUARD_BITS + est_terms.log2().ceil() as u32;
    let zw = z.round_to(w.max(z.bits()));

    let (an, ad) = (*a.numer(), *a.denom());
    let (bn, bd) = (*b.numer(), *b.denom());
    let (cn, cd) = (*c.numer(), *c.denom());
    let mut term = BigReal::one(w);
    let mut sum = BigReal::one(w);
    let min_k = (a.abs() + b.abs() + c.abs()).to_integer() as u64 + 2;
    let mut k: u64 = 0;
    loop {
        let ki = k as i64;
        // (a+k)(b+k) / ((c+k)(k+1)) = (an + k ad)(bn + k bd) cd / ((cn + k cd)(k+1) ad bd)
        let num = BigInt::from(an + ki * ad) * BigInt::from(bn + ki * bd) * BigInt::from(cd);
        let den = BigInt::from(cn + ki * cd) * BigInt::from(ki + 1) * BigInt::from(ad) * BigInt::from(bd);
        if num.is_zero() {
            break; // a or b is a nonpositive integer: the series terminates
        }
        term = term.mul(&zw).mul_bigint(&num).div_bigint(&den);
        sum = sum.add(&term);
        k += 1;
        if k >= min_k {
            // with |ratio| → |z| the remaining tail is below |term| / (1 − |z|)
            let tail = term.log2_abs_f64() - (1.0 - zf).log2();
            if tail < sum.log2_abs_f64() - w as f64 {
                break;
            }
        }
        if k > 2_000_000_000 {
            return Err(Error::PrecisionUnachievable(
                "hypergeometric series did not converge".into(),
            ));
        }
    }
    Ok(sum.round_to(bits))
}
