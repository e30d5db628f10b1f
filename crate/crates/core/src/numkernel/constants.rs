//! Euler's constant and Apéry's constant.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::bigreal::BigReal;
use super::context::PrecisionContext;
use super::elementary::ln2_fixed;
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 48;

/// Ratio of the Brent–McMillan truncation index to its parameter; the tail of
/// the sums is negligible once K exceeds this multiple of n.
const BRENT_MCMILLAN_ALPHA: f64 = 3.591_121_477;

/// Euler's constant γ via the Brent–McMillan formula
/// `γ = U/V − ln n` with `U = Σ (n^k/k!)² (H_k − ln n)`, `V = Σ (n^k/k!)²`.
///
/// `n` is a power of two so `ln n` is a multiple of `ln 2`; the truncation
/// error is below `π e^(−4n)`.
pub fn euler_gamma(ctx: &PrecisionContext) -> Result<BigReal> {
    let bits = ctx.bits();
    // e^(-4n) < 2^-(bits + guard)
    let need = ((bits + GUARD_BITS) as f64 * std::f64::consts::LN_2 / 4.0).ceil() as u64 + 1;
    let log2n = 64 - (need - 1).leading_zeros();
    let n: u64 = 1 << log2n;
    let kmax = (BRENT_MCMILLAN_ALPHA * n as f64).ceil() as u64 + 1;
    // terms grow to about e^(2n); carry enough bits for their integer part
    let w = bits + GUARD_BITS + 16;
    let n2 = BigInt::from(n) * BigInt::from(n);
    let ln_n = ln2_fixed(w) * BigInt::from(log2n);

    let one = BigInt::one() << w as usize;
    let mut a = -ln_n; // A_k = B_k (H_k - ln n)
    let mut b = one; // B_k = (n^k / k!)^2
    let mut u = a.clone();
    let mut v = b.clone();
    for k in 1..=kmax {
        let kk = BigInt::from(k);
        b = &b * &n2 / (&kk * &kk);
        a = (&a * &n2 / &kk + &b) / &kk;
        u += &a;
        v += &b;
        if b.is_zero() && a.is_zero() {
            break;
        }
    }
    if v.is_zero() {
        return Err(Error::PrecisionUnachievable("euler_gamma: empty sum".into()));
    }
    let num = BigReal::from_parts(u, -(w as i64), bits + GUARD_BITS);
    let den = BigReal::from_parts(v, -(w as i64), bits + GUARD_BITS);
    Ok((num / den).round_to(bits))
}

/// ζ(3) from the Amdeberhan–Zeilberger series
/// `ζ(3) = (1/64) Σ (−1)^k (k!)^10 (205k² + 250k + 77) / ((2k+1)!)^5`,
/// about ten bits per term.
pub fn zeta3(ctx: &PrecisionContext) -> Result<BigReal> {
    let bits = ctx.bits();
    let w = bits + GUARD_BITS;
    let mut t = BigInt::one() << w as usize; // (k!)^10 / ((2k+1)!)^5
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let kb = BigInt::from(k);
        let poly = BigInt::from(205u32) * &kb * &kb + BigInt::from(250u32) * &kb + BigInt::from(77u32);
        let term = &t * poly;
        if term.is_zero() {
            break;
        }
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        let k1 = BigInt::from(k + 1);
        let num = num_traits::pow(k1, 10);
        let d = BigInt::from(2 * k + 2) * BigInt::from(2 * k + 3);
        let den = num_traits::pow(d, 5);
        t = t * num / den;
        k += 1;
        if k > 10 * w as u64 {
            return Err(Error::PrecisionUnachievable("zeta3 series did not terminate".into()));
        }
    }
    Ok(BigReal::from_parts(sum, -(w as i64) - 6, bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_digits() {
        let ctx = PrecisionContext::new(50);
        assert_eq!(
            euler_gamma(&ctx).unwrap().to_string_digits(50),
            "0.57721566490153286060651209008240243104215933593992"
        );
    }

    #[test]
    fn gamma_precision_monotone() {
        let lo = euler_gamma(&PrecisionContext::new(10)).unwrap().to_string_digits(10);
        let hi = euler_gamma(&PrecisionContext::new(50)).unwrap();
        assert_eq!(lo, hi.to_string_digits(10));
        assert_eq!(lo, "0.5772156649");
    }

    #[test]
    fn zeta3_digits() {
        let ctx = PrecisionContext::new(30);
        assert_eq!(
            zeta3(&ctx).unwrap().to_string_digits(30),
            "1.20205690315959428539973816151"
        );
    }

    #[test]
    fn zeta3_bracket() {
        let ctx = PrecisionContext::new(20);
        let z = zeta3(&ctx).unwrap().to_f64();
        let pi = std::f64::consts::PI;
        assert!(z > 1.0 && z < pi.powi(3) / 24.0 + 1.0);
    }
}
