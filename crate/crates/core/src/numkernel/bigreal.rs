//! Binary floating point with a per-value precision.
//!
//! A `BigReal` is `mantissa · 2^exponent` with the mantissa rounded
//! (half-to-even) to at most `bits` significant bits. Arithmetic between two
//! values rounds to the larger of the two precisions, so exact small integers
//! built at a low precision never degrade a computation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::context::PrecisionContext;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    bits: u32,
}

/// Rounds `|m|` to `prec` bits, half to even. Returns the new mantissa and the
/// number of bits shifted out.
fn round_mantissa(m: BigInt, prec: u32) -> (BigInt, i64) {
    let nb = m.bits();
    if nb <= prec as u64 {
        return (m, 0);
    }
    let shift = nb - prec as u64;
    let (sign, mag) = m.into_parts();
    let mut q = &mag >> shift;
    let half = BigUint::one() << (shift - 1);
    let rem = &mag - (&q << shift);
    let round_up = match rem.cmp(&half) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => q.is_odd(),
    };
    let mut shift = shift as i64;
    if round_up {
        q += 1u32;
        if q.bits() > prec as u64 {
            q >>= 1;
            shift += 1;
        }
    }
    (BigInt::from_biguint(sign, q), shift)
}

/// `num / den` rounded half to even (`den > 0`).
pub(crate) fn div_round_half_even(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    let twice = &r << 1u32;
    match twice.cmp(den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_odd() {
                q + 1
            } else {
                q
            }
        }
    }
}

impl BigReal {
    fn normalized(mant: BigInt, exp: i64, bits: u32) -> Self {
        if mant.is_zero() {
            return Self::zero(bits);
        }
        let (mut mant, shift) = round_mantissa(mant, bits);
        let mut exp = exp + shift;
        // strip trailing zero bits so equal values share a representation
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mant >>= tz;
            exp += tz as i64;
        }
        Self { mant, exp, bits }
    }

    pub fn zero(bits: u32) -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        Self::normalized(BigInt::from(n), 0, bits)
    }

    pub fn from_bigint(n: BigInt, bits: u32) -> Self {
        Self::normalized(n, 0, bits)
    }

    /// `mantissa · 2^exponent`, rounded to `bits`.
    pub fn from_parts(mantissa: BigInt, exponent: i64, bits: u32) -> Self {
        Self::normalized(mantissa, exponent, bits)
    }

    /// Correctly rounded `num / den`.
    pub fn from_ratio(num: i64, den: i64, bits: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::DomainViolation {
                op: "from_ratio",
                detail: "zero denominator".into(),
            });
        }
        Ok(Self::from_i64(num, bits + 2).div(&Self::from_i64(den, bits + 2)).round_to(bits))
    }

    /// Exact conversion of a finite f64 (then rounded to `bits`).
    pub fn from_f64(x: f64, bits: u32) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero(bits));
        }
        let raw = x.to_bits();
        let sign = raw >> 63;
        let biased = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut mant = BigInt::from(m);
        if sign == 1 {
            mant = -mant;
        }
        Some(Self::normalized(mant, e, bits))
    }

    /// Parses a decimal literal such as `-0.6304e-3`, `12`, or `1.5E+7`,
    /// rounding the exact decimal value to `bits`.
    pub fn parse_decimal(s: &str, bits: u32) -> Result<Self> {
        let t = s.trim();
        let err = || Error::Parse(format!("not a decimal number: {s:?}"));
        if t.is_empty() {
            return Err(err());
        }
        let (body, exp10) = match t.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = t[i + 1..].parse().map_err(|_| err())?;
                (&t[..i], e)
            }
            None => (t, 0),
        };
        let (negative, body) = match body.as_bytes().first() {
            Some(b'-') => (true, &body[1..]),
            Some(b'+') => (false, &body[1..]),
            _ => (false, body),
        };
        let (int_part, frac_part) = match body.find('.') {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut n: BigInt = digits.parse::<BigInt>().map_err(|_| err())?;
        if negative {
            n = -n;
        }
        let scale = exp10 - frac_part.len() as i64;
        Ok(Self::from_decimal_parts(n, scale, bits))
    }

    /// `n · 10^scale` rounded to `bits`.
    pub fn from_decimal_parts(n: BigInt, scale: i64, bits: u32) -> Self {
        if scale >= 0 {
            let p = num_traits::pow(BigInt::from(10), scale as usize);
            Self::normalized(n * p, 0, bits)
        } else {
            let den = num_traits::pow(BigInt::from(10), (-scale) as usize);
            // quotient with bits+2 significant bits plus a sticky bit
            let shift = (bits as i64 + 2 + den.bits() as i64 - n.bits() as i64).max(0) + 1;
            let num = n << shift as usize;
            let (q, r) = num.div_rem(&den);
            let q = if r.is_zero() { q << 1u32 } else { (q << 1u32) + q_sign(&r) };
            Self::normalized(q, -shift - 1, bits)
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same value re-rounded to `bits` (or just relabelled when widening).
    pub fn round_to(&self, bits: u32) -> Self {
        Self::normalized(self.mant.clone(), self.exp, bits)
    }

    pub fn with_ctx(&self, ctx: &PrecisionContext) -> Self {
        self.round_to(ctx.bits())
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// `e` such that `2^(e-1) <= |x| < 2^e`; `i64::MIN` for zero.
    pub fn magnitude_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
            bits: self.bits,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            mant: self.mant.clone(),
            exp: self.exp + k,
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self::normalized(&self.mant * n, self.exp, self.bits)
    }

    pub fn mul_bigint(&self, n: &BigInt) -> Self {
        Self::normalized(&self.mant * n, self.exp, self.bits)
    }

    pub fn div_int(&self, n: i64) -> Self {
        self.div(&Self::from_i64(n, 64))
    }

    pub fn div_bigint(&self, n: &BigInt) -> Self {
        self.div(&Self::normalized(n.clone(), 0, (n.bits() as u32).max(1)))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let prec = self.bits.max(other.bits);
        if other.is_zero() {
            return self.round_to(prec);
        }
        if self.is_zero() {
            let o = other.round_to(prec);
            return if negate_other { -o } else { o };
        }
        let (a, b) = (self, other);
        let bm = if negate_other { -&b.mant } else { b.mant.clone() };
        let top_a = a.magnitude_exp();
        let top_b = b.magnitude_exp();
        // when one operand lies entirely below the rounding position of the
        // other it only acts as a sticky bit
        let limit = prec as i64 + 3;
        if top_a - limit > top_b {
            let e = top_a - limit - 1;
            let sticky = bm.signum();
            return Self::sum_aligned(&a.mant, a.exp, &sticky, e, prec);
        }
        if top_b - limit > top_a {
            let e = top_b - limit - 1;
            let sticky = a.mant.signum();
            return Self::sum_aligned(&bm, b.exp, &sticky, e, prec);
        }
        Self::sum_aligned(&a.mant, a.exp, &bm, b.exp, prec)
    }

    fn sum_aligned(m1: &BigInt, e1: i64, m2: &BigInt, e2: i64, prec: u32) -> Self {
        if e1 >= e2 {
            let m = (m1 << (e1 - e2) as usize) + m2;
            Self::normalized(m, e2, prec)
        } else {
            let m = m1 + (m2 << (e2 - e1) as usize);
            Self::normalized(m, e1, prec)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_impl(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_impl(other, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.bits.max(other.bits);
        Self::normalized(&self.mant * &other.mant, self.exp + other.exp, prec)
    }

    /// Division; panics on a zero divisor (callers check domain first).
    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "BigReal division by zero");
        let prec = self.bits.max(other.bits);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let shift = (prec as i64 + 3 + other.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << shift as usize;
        let (q, r) = num.div_rem(&other.mant);
        // append a sticky bit so the final rounding sees inexactness
        let q = if r.is_zero() {
            q << 1u32
        } else {
            (q << 1u32) + q_sign(&r) * other.mant.signum()
        };
        Self::normalized(q, self.exp - other.exp - shift - 1, prec)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DomainViolation {
                op: "div",
                detail: "division by zero".into(),
            });
        }
        Ok(self.div(other))
    }

    pub fn recip(&self) -> Self {
        Self::one(self.bits).div(self)
    }

    /// Square root rounded to this value's precision.
    pub fn sqrt(&self) -> Result<Self> {
        self.nth_root(2)
    }

    /// Real `n`-th root rounded to this value's precision. Negative arguments
    /// are accepted for odd `n`.
    pub fn nth_root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::DomainViolation {
                op: "nth_root",
                detail: "zeroth root".into(),
            });
        }
        if self.is_zero() || n == 1 {
            return Ok(self.clone());
        }
        if self.is_negative() && n.is_multiple_of(2) {
            return Err(Error::DomainViolation {
                op: "nth_root",
                detail: format!("even root of negative number {}", self),
            });
        }
        let prec = self.bits;
        let mag = self.mant.magnitude().clone();
        let want = (n as i64) * (prec as i64 + 3);
        let mut shift = (want - mag.bits() as i64).max(0);
        // exponent after shift must be divisible by n
        let e = self.exp - shift;
        let r = e.rem_euclid(n as i64);
        shift += r;
        let e = self.exp - shift;
        let scaled = mag << shift as usize;
        let root = scaled.nth_root(n);
        let exact = num_traits::pow(root.clone(), n as usize) == scaled;
        let mut m = BigInt::from_biguint(Sign::Plus, root) << 1u32;
        if !exact {
            m += 1;
        }
        if self.is_negative() {
            m = -m;
        }
        Ok(Self::normalized(m, e / n as i64 - 1, prec))
    }

    /// `self^n` by repeated squaring with a few guard bits.
    pub fn powi(&self, n: i64) -> Self {
        let prec = self.bits;
        if n == 0 {
            return Self::one(prec);
        }
        let guard = 2 * (64 - (n.unsigned_abs()).leading_zeros()) + 4;
        let mut base = self.round_to(prec + guard);
        let mut acc = Self::one(prec + guard);
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            acc = acc.recip();
        }
        acc.round_to(prec)
    }

    /// `round(x · 2^w)` as an integer (half to even).
    pub fn to_fixed(&self, w: u32) -> BigInt {
        let e = self.exp + w as i64;
        if e >= 0 {
            &self.mant << e as usize
        } else {
            div_round_half_even(&self.mant, &(BigInt::one() << (-e) as usize))
        }
    }

    /// Value of the fixed-point integer `v / 2^w`, rounded to `bits`.
    pub fn from_fixed(v: BigInt, w: u32, bits: u32) -> Self {
        Self::normalized(v, -(w as i64), bits)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            self.mant.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    /// Nearest integer, half to even.
    pub fn round_to_bigint(&self) -> BigInt {
        self.to_fixed(0)
    }

    /// Approximate f64 value (±inf / 0 on overflow / underflow).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let nb = self.mant.bits() as i64;
        let keep = 60i64;
        let (m, e) = if nb > keep {
            (&self.mant >> (nb - keep) as usize, self.exp + nb - keep)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        if e > 2000 {
            return mf.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        // split the scaling to avoid intermediate overflow
        let half = (e / 2) as i32;
        mf * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// Base-2 logarithm estimate of |x|, valid far outside the f64 range.
    pub fn log2_abs_f64(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let nb = self.mant.bits() as i64;
        let top = if nb > 60 {
            (self.mant.magnitude() >> (nb - 60) as usize).to_f64().unwrap()
        } else {
            self.mant.magnitude().to_f64().unwrap()
        };
        top.log2() + (self.exp + (nb - 60).max(0)) as f64
    }

    /// Decimal digits with round-half-even: returns `(negative, digits, k)`
    /// with `|x| ≈ 0.d1d2…dn · 10^(k+1)`, i.e. `d1.d2… · 10^k`.
    pub fn to_decimal_digits(&self, n: usize) -> (bool, String, i64) {
        assert!(n >= 1);
        if self.is_zero() {
            return (false, "0".repeat(n), 0);
        }
        let mag = self.mant.abs();
        let top = self.magnitude_exp();
        let mut k = ((top - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let lo = num_traits::pow(BigInt::from(10), n - 1);
        let hi = &lo * 10;
        loop {
            let s = n as i64 - 1 - k;
            let mut num = mag.clone();
            let mut den = BigInt::one();
            if self.exp >= 0 {
                num <<= self.exp as usize;
            } else {
                den <<= (-self.exp) as usize;
            }
            if s >= 0 {
                num *= num_traits::pow(BigInt::from(10), s as usize);
            } else {
                den *= num_traits::pow(BigInt::from(10), (-s) as usize);
            }
            let q = div_round_half_even(&num, &den);
            if q >= hi {
                k += 1;
                continue;
            }
            if q < lo {
                // the rounded value may still land exactly on 10^(n-1)·10^…
                // only when truly below, step down
                k -= 1;
                continue;
            }
            return (self.is_negative(), q.to_string(), k);
        }
    }

    /// Round-half-even rendering with exactly `n` significant digits.
    /// Positional notation for decimal exponents in [-7, 20], scientific
    /// (`d.ddd e±k`) otherwise.
    pub fn to_string_digits(&self, n: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (neg, digits, k) = self.to_decimal_digits(n);
        let sign = if neg { "-" } else { "" };
        let body = if (-7..=20).contains(&k) {
            if k >= 0 {
                let k = k as usize;
                if k + 1 >= digits.len() {
                    format!("{}{}", digits, "0".repeat(k + 1 - digits.len()))
                } else {
                    format!("{}.{}", &digits[..k + 1], &digits[k + 1..])
                }
            } else {
                format!("0.{}{}", "0".repeat((-k - 1) as usize), digits)
            }
        } else if digits.len() == 1 {
            format!("{}e{}", digits, k)
        } else {
            format!("{}.{}e{}", &digits[..1], &digits[1..], k)
        };
        format!("{sign}{body}")
    }

    /// Number of decimal digits the precision can carry.
    pub fn decimal_capacity(&self) -> usize {
        ((self.bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
    }

    pub fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

fn q_sign(r: &BigInt) -> BigInt {
    r.signum()
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = f.precision().unwrap_or_else(|| self.decimal_capacity());
        f.write_str(&self.to_string_digits(n.max(1)))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({} @{}b)", self.to_string_digits(self.decimal_capacity().min(40)), self.bits)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        // normalized form strips trailing zeros, so equal values compare equal
        self.mant == other.mant && (self.exp == other.exp || self.is_zero())
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        let (ta, tb) = (self.magnitude_exp(), other.magnitude_exp());
        let mag_order = if ta != tb {
            ta.cmp(&tb)
        } else {
            let (ma, mb) = (self.mant.abs(), other.mant.abs());
            if self.exp >= other.exp {
                (ma << (self.exp - other.exp) as usize).cmp(&mb)
            } else {
                ma.cmp(&(mb << (other.exp - self.exp) as usize))
            }
        };
        Some(if sa > 0 { mag_order } else { mag_order.reverse() })
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            mant: -self.mant,
            exp: self.exp,
            bits: self.bits,
        }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -(self.clone())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal::$inner(self, rhs)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal::$inner(&self, &rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal::$inner(&self, rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal::$inner(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);
