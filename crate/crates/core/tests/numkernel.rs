use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use expmath::numkernel::{
    bessel_k0_integral, bessel_k0_series, euler_gamma, exp, ln, ln2, pi, sin, sqrt, ten_to_minus, zeta3,
};
use expmath::{BigReal, PrecisionContext};

fn to_real(q: &BigRational, bits: u32) -> BigReal {
    BigReal::from_bigint(q.numer().clone(), bits + 32) / BigReal::from_bigint(q.denom().clone(), bits + 32)
}

/// B_0 … B_{2m} by the Akiyama–Tanigawa recurrence.
fn bernoulli(m: usize) -> Vec<BigRational> {
    let mut a = vec![BigRational::zero(); m + 1];
    let mut out = Vec::with_capacity(m + 1);
    for n in 0..=m {
        a[n] = BigRational::new(BigInt::one(), BigInt::from(n + 1));
        for j in (1..=n).rev() {
            a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    out
}

/// γ = H_N − ln N − 1/(2N) + Σ_k B_2k / (2k N^2k), N = 100, 40 correction terms.
fn gamma_euler_maclaurin(ctx: &PrecisionContext) -> BigReal {
    let n = 100u32;
    let terms = 40usize;
    let b = bernoulli(2 * terms);
    let mut q = BigRational::zero();
    for k in 1..=n {
        q += BigRational::new(BigInt::one(), BigInt::from(k));
    }
    let nn = BigInt::from(n);
    q -= BigRational::new(BigInt::one(), BigInt::from(2 * n));
    for k in 1..=terms {
        let denom = BigInt::from(2 * k) * num_traits::pow(nn.clone(), 2 * k);
        q += &b[2 * k] / BigRational::from_integer(denom);
    }
    let bits = ctx.bits();
    to_real(&q, bits) - ln(&BigReal::from_i64(n as i64, bits + 32), &ctx.with_extra_bits(32)).unwrap()
}

/// ζ(3) = 5/2 Σ_{k≥1} (−1)^{k+1} / (k³ C(2k,k)).
fn zeta3_apery(terms: u64, bits: u32) -> BigReal {
    let mut q = BigRational::zero();
    let mut central = BigInt::one();
    for k in 1..=terms {
        central = central * BigInt::from(2 * (2 * k - 1)) / BigInt::from(k);
        let t = BigRational::new(BigInt::one(), BigInt::from(k).pow(3) * &central);
        if k % 2 == 1 {
            q += t;
        } else {
            q -= t;
        }
    }
    to_real(&(q * BigRational::new(5.into(), 2.into())), bits)
}

#[test]
fn euler_gamma_against_euler_maclaurin() {
    let ctx = PrecisionContext::new(60);
    let diff = (euler_gamma(&ctx).unwrap() - gamma_euler_maclaurin(&ctx)).abs();
    assert!(diff < ten_to_minus(60, &ctx), "{}", diff.to_string_digits(3));
    assert_eq!(
        euler_gamma(&PrecisionContext::new(50)).unwrap().to_string_digits(50),
        "0.57721566490153286060651209008240243104215933593992"
    );
}

#[test]
fn zeta3_against_apery_series() {
    let ctx = PrecisionContext::new(40);
    let diff = (zeta3(&ctx).unwrap() - zeta3_apery(90, ctx.bits())).abs();
    assert!(diff < ten_to_minus(40, &ctx), "{}", diff.to_string_digits(3));
    assert_eq!(zeta3(&PrecisionContext::new(30)).unwrap().to_string_digits(30), "1.20205690315959428539973816151");
}

#[test]
fn two_exp_minus_two_gamma() {
    let ctx = PrecisionContext::new(50);
    let g = euler_gamma(&ctx).unwrap();
    let v = exp(&-g.mul_pow2(1), &ctx).unwrap().mul_pow2(1);
    assert_eq!(v.to_string_digits(50), "0.63047350337438679612204019271087890435458707871273");
}

#[test]
fn k0_routes_agree() {
    let ctx = PrecisionContext::new(30);
    for t in ["0.1", "1", "5", "20"] {
        let t = BigReal::parse_decimal(t, ctx.bits()).unwrap();
        let a = bessel_k0_series(&t, &ctx).unwrap();
        let b = bessel_k0_integral(&t, &ctx).unwrap();
        assert!(((&a - &b) / &a).abs() < ten_to_minus(30, &ctx), "t = {}", t.to_string_digits(5));
    }
}

#[test]
fn sin_pi_vanishes() {
    let ctx = PrecisionContext::new(40);
    assert!(sin(&pi(&ctx), &ctx).unwrap().abs() < ten_to_minus(38, &ctx));
}

#[derive(Debug, Clone, Copy)]
enum Named {
    Pi,
    Gamma,
    Zeta3,
    Ln2,
    E,
}

fn eval(c: Named, ctx: &PrecisionContext) -> BigReal {
    match c {
        Named::Pi => pi(ctx),
        Named::Gamma => euler_gamma(ctx).unwrap(),
        Named::Zeta3 => zeta3(ctx).unwrap(),
        Named::Ln2 => ln2(ctx),
        Named::E => exp(&BigReal::one(ctx.bits()), ctx).unwrap(),
    }
}

fn named() -> impl Strategy<Value = Named> {
    prop_oneof![Just(Named::Pi), Just(Named::Gamma), Just(Named::Zeta3), Just(Named::Ln2), Just(Named::E)]
}

/// Integer formed by the digits of a rendering, for comparing last places.
fn digit_integer(s: &str) -> BigInt {
    let digits: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rendering_is_deterministic(c in named(), d in 5u32..80) {
        let ctx = PrecisionContext::new(d);
        prop_assert_eq!(eval(c, &ctx).to_string_digits(d as usize), eval(c, &ctx).to_string_digits(d as usize));
    }

    #[test]
    fn more_precision_extends_the_rendering(c in named(), d in 5u32..60, extra in 1u32..60) {
        let lo = eval(c, &PrecisionContext::new(d)).to_string_digits(d as usize);
        let hi = eval(c, &PrecisionContext::new(d + extra)).to_string_digits(d as usize);
        // same number of digits, differing by at most one unit in the last place
        let gap = (digit_integer(&lo) - digit_integer(&hi)).abs();
        prop_assert!(gap <= BigInt::one(), "{} vs {}", lo, hi);
    }

    #[test]
    fn sqrt_squares_back(x in 1e-6f64..1e6, d in 10u32..60) {
        let ctx = PrecisionContext::new(d);
        let v = BigReal::from_f64(x, ctx.bits()).unwrap();
        let r = sqrt(&v, &ctx).unwrap();
        let rel = ((r.square() - &v) / &v).abs();
        prop_assert!(rel < ten_to_minus(d as i64 - 1, &ctx));
    }

    #[test]
    fn exp_inverts_ln(x in 1e-6f64..1e6) {
        let ctx = PrecisionContext::new(40);
        let v = BigReal::from_f64(x, ctx.bits()).unwrap();
        let back = exp(&ln(&v, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(((back - &v) / &v).abs() < ten_to_minus(38, &ctx));
    }
}

#[test]
fn bernoulli_oracle_sanity() {
    let b = bernoulli(6);
    assert_eq!(b[1], BigRational::new(1.into(), 2.into()));
    assert_eq!(b[2], BigRational::new(1.into(), 6.into()));
    assert_eq!(b[4], BigRational::new((-1).into(), 30.into()));
    assert_eq!(b[6].to_f64().map(|v| (v * 42.0).round()), Some(1.0));
}
