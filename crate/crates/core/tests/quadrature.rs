use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use expmath::numkernel::{bessel_k0, exp, pi, ten_to_minus, zeta3};
use expmath::quadrature::{
    integrate_finite, integrate_finite_with, integrate_semi_infinite, DecayCertificate, QuadOptions,
};
use expmath::{BigReal, Error, PrecisionContext};

fn poly(c: &[i64], x: &BigReal) -> BigReal {
    let bits = x.bits();
    c.iter().rev().fold(BigReal::zero(bits), |acc, k| acc * x + BigReal::from_i64(*k, bits))
}

fn exact_poly_integral(c: &[i64]) -> BigRational {
    c.iter().enumerate().map(|(i, k)| BigRational::new(BigInt::from(*k), BigInt::from(i as i64 + 1))).sum()
}

fn real(q: &BigRational, bits: u32) -> BigReal {
    BigReal::from_bigint(q.numer().clone(), bits) / BigReal::from_bigint(q.denom().clone(), bits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn low_degree_polynomials_are_exact(c in proptest::collection::vec(-50i64..50, 1..=3)) {
        let ctx = PrecisionContext::new(30);
        let opts = QuadOptions { min_level: 5, ..QuadOptions::default() };
        let zero = BigReal::zero(ctx.bits());
        let one = BigReal::one(ctx.bits());
        let r = integrate_finite_with(|x| Ok(poly(&c, x)), &zero, &one, &ten_to_minus(30, &ctx), &ctx, opts).unwrap();
        prop_assert!(r.levels_used >= 5);
        let err = (&r.value - &real(&exact_poly_integral(&c), ctx.bits())).abs();
        prop_assert!(err < ten_to_minus(27, &ctx), "{}", err.to_string_digits(3));
    }

    #[test]
    fn odd_integrands_vanish(a in 0.1f64..5.0, k in 1i64..20) {
        let ctx = PrecisionContext::new(30);
        let hi = BigReal::from_f64(a, ctx.bits()).unwrap();
        let lo = -hi.clone();
        // x³ − k·x·e^(−x²)
        let f = |x: &BigReal| Ok(x.powi(3) - x.mul_int(k) * exp(&-x.square(), &ctx)?);
        let r = integrate_finite(f, &lo, &hi, &ten_to_minus(28, &ctx), &ctx).unwrap();
        prop_assert!(r.value.abs() <= BigReal::max_of(&r.error_estimate, &ten_to_minus(29, &ctx)));
    }

    #[test]
    fn refinement_never_doubles_the_error(c in 1i64..40) {
        // 1/(1 + c x²) on [0, 1]: analytic, poles at ±i/√c
        let ctx = PrecisionContext::new(40);
        let bits = ctx.bits();
        let one = BigReal::one(bits);
        let opts = QuadOptions { min_level: 8, max_level: 8 };
        let f = |x: &BigReal| Ok((&one + &x.square().mul_int(c)).recip());
        let r = integrate_finite_with(f, &BigReal::zero(bits), &one, &ten_to_minus(200, &ctx), &ctx, opts).unwrap();
        let floor = ten_to_minus(38, &ctx);
        for w in r.level_estimates.windows(2) {
            if w[0] > floor {
                prop_assert!(w[1] <= w[0].mul_int(2), "{} then {}", w[0].to_string_digits(3), w[1].to_string_digits(3));
            }
        }
    }
}

#[test]
fn pi_from_arctan_derivative() {
    let ctx = PrecisionContext::new(40);
    let bits = ctx.bits();
    let one = BigReal::one(bits);
    let r = integrate_finite(
        |x| Ok(BigReal::from_i64(4, bits) / (&one + &x.square())),
        &BigReal::zero(bits),
        &one,
        &ten_to_minus(40, &ctx),
        &ctx,
    )
    .unwrap();
    assert!((&r.value - &pi(&ctx)).abs() < ten_to_minus(39, &ctx));
}

#[test]
fn first_bessel_moment_is_one() {
    let ctx = PrecisionContext::new(30);
    let zero = BigReal::zero(ctx.bits());
    let r = integrate_semi_infinite(|t| Ok(t * &bessel_k0(t, &ctx)?), &zero, &ten_to_minus(27, &ctx), &ctx, None).unwrap();
    assert!((&r.value - &BigReal::one(ctx.bits())).abs() < ten_to_minus(25, &ctx));
}

#[test]
fn fourth_bessel_moment_closed_form() {
    // ∫ t K₀⁴ = (4!/2⁴) · 7ζ(3)/12
    let ctx = PrecisionContext::new(30);
    let zero = BigReal::zero(ctx.bits());
    let r = integrate_semi_infinite(
        |t| Ok(t * &bessel_k0(t, &ctx)?.powi(4)),
        &zero,
        &ten_to_minus(27, &ctx),
        &ctx,
        None,
    )
    .unwrap();
    let closed = zeta3(&ctx).unwrap().mul_int(7).div_int(8);
    assert!((&r.value - &closed).abs() < ten_to_minus(25, &ctx));
}

#[test]
fn decay_certificates() {
    let ctx = PrecisionContext::new(25);
    let bits = ctx.bits();
    let zero = BigReal::zero(bits);
    let honest = DecayCertificate { scale: BigReal::one(bits), rate: BigReal::one(bits), from: BigReal::from_i64(2, bits) };
    let r = integrate_semi_infinite(|t| exp(&-t.clone(), &ctx), &zero, &ten_to_minus(22, &ctx), &ctx, Some(&honest)).unwrap();
    assert!((&r.value - &BigReal::one(bits)).abs() < ten_to_minus(20, &ctx));

    // claims e^(−3t) for a function decaying like e^(−t)
    let false_claim =
        DecayCertificate { scale: BigReal::one(bits), rate: BigReal::from_i64(3, bits), from: BigReal::from_i64(2, bits) };
    let r = integrate_semi_infinite(|t| exp(&-t.clone(), &ctx), &zero, &ten_to_minus(22, &ctx), &ctx, Some(&false_claim));
    assert!(matches!(r, Err(Error::TailBoundViolation { .. })), "{r:?}");
}
