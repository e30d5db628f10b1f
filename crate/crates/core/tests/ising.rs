use expmath::ising::{c2_two_dimensional, c_infinity, c_n, monotonicity_scan, CnSolver};
use expmath::numkernel::ten_to_minus;
use expmath::quadrature::QuadOptions;
use expmath::{BigReal, Error, PrecisionContext};

#[test]
fn level_schedule_does_not_matter_once_converged() {
    let ctx = PrecisionContext::new(25);
    let eps = ten_to_minus(20, &ctx);
    let short = CnSolver::with_options(&ctx, QuadOptions { max_level: 10, min_level: 3 }).unwrap();
    let long = CnSolver::with_options(&ctx, QuadOptions { max_level: 14, min_level: 6 }).unwrap();
    for n in [1, 3, 5, 9] {
        let a = short.c_n(n, &eps).unwrap();
        let b = long.c_n(n, &eps).unwrap();
        let slack = &a.error_estimate + &b.error_estimate + ten_to_minus(22, &ctx);
        assert!((&a.value - &b.value).abs() <= slack, "n = {n}");
    }
}

#[test]
fn two_dimensional_c2() {
    let ctx = PrecisionContext::new(25);
    let eps = ten_to_minus(22, &ctx);
    let v = c2_two_dimensional(&ctx, &eps).unwrap();
    assert!((&v.value - &BigReal::one(ctx.bits())).abs() < ten_to_minus(20, &ctx));
}

#[test]
fn scan_is_monotone_and_above_the_limit() {
    let ctx = PrecisionContext::new(20);
    let eps = ten_to_minus(16, &ctx);
    let report = monotonicity_scan(12, &ctx, &eps).unwrap();
    assert!(report.is_monotone(), "{:?}", report.violations);
    let cinf = c_infinity(&ctx).unwrap();
    assert!(report.records.iter().all(|r| r.value > cinf));
}

#[test]
fn known_values() {
    let ctx = PrecisionContext::new(25);
    let eps = ten_to_minus(22, &ctx);
    assert_eq!(c_n(3, &ctx, &eps).unwrap().value.to_string_digits(20), "0.78130241289648629687");
    assert_eq!(c_n(10, &ctx, &eps).unwrap().value.to_string_digits(20), "0.63188002414701222229");
}

#[test]
fn n_zero_is_rejected() {
    let ctx = PrecisionContext::new(20);
    let r = c_n(0, &ctx, &ten_to_minus(10, &ctx));
    assert!(matches!(r, Err(Error::InvalidInput(m)) if m.contains("n ≥ 1")));
}
