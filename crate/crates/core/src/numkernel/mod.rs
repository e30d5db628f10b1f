//! Arbitrary-precision real arithmetic and the special functions the rest of
//! the crate is built on.

mod bessel;
mod bigreal;
mod constants;
mod context;
mod elementary;
mod hypergeometric;

pub use bessel::{
    bessel_k0, bessel_k0_asymptotic, bessel_k0_integral, bessel_k0_ln, bessel_k0_series,
    K0Evaluator, K0_ASYMPTOTIC_SWITCH,
};
pub use bigreal::BigReal;
pub use constants::{euler_gamma, zeta3};
pub use context::{PrecisionContext, DEFAULT_GUARD_DIGITS, LOG2_10, MIN_BITS};
pub use elementary::{
    agree_to_bits, cos, elementary, exp, ln, ln2, nth_root, pi, pow, sin, sin_cos, sinc,
    sinh_cosh, sqrt, ten_to_minus, Elementary,
};
pub use hypergeometric::hyp2f1;

