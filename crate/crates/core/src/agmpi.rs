//! Arithmetic-geometric means and the Gauss–Legendre π iteration.
//!
//! * `AG₂`: `a' = (a+b)/2`, `b' = √(ab)`; `1/AG₂(1,k) = ₂F₁(½,½;1;1−k²)`.
//! * `AG₃`: `a' = (a+2b)/3`, `b' = ∛(b(a²+ab+b²)/3)`;
//!   `1/AG₃(1,k) = ₂F₁(⅓,⅔;1;1−k³)`.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::numkernel::{hyp2f1, ten_to_minus, BigReal, PrecisionContext};

const GUARD_BITS: u32 = 32;
const MAX_ITERATIONS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct AgmState {
    pub a: BigReal,
    pub b: BigReal,
    pub iteration: u32,
}

impl AgmState {
    fn new(a: &BigReal, b: &BigReal, bits: u32) -> Result<Self> {
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::NonPositiveArgument(format!("AGM arguments must be positive: ({a}, {b})")));
        }
        let (a, b) = if a >= b { (a, b) } else { (b, a) };
        Ok(Self { a: a.round_to(bits.max(a.bits())), b: b.round_to(bits.max(b.bits())), iteration: 0 })
    }

    pub fn gap(&self) -> BigReal {
        (&self.a - &self.b).abs()
    }

    fn step2(&self) -> Result<Self> {
        let a = (&self.a + &self.b).mul_pow2(-1);
        let b = (&self.a * &self.b).sqrt()?;
        Ok(Self { a, b, iteration: self.iteration + 1 })
    }

    fn step3(&self) -> Result<Self> {
        let (a, b) = (&self.a, &self.b);
        let a1 = (a + &b.mul_int(2)).div_int(3);
        let inner = b * &(a.square() + a * b + b.square());
        let b1 = inner.div_int(3).nth_root(3)?;
        Ok(Self { a: a1, b: b1, iteration: self.iteration + 1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgmKind {
    Quadratic,
    Cubic,
}

/// All states from the start until `|a − b| < 10^(−target−2)·a`.
pub fn agm_trace(kind: AgmKind, a: &BigReal, b: &BigReal, ctx: &PrecisionContext) -> Result<Vec<AgmState>> {
    let wide = ctx.with_extra_bits(GUARD_BITS);
    let mut s = AgmState::new(a, b, wide.bits())?;
    let tol = ten_to_minus(ctx.target_digits() as i64 + 2, &wide);
    let mut out = vec![s.clone()];
    while s.gap() >= &tol * &s.a {
        s = match kind {
            AgmKind::Quadratic => s.step2()?,
            AgmKind::Cubic => s.step3()?,
        };
        out.push(s.clone());
        if s.iteration > MAX_ITERATIONS {
            return Err(Error::PrecisionUnachievable("AGM iteration did not settle".into()));
        }
    }
    Ok(out)
}

fn limit(kind: AgmKind, a: &BigReal, b: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let trace = agm_trace(kind, a, b, ctx)?;
    let last = trace.last().expect("trace holds the start state");
    Ok(last.a.round_to(ctx.bits()))
}

/// `AG₂(a, b)`.
pub fn agm2(a: &BigReal, b: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    limit(AgmKind::Quadratic, a, b, ctx)
}

/// `AG₃(a, b)`.
pub fn agm3(a: &BigReal, b: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    limit(AgmKind::Cubic, a, b, ctx)
}

/// `|AG₂(1,k) · ₂F₁(½,½;1;1−k²) − 1|`.
pub fn gauss_identity_residual(k: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let wide = ctx.with_extra_bits(GUARD_BITS);
    let one = BigReal::one(wide.bits());
    let m = agm2(&one, k, &wide)?;
    let z = &one - &k.square();
    let f = hyp2f1(Rational64::new(1, 2), Rational64::new(1, 2), Rational64::new(1, 1), &z, &wide)?;
    Ok((m * f - one).abs().round_to(ctx.bits()))
}

/// Argument of the ₂F₁ in the cubic identity: `1 − k^p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicArgument {
    OneMinusKSquared,
    OneMinusKCubed,
}

impl CubicArgument {
    pub fn power(self) -> i64 {
        match self {
            Self::OneMinusKSquared => 2,
            Self::OneMinusKCubed => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::OneMinusKSquared => "1-k^2",
            Self::OneMinusKCubed => "1-k^3",
        }
    }
}

/// `|AG₃(1,k) · ₂F₁(⅓,⅔;1;1−k^p) − 1|`.
pub fn cubic_identity_residual(k: &BigReal, arg: CubicArgument, ctx: &PrecisionContext) -> Result<BigReal> {
    let wide = ctx.with_extra_bits(GUARD_BITS);
    let one = BigReal::one(wide.bits());
    let m = agm3(&one, k, &wide)?;
    let z = &one - &k.round_to(wide.bits()).powi(arg.power());
    let f = hyp2f1(Rational64::new(1, 3), Rational64::new(2, 3), Rational64::new(1, 1), &z, &wide)?;
    Ok((m * f - one).abs().round_to(ctx.bits()))
}

#[derive(Debug, Clone)]
pub struct CubicResolution {
    pub ks: Vec<BigReal>,
    pub residuals_k2: Vec<BigReal>,
    pub residuals_k3: Vec<BigReal>,
    /// The argument whose residuals all fall below the tolerance, if exactly
    /// one does.
    pub satisfied: Option<CubicArgument>,
}

/// Evaluates both candidate arguments of the cubic identity on `ks` and
/// reports which one holds to within `tol`.
pub fn resolve_cubic_argument(ks: &[BigReal], tol: &BigReal, ctx: &PrecisionContext) -> Result<CubicResolution> {
    let mut r2 = Vec::new();
    let mut r3 = Vec::new();
    for k in ks {
        r2.push(cubic_identity_residual(k, CubicArgument::OneMinusKSquared, ctx)?);
        r3.push(cubic_identity_residual(k, CubicArgument::OneMinusKCubed, ctx)?);
    }
    let ok2 = r2.iter().all(|r| r < tol);
    let ok3 = r3.iter().all(|r| r < tol);
    let satisfied = match (ok2, ok3) {
        (true, false) => Some(CubicArgument::OneMinusKSquared),
        (false, true) => Some(CubicArgument::OneMinusKCubed),
        _ => None,
    };
    Ok(CubicResolution { ks: ks.to_vec(), residuals_k2: r2, residuals_k3: r3, satisfied })
}

#[derive(Debug, Clone)]
pub struct PiResult {
    pub value: BigReal,
    pub iterations: u32,
    /// `|π_j − π|` for `j = 1..=iterations`, against a reference run with 64
    /// more bits and two more iterations.
    pub per_iteration_error: Vec<BigReal>,
}

/// The raw Gauss–Legendre iterates `π_1, …, π_n` at a fixed precision.
fn gauss_legendre_iterates(iterations: u32, bits: u32) -> Result<Vec<BigReal>> {
    let one = BigReal::one(bits);
    let mut a = one.clone();
    let mut b = BigReal::from_ratio(1, 2, bits)?.sqrt()?;
    let mut t = BigReal::from_ratio(1, 4, bits)?;
    let mut x = one;
    let mut out = Vec::with_capacity(iterations as usize);
    for _ in 0..iterations {
        let a1 = (&a + &b).mul_pow2(-1);
        let b1 = (&a * &b).sqrt()?;
        t = &t - &(&x * &(&a - &a1).square());
        x = x.mul_pow2(1);
        a = a1;
        b = b1;
        out.push((&a + &b).square() / t.mul_pow2(2));
    }
    Ok(out)
}

/// Gauss–Legendre: `a₀ = 1, b₀ = 1/√2, t₀ = ¼, x₀ = 1`,
/// `π ≈ (a_n + b_n)²/(4t_n)`.
pub fn gauss_legendre_pi(iterations: u32, ctx: &PrecisionContext) -> Result<PiResult> {
    if iterations == 0 {
        return Err(Error::InvalidInput("iterations must be at least 1".into()));
    }
    let bits = ctx.bits();
    let iterates = gauss_legendre_iterates(iterations, bits)?;
    let reference = gauss_legendre_iterates(iterations + 2, bits + 64)?.pop().expect("nonempty");
    let errors: Vec<BigReal> = iterates.iter().map(|p| (p - &reference).abs()).collect();
    // once an iterate is already at the rounding floor the next one cannot improve
    let floor_exp = -(bits as i64) + 8;
    for (j, e) in errors.iter().enumerate().take(errors.len().saturating_sub(1)) {
        if e.is_zero() || e.magnitude_exp() < floor_exp {
            return Err(Error::PrecisionUnachievable(format!(
                "precision exhausted after {} iterations at {bits} bits",
                j + 1
            )));
        }
    }
    Ok(PiResult {
        value: iterates.last().expect("nonempty").clone(),
        iterations,
        per_iteration_error: errors,
    })
}

/// `3 10/71 < π < 3 1/7`.
pub fn archimedes_bounds() -> (Rational64, Rational64) {
    (Rational64::new(223, 71), Rational64::new(22, 7))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(d: u32) -> PrecisionContext {
        PrecisionContext::new(d)
    }

    fn real(s: &str, ctx: &PrecisionContext) -> BigReal {
        BigReal::parse_decimal(s, ctx.bits()).unwrap()
    }

    #[test]
    fn fixed_points() {
        let ctx = c(30);
        let one = BigReal::one(ctx.bits());
        assert_eq!(agm2(&one, &one, &ctx).unwrap(), one);
        assert_eq!(agm3(&one, &one, &ctx).unwrap(), one);
    }

    #[test]
    fn homogeneity() {
        let ctx = c(40);
        let tol = ten_to_minus(38, &ctx);
        let (a, b) = (real("1", &ctx), real("2", &ctx));
        let m = agm2(&a, &b, &ctx).unwrap();
        let m3 = agm2(&a.mul_int(3), &b.mul_int(3), &ctx).unwrap();
        assert!((m3 - m.mul_int(3)).abs() < tol);
        let b5 = real("2", &ctx);
        let g = agm3(&a, &b5, &ctx).unwrap();
        let g5 = agm3(&a.mul_int(5), &b5.mul_int(5), &ctx).unwrap();
        assert!((g5 - g.mul_int(5)).abs() < tol.mul_int(5));
    }

    #[test]
    fn rejects_nonpositive() {
        let ctx = c(20);
        let one = BigReal::one(64);
        assert!(matches!(agm2(&one, &BigReal::zero(64), &ctx), Err(Error::NonPositiveArgument(_))));
        assert!(matches!(agm3(&-one.clone(), &one, &ctx), Err(Error::NonPositiveArgument(_))));
    }

    #[test]
    fn known_value() {
        // Gauss's constant: 1/AG₂(1, √2)
        let ctx = c(30);
        let one = BigReal::one(ctx.bits());
        let r2 = BigReal::from_i64(2, ctx.bits()).sqrt().unwrap();
        let g = agm2(&one, &r2, &ctx).unwrap().recip();
        assert_eq!(g.to_string_digits(25), "0.8346268416740731862814297");
    }

    #[test]
    fn gauss_legendre_first_iterates() {
        let ctx = c(60);
        let r = gauss_legendre_pi(3, &ctx).unwrap();
        assert_eq!(r.value.to_string_digits(15), "3.14159265358979");
        assert_eq!(r.per_iteration_error.len(), 3);
        // π₁ = 3.14057925…
        assert!((r.per_iteration_error[0].to_f64() - 1.013_4e-3).abs() < 1e-6);
    }

    #[test]
    fn precision_exhaustion() {
        let ctx = PrecisionContext::from_bits(200);
        assert!(gauss_legendre_pi(5, &ctx).is_ok());
        assert!(matches!(gauss_legendre_pi(7, &ctx), Err(Error::PrecisionUnachievable(_))));
        assert!(gauss_legendre_pi(0, &ctx).is_err());
    }

    #[test]
    fn archimedes() {
        let (lo, hi) = archimedes_bounds();
        assert_eq!(hi - lo, Rational64::new(1, 497));
        assert_eq!(lo, Rational64::new(223, 71));
    }
}
