//! Bessel-moment integrals `C_n = 2^n/n! ∫₀^∞ t K₀(t)^n dt` and their limit
//! `C_∞ = 2e^(−2γ)`.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numkernel::{euler_gamma, exp, BigReal, K0Evaluator, PrecisionContext};
use crate::quadrature::{DeIntegrator, IntegralResult, QuadOptions};

/// Above this power the integrand is formed as `exp(ln t + n ln K₀)`.
const LOG_SPACE_FROM: u32 = 8;

#[derive(Debug, Clone)]
pub struct CnRecord {
    pub n: u32,
    pub value: BigReal,
    pub error_estimate: BigReal,
}

/// Reusable evaluator: the node tables and γ are built once per precision.
pub struct CnSolver {
    ctx: PrecisionContext,
    k0: K0Evaluator,
    quad: DeIntegrator,
}

impl CnSolver {
    pub fn new(ctx: &PrecisionContext) -> Result<Self> {
        Self::with_options(ctx, QuadOptions::default())
    }

    pub fn with_options(ctx: &PrecisionContext, opts: QuadOptions) -> Result<Self> {
        Ok(Self { ctx: *ctx, k0: K0Evaluator::new(ctx)?, quad: DeIntegrator::exp_sinh(ctx, opts) })
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    /// `t·K₀(t)^n`.
    pub fn integrand(&self, n: u32, t: &BigReal) -> Result<BigReal> {
        if n <= LOG_SPACE_FROM {
            Ok(t * &self.k0.value(t)?.powi(n as i64))
        } else {
            // ln K₀ is negative past t ≈ 0.6 and large near 0; either way n·ln K₀
            // stays representable where K₀^n would lose its exponent range in f64
            let ln_k0 = self.k0.ln_value(t)?;
            let ln_t = crate::numkernel::ln(t, &self.ctx)?;
            exp(&(ln_t + ln_k0.mul_int(n as i64)), &self.ctx)
        }
    }

    /// The raw integral `∫₀^∞ t K₀^n dt`.
    pub fn moment(&self, n: u32, eps: &BigReal) -> Result<IntegralResult> {
        if n == 0 {
            return Err(Error::InvalidInput("n must satisfy n ≥ 1".into()));
        }
        let zero = BigReal::zero(self.ctx.bits());
        // eps is on C_n; rescale to the raw moment
        let scale = prefactor(n, self.ctx.bits());
        let eps_raw = eps / &scale;
        self.quad.integrate(|t| self.integrand(n, t), &zero, None, &eps_raw)?.require_converged()
    }

    pub fn c_n(&self, n: u32, eps: &BigReal) -> Result<CnRecord> {
        let m = self.moment(n, eps)?;
        let scale = prefactor(n, self.ctx.bits());
        Ok(CnRecord {
            n,
            value: (&m.value * &scale).round_to(self.ctx.bits()),
            error_estimate: &m.error_estimate * &scale,
        })
    }
}

/// `2^n / n!`.
fn prefactor(n: u32, bits: u32) -> BigReal {
    let fact: BigUint = (1..=n).map(BigUint::from).fold(BigUint::one(), |a, b| a * b);
    BigReal::one(bits).mul_pow2(n as i64) / BigReal::from_bigint(fact.into(), bits)
}

pub fn c_n(n: u32, ctx: &PrecisionContext, eps: &BigReal) -> Result<CnRecord> {
    if n == 0 {
        return Err(Error::InvalidInput("n must satisfy n ≥ 1".into()));
    }
    CnSolver::new(ctx)?.c_n(n, eps)
}

/// `2·exp(−2γ)`.
pub fn c_infinity(ctx: &PrecisionContext) -> Result<BigReal> {
    let wide = ctx.with_extra_bits(16);
    let g = euler_gamma(&wide)?;
    Ok(exp(&-g.mul_pow2(1), &wide)?.mul_pow2(1).round_to(ctx.bits()))
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub records: Vec<CnRecord>,
    /// `n` such that `C_n > C_{n+1}` is not established beyond the combined
    /// error estimates.
    pub violations: Vec<u32>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `C_1, …, C_{n_max}` and every adjacent pair that fails to decrease
/// strictly outside the error bars.
pub fn monotonicity_scan(n_max: u32, ctx: &PrecisionContext, eps: &BigReal) -> Result<MonotonicityReport> {
    if n_max < 2 {
        return Err(Error::InvalidInput(format!("n_max must be at least 2, got {n_max}")));
    }
    let solver = CnSolver::new(ctx)?;
    let records = (1..=n_max).map(|n| solver.c_n(n, eps)).collect::<Result<Vec<_>>>()?;
    let violations = records
        .windows(2)
        .filter(|p| !strictly_greater(&p[0], &p[1]))
        .map(|p| p[0].n)
        .collect();
    Ok(MonotonicityReport { records, violations })
}

/// `a.value − b.value` exceeds the sum of both error estimates.
pub fn strictly_greater(a: &CnRecord, b: &CnRecord) -> bool {
    let gap = &a.value - &b.value;
    gap > &a.error_estimate + &b.error_estimate
}

/// `C₂` straight from its two-dimensional definition
/// `4/2! ∫₀^∞∫₀^∞ (u₁ + 1/u₁ + u₂ + 1/u₂)^(−2) du₁/u₁ du₂/u₂`,
/// by nested exp-sinh quadrature.
pub fn c2_two_dimensional(ctx: &PrecisionContext, eps: &BigReal) -> Result<IntegralResult> {
    let bits = ctx.bits();
    let zero = BigReal::zero(bits);
    let inner = DeIntegrator::exp_sinh(ctx, QuadOptions::default());
    let outer = DeIntegrator::exp_sinh(ctx, QuadOptions::default());
    // the inner integral is O(1/s) for s = u₁ + 1/u₁ ≥ 2, so an absolute
    // tolerance a bit below eps keeps the outer sum honest
    let eps_inner = eps.mul_pow2(-8);
    let g = |u1: &BigReal| -> Result<BigReal> {
        let s1 = u1 + &u1.recip();
        let v = inner
            .integrate(
                |u2| {
                    let s = &s1 + &(u2 + &u2.recip());
                    Ok((s.square() * u2).recip())
                },
                &zero,
                None,
                &eps_inner,
            )?
            .require_converged()?;
        Ok(&v.value / u1)
    };
    let mut r = outer.integrate(g, &zero, None, &eps.mul_pow2(-1))?;
    r.value = r.value.mul_pow2(1);
    r.error_estimate = r.error_estimate.mul_pow2(1);
    r.require_converged()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ten_to_minus;

    #[test]
    fn c_infinity_digits() {
        let ctx = PrecisionContext::new(50);
        assert_eq!(
            c_infinity(&ctx).unwrap().to_string_digits(50),
            "0.63047350337438679612204019271087890435458707871273"
        );
        let short = c_infinity(&PrecisionContext::new(10)).unwrap().to_string_digits(10);
        assert_eq!(short, "0.6304735034");
    }

    #[test]
    fn low_order_moments() {
        let ctx = PrecisionContext::new(30);
        let eps = ten_to_minus(25, &ctx);
        let solver = CnSolver::new(&ctx).unwrap();
        let c1 = solver.c_n(1, &eps).unwrap();
        let c2 = solver.c_n(2, &eps).unwrap();
        assert!((&c1.value - &BigReal::from_i64(2, 64)).abs() < ten_to_minus(24, &ctx), "{}", c1.value);
        assert!((&c2.value - &BigReal::one(64)).abs() < ten_to_minus(24, &ctx), "{}", c2.value);
    }

    #[test]
    fn log_space_agrees_with_direct_power() {
        let ctx = PrecisionContext::new(30);
        let solver = CnSolver::new(&ctx).unwrap();
        for t in ["0.001", "0.7", "3.5"] {
            let t = BigReal::parse_decimal(t, ctx.bits()).unwrap();
            let direct = &t * &solver.k0.value(&t).unwrap().powi(12);
            let logged = solver.integrand(12, &t).unwrap();
            let rel = ((&direct - &logged) / &direct).abs();
            assert!(rel < ten_to_minus(27, &ctx));
        }
    }

    #[test]
    fn rejects_zero() {
        let ctx = PrecisionContext::new(20);
        assert!(matches!(c_n(0, &ctx, &ten_to_minus(10, &ctx)), Err(Error::InvalidInput(_))));
        assert!(monotonicity_scan(1, &ctx, &ten_to_minus(10, &ctx)).is_err());
    }
}
