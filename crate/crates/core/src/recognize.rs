//! Integer relations by PSLQ, and recognition of a number as a rational
//! combination of named constants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{euler_gamma, exp, ln2, pi, ten_to_minus, zeta3, BigReal, PrecisionContext};

pub const DEFAULT_COEFFICIENT_CAP: i64 = 1_000_000;
/// A relation must hold to this many digits fewer than the working precision.
pub const DEFAULT_SAFETY_DIGITS: u32 = 15;
const GUARD_BITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationOptions {
    pub coefficient_cap: i64,
    pub safety_digits: u32,
    pub max_iterations: usize,
}

impl Default for RelationOptions {
    fn default() -> Self {
        Self { coefficient_cap: DEFAULT_COEFFICIENT_CAP, safety_digits: DEFAULT_SAFETY_DIGITS, max_iterations: 20_000 }
    }
}

/// Nonzero `m` with `|Σ mᵢvᵢ| < 10^(−(digits − safety))` and every
/// `|mᵢ| ≤ cap`, normalized to gcd 1 and a positive first nonzero entry.
/// `Ok(None)` once PSLQ proves no relation within the cap exists.
pub fn find_integer_relation(values: &[BigReal], precision_digits: u32) -> Result<Option<Vec<i64>>> {
    find_integer_relation_with(values, precision_digits, RelationOptions::default())
}

pub fn find_integer_relation_with(
    values: &[BigReal],
    precision_digits: u32,
    opts: RelationOptions,
) -> Result<Option<Vec<i64>>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two values".into()));
    }
    if precision_digits <= opts.safety_digits {
        return Err(Error::InsufficientPrecision(format!(
            "{precision_digits} digits leave nothing above the {}-digit safety margin",
            opts.safety_digits
        )));
    }
    let ctx = PrecisionContext::with_guard(precision_digits, 10);
    let bits = ctx.bits() + GUARD_BITS;
    let x: Vec<BigReal> = values.iter().map(|v| v.round_to(bits)).collect();
    let scale = x.iter().map(|v| v.abs()).fold(BigReal::zero(bits), |a, b| BigReal::max_of(&a, &b));
    if scale.is_zero() {
        return Err(Error::InvalidInput("all values are zero".into()));
    }
    let threshold = ten_to_minus((precision_digits - opts.safety_digits) as i64, &ctx) * &scale;

    // a zero entry is a relation by itself
    if let Some(i) = x.iter().position(|v| v.is_zero()) {
        let mut m = vec![0; n];
        m[i] = 1;
        return Ok(Some(m));
    }

    let cap = BigInt::from(opts.coefficient_cap);
    let accept = |col: &[BigInt]| -> Option<Vec<i64>> {
        if col.iter().all(|c| c.is_zero()) || col.iter().any(|c| c.abs() > cap) {
            return None;
        }
        let r = residual_big(&x, col);
        if r.abs() >= threshold {
            return None;
        }
        Some(normalize(col))
    };

    let mut p = Pslq::new(&x, bits)?;
    for _ in 0..opts.max_iterations {
        // any column whose y entry has collapsed is a candidate
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| p.y[a].abs().partial_cmp(&p.y[b].abs()).expect("finite"));
        for &j in order.iter().take(2) {
            if let Some(m) = accept(&p.column(j)) {
                return Ok(Some(m));
            }
        }
        if p.norm_bound_exceeds(opts.coefficient_cap) {
            return Ok(None);
        }
        if !p.iterate()? {
            // H has a zero on the diagonal: the corresponding column is exact
            for j in 0..n {
                if let Some(m) = accept(&p.column(j)) {
                    return Ok(Some(m));
                }
            }
            return Err(Error::InsufficientPrecision("PSLQ lost the relation to rounding".into()));
        }
    }
    Err(Error::InsufficientPrecision(format!(
        "no decision after {} PSLQ iterations",
        opts.max_iterations
    )))
}

fn residual_big(x: &[BigReal], m: &[BigInt]) -> BigReal {
    let bits = x[0].bits();
    x.iter().zip(m).fold(BigReal::zero(bits), |acc, (v, c)| acc + v.mul_bigint(c))
}

fn normalize(col: &[BigInt]) -> Vec<i64> {
    let g = col.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let mut m: Vec<BigInt> = col.iter().map(|c| c / &g).collect();
    if m.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        m = m.into_iter().map(|c| -c).collect();
    }
    m.iter().map(|c| c.to_i64().expect("checked against the cap")).collect()
}

/// Ferguson–Bailey PSLQ state: `y`, the lower-trapezoidal `H` and the
/// integer matrix `B` whose columns are the relation candidates.
struct Pslq {
    n: usize,
    gamma: BigReal,
    y: Vec<BigReal>,
    h: Vec<Vec<BigReal>>,
    b: Vec<Vec<BigInt>>,
    bits: u32,
}

impl Pslq {
    fn new(x: &[BigReal], bits: u32) -> Result<Self> {
        let n = x.len();
        let mut s = vec![BigReal::zero(bits); n];
        let mut acc = BigReal::zero(bits);
        for k in (0..n).rev() {
            acc = acc + x[k].square();
            s[k] = acc.sqrt()?;
        }
        let s0 = s[0].clone();
        let y: Vec<BigReal> = x.iter().map(|v| v / &s0).collect();
        let s: Vec<BigReal> = s.iter().map(|v| v / &s0).collect();
        let mut h = vec![vec![BigReal::zero(bits); n - 1]; n];
        for j in 0..n - 1 {
            h[j][j] = &s[j + 1] / &s[j];
            for i in j + 1..n {
                h[i][j] = -(&y[i] * &y[j]) / (&s[j] * &s[j + 1]);
            }
        }
        let b = (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
        // γ > √(4/3)
        let gamma = BigReal::from_ratio(4, 3, bits)?.sqrt()? + BigReal::from_ratio(1, 100, bits)?;
        let mut p = Self { n, gamma, y, h, b, bits };
        for i in 1..n {
            p.reduce_row(i, i - 1);
        }
        Ok(p)
    }

    fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.n).map(|k| self.b[k][j].clone()).collect()
    }

    /// Hermite reduction of row `i` against rows `jmax, …, 0`.
    fn reduce_row(&mut self, i: usize, jmax: usize) {
        for j in (0..=jmax).rev() {
            if self.h[j][j].is_zero() {
                continue;
            }
            let t = (&self.h[i][j] / &self.h[j][j]).round_to_bigint();
            if t.is_zero() {
                continue;
            }
            let tr = BigReal::from_bigint(t.clone(), self.bits);
            self.y[j] = &self.y[j] + &(&tr * &self.y[i]);
            for k in 0..=j {
                self.h[i][k] = &self.h[i][k] - &(&tr * &self.h[j][k]);
            }
            for k in 0..self.n {
                let add = &t * &self.b[k][i];
                self.b[k][j] += add;
            }
        }
    }

    /// Any relation has norm at least `1/max|H_jj|`.
    fn norm_bound_exceeds(&self, cap: i64) -> bool {
        let mut best = BigReal::zero(self.bits);
        for j in 0..self.n - 1 {
            best = BigReal::max_of(&best, &self.h[j][j].abs());
        }
        if best.is_zero() {
            return false;
        }
        best.recip() > BigReal::from_i64(cap, 64).mul_int(self.n as i64)
    }

    /// One PSLQ step. `false` when a diagonal entry of `H` vanished.
    fn iterate(&mut self) -> Result<bool> {
        let n = self.n;
        let mut m = 0;
        let mut best = BigReal::zero(self.bits);
        let mut gp = self.gamma.clone();
        for i in 0..n - 1 {
            let v = &gp * &self.h[i][i].abs();
            if v > best {
                best = v;
                m = i;
            }
            gp = &gp * &self.gamma;
        }
        self.y.swap(m, m + 1);
        self.h.swap(m, m + 1);
        for row in self.b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let (a, c) = (self.h[m][m].clone(), self.h[m][m + 1].clone());
            let t0 = (a.square() + c.square()).sqrt()?;
            if t0.is_zero() {
                return Ok(false);
            }
            let t1 = &a / &t0;
            let t2 = &c / &t0;
            for i in m..n {
                let t3 = self.h[i][m].clone();
                let t4 = self.h[i][m + 1].clone();
                self.h[i][m] = &(&t1 * &t3) + &(&t2 * &t4);
                self.h[i][m + 1] = &(&t1 * &t4) - &(&t2 * &t3);
            }
        }
        for i in m + 1..n {
            self.reduce_row(i, (i - 1).min(m + 1));
        }
        Ok((0..n - 1).all(|j| !self.h[j][j].is_zero()))
    }
}

/// A named constant available for recognition.
#[derive(Debug, Clone)]
pub struct BasisConstant {
    pub name: String,
    pub render: String,
    pub value: BigReal,
}

pub const BASIS_NAMES: &[&str] = &["one", "pi", "pi2", "gamma", "exp_m2gamma", "zeta3", "ln2", "e"];

/// `one`, `pi`, `pi2`, `gamma`, `exp_m2gamma` (e^(−2γ)), `zeta3`, `ln2`, `e`.
pub fn basis_constant(name: &str, ctx: &PrecisionContext) -> Result<BasisConstant> {
    let bits = ctx.bits();
    let (render, value) = match name {
        "one" | "1" => ("1", BigReal::one(bits)),
        "pi" => ("π", pi(ctx)),
        "pi2" => ("π²", pi(ctx).square().round_to(bits)),
        "gamma" => ("γ", euler_gamma(ctx)?),
        "exp_m2gamma" => ("e^(−2γ)", exp(&-euler_gamma(ctx)?.mul_pow2(1), ctx)?),
        "zeta3" => ("ζ(3)", zeta3(ctx)?),
        "ln2" => ("ln 2", ln2(ctx)),
        "e" => ("e", exp(&BigReal::one(bits), ctx)?),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown basis constant `{other}` (known: {})",
                BASIS_NAMES.join(", ")
            )))
        }
    };
    Ok(BasisConstant { name: name.to_string(), render: render.to_string(), value })
}

pub fn basis(names: &[&str], ctx: &PrecisionContext) -> Result<Vec<BasisConstant>> {
    names.iter().map(|n| basis_constant(n, ctx)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionMatch {
    /// `m₀·value + Σ mᵢ·basisᵢ = 0`, basis entries in `names` order.
    pub coefficients: Vec<i64>,
    pub names: Vec<String>,
    pub residual: BigReal,
    pub confidence_digits: u32,
    /// `value = …` as a closed form.
    pub rendering: String,
}

impl RecognitionMatch {
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| (*c as f64).powi(2)).sum::<f64>().sqrt()
    }
}

/// Every subset of `basis` for which `value` is a rational combination,
/// sorted by residual and then coefficient norm. Empty when nothing clears
/// the confidence threshold.
pub fn recognize(value: &BigReal, basis: &[BasisConstant], precision_digits: u32) -> Result<Vec<RecognitionMatch>> {
    recognize_with(value, basis, precision_digits, RelationOptions::default())
}

pub fn recognize_with(
    value: &BigReal,
    basis: &[BasisConstant],
    precision_digits: u32,
    opts: RelationOptions,
) -> Result<Vec<RecognitionMatch>> {
    if basis.is_empty() {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    if basis.len() > 12 {
        return Err(Error::InvalidInput("at most 12 basis constants".into()));
    }
    let mut out: Vec<RecognitionMatch> = Vec::new();
    for mask in 1u32..(1 << basis.len()) {
        let chosen: Vec<&BasisConstant> =
            basis.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, b)| b).collect();
        let mut vals = vec![value.clone()];
        vals.extend(chosen.iter().map(|b| b.value.clone()));
        let Some(m) = find_integer_relation_with(&vals, precision_digits, opts)? else {
            continue;
        };
        // relations among the basis alone say nothing about the value, and
        // zero coefficients mean a smaller subset already covers it
        if m[0] == 0 || m.contains(&0) {
            continue;
        }
        let names: Vec<String> = chosen.iter().map(|b| b.name.clone()).collect();
        let bits = value.bits().max(chosen[0].value.bits());
        let mut r = value.round_to(bits).mul_int(m[0]);
        for (b, c) in chosen.iter().zip(&m[1..]) {
            r = r + b.value.mul_int(*c);
        }
        let residual = r.abs();
        let confidence_digits = if residual.is_zero() {
            precision_digits
        } else {
            let d = (-residual.log2_abs_f64() * std::f64::consts::LOG10_2).floor();
            (d.max(0.0) as u32).min(precision_digits)
        };
        let rendering = render_combination(&m, &chosen);
        out.push(RecognitionMatch { coefficients: m, names, residual, confidence_digits, rendering });
    }
    out.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .expect("finite")
            .then(a.coefficient_norm().partial_cmp(&b.coefficient_norm()).expect("finite"))
    });
    Ok(out)
}

/// `value = −Σ mᵢ bᵢ / m₀` written out, e.g. `4/9·π² - 7/2·ζ(3) - 1/6`.
fn render_combination(m: &[i64], chosen: &[&BasisConstant]) -> String {
    let m0 = BigInt::from(m[0]);
    let mut s = String::new();
    for (c, b) in m[1..].iter().zip(chosen) {
        let q = BigRational::new(BigInt::from(-*c), m0.clone());
        let neg = q.is_negative();
        let mag = q.abs();
        let coef = if mag.is_integer() { mag.numer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) };
        let term = if b.render == "1" {
            coef
        } else if mag.is_one() {
            b.render.clone()
        } else {
            format!("{coef}·{}", b.render)
        };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&term);
    }
    s
}
