//! Barzilai–Borwein gradient method
//!
//! `x_{k+1} = x_k − γ_k ∇F(x_k)` with the two-point step sizes
//!
//! * BB1: `γ = sᵀs / sᵀy`
//! * BB2: `γ = sᵀy / yᵀy`
//!
//! where `s = x_k − x_{k−1}` and `y = ∇F(x_k) − ∇F(x_{k−1})`. Plain `f64`
//! throughout.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const GAMMA_MIN: f64 = 1e-10;
pub const GAMMA_MAX: f64 = 1e10;

pub trait Objective {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Minimizing step along `−g` from `x`, when it has a closed form.
    fn exact_step(&self, _x: &[f64], _g: &[f64]) -> Option<f64> {
        None
    }

    fn name(&self) -> &str {
        "objective"
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn axpy(x: &[f64], alpha: f64, g: &[f64]) -> Vec<f64> {
    x.iter().zip(g).map(|(xi, gi)| xi + alpha * gi).collect()
}

/// `F(x) = ½ xᵀAx` for a symmetric matrix `A` (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    n: usize,
    a: Vec<f64>,
    scale: f64,
}

impl Quadratic {
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::InvalidInput(format!("matrix has {} entries, expected {}", a.len(), n * n)));
        }
        for i in 0..n {
            for j in 0..i {
                if (a[i * n + j] - a[j * n + i]).abs() > 1e-12 * (1.0 + a[i * n + j].abs()) {
                    return Err(Error::InvalidInput("matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self { n, a, scale: 1.0 })
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut a = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            a[i * n + i] = *v;
        }
        Self { n, a, scale: 1.0 }
    }

    /// `c·F`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { scale: self.scale * c, ..self.clone() }
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.scale * dot(&self.a[i * self.n..(i + 1) * self.n], x))
            .collect()
    }
}

impl Objective for Quadratic {
    fn dimension(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.apply(x))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.apply(x)
    }

    fn exact_step(&self, _x: &[f64], g: &[f64]) -> Option<f64> {
        let gag = dot(g, &self.apply(g));
        (gag > 0.0).then(|| dot(g, g) / gag)
    }

    fn name(&self) -> &str {
        "quadratic"
    }
}

/// `(a − x₁)² + b(x₂ − x₁²)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    pub a: f64,
    pub b: f64,
}

impl Default for Rosenbrock {
    fn default() -> Self {
        Self { a: 1.0, b: 100.0 }
    }
}

impl Objective for Rosenbrock {
    fn dimension(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.a - x[0]).powi(2) + self.b * (x[1] - x[0] * x[0]).powi(2)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let t = x[1] - x[0] * x[0];
        vec![-2.0 * (self.a - x[0]) - 4.0 * self.b * x[0] * t, 2.0 * self.b * t]
    }

    fn name(&self) -> &str {
        "rosenbrock"
    }
}

/// Separable `Σ (x_i⁴/4 + x_i²/2 − c_i x_i)`: smooth, strictly convex, not
/// quadratic.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticBowl {
    pub c: Vec<f64>,
}

impl Objective for QuarticBowl {
    fn dimension(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.c).map(|(v, c)| v.powi(4) / 4.0 + v * v / 2.0 - c * v).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.c).map(|(v, c)| v.powi(3) + v - c).collect()
    }

    fn name(&self) -> &str {
        "quartic"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Bb1,
    Bb2,
}

impl Variant {
    fn other(self) -> Self {
        match self {
            Self::Bb1 => Self::Bb2,
            Self::Bb2 => Self::Bb1,
        }
    }
}

/// The step size for `s`, `y`. Fails when the denominator (or, for BB1,
/// `s` itself) vanishes, or the quotient is not a positive finite number.
pub fn bb_step(s: &[f64], y: &[f64], variant: Variant) -> Result<f64> {
    let sy = dot(s, y);
    let g = match variant {
        Variant::Bb1 => {
            let ss = dot(s, s);
            if ss == 0.0 || sy == 0.0 {
                return Err(Error::DegenerateStep(format!("BB1 needs sᵀs, sᵀy ≠ 0 (sᵀy = {sy:e})")));
            }
            ss / sy
        }
        Variant::Bb2 => {
            let yy = dot(y, y);
            if yy == 0.0 {
                return Err(Error::DegenerateStep("BB2 needs y ≠ 0".into()));
            }
            sy / yy
        }
    };
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::DegenerateStep(format!("step size {g:e} is not positive")));
    }
    Ok(g)
}

/// The whole state the driver carries between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct BbState {
    pub x_k: Vec<f64>,
    pub x_km1: Vec<f64>,
    pub g_k: Vec<f64>,
    pub g_km1: Vec<f64>,
    pub k: usize,
    pub gamma_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Safeguard {
    pub enabled: bool,
    /// Steps must not raise F above the maximum over this many recent values.
    pub memory: usize,
    pub max_halvings: u32,
}

impl Safeguard {
    pub fn off() -> Self {
        Self { enabled: false, ..Self::default() }
    }
}

impl Default for Safeguard {
    fn default() -> Self {
        Self { enabled: true, memory: 10, max_halvings: 60 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    /// Step taken from this iterate; `None` at the final one.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceEntry>,
}

fn checked_eval(f: &dyn Objective, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let v = f.value(x);
    let g = f.gradient(x);
    if g.len() != x.len() {
        return Err(Error::InvalidInput(format!("gradient has {} components, point has {}", g.len(), x.len())));
    }
    if !v.is_finite() || g.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite(format!("objective or gradient at {x:?}")));
    }
    Ok((v, g))
}

fn check_start(f: &dyn Objective, x0: &[f64]) -> Result<()> {
    if x0.len() != f.dimension() {
        return Err(Error::InvalidInput(format!(
            "start point has dimension {}, objective {}",
            x0.len(),
            f.dimension()
        )));
    }
    Ok(())
}

/// Barzilai–Borwein minimization until `‖∇F‖ ≤ tol` or `max_iter` steps.
///
/// The first step uses `γ₀ = 1/‖∇F(x₀)‖` clamped to `[1e-10, 1e10]`. A
/// degenerate step size falls back to the other variant, then to the previous
/// `γ`. With the safeguard on, a step that would raise `F` above the largest
/// of the recent values is retried with `γ/2`.
pub fn bb_minimize(
    f: &dyn Objective,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
    variant: Variant,
    safeguard: Safeguard,
) -> Result<MinimizeResult> {
    check_start(f, x0)?;
    let (mut fx, g0) = checked_eval(f, x0)?;
    let mut trace = Vec::new();
    let mut recent: VecDeque<f64> = VecDeque::with_capacity(safeguard.memory.max(1));
    recent.push_back(fx);
    let gamma0 = (1.0 / norm(&g0)).clamp(GAMMA_MIN, GAMMA_MAX);
    let mut st = BbState { x_k: x0.to_vec(), x_km1: x0.to_vec(), g_k: g0.clone(), g_km1: g0, k: 0, gamma_k: gamma0 };

    loop {
        let gn = norm(&st.g_k);
        if gn <= tol || st.k >= max_iter {
            trace.push(TraceEntry { k: st.k, f: fx, grad_norm: gn, gamma: None });
            return Ok(MinimizeResult { x: st.x_k, f: fx, iterations: st.k, converged: gn <= tol, trace });
        }
        if st.k > 0 {
            let s = sub(&st.x_k, &st.x_km1);
            let y = sub(&st.g_k, &st.g_km1);
            st.gamma_k = bb_step(&s, &y, variant)
                .or_else(|_| bb_step(&s, &y, variant.other()))
                .unwrap_or(st.gamma_k);
        }
        let mut gamma = st.gamma_k;
        let (x_new, f_new, g_new) = {
            let mut halvings = 0;
            loop {
                let cand = axpy(&st.x_k, -gamma, &st.g_k);
                let attempt = checked_eval(f, &cand);
                let ceiling = recent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                match attempt {
                    Ok((v, g)) if !safeguard.enabled || v <= ceiling => break (cand, v, g),
                    Ok(_) | Err(Error::NonFinite(_)) if safeguard.enabled => {
                        halvings += 1;
                        if halvings > safeguard.max_halvings {
                            return Err(Error::DegenerateStep(format!(
                                "no acceptable step after {} halvings at iteration {}",
                                safeguard.max_halvings, st.k
                            )));
                        }
                        gamma /= 2.0;
                    }
                    Ok(_) => unreachable!("accepted above when the safeguard is off"),
                    Err(e) => return Err(e),
                }
            }
        };
        trace.push(TraceEntry { k: st.k, f: fx, grad_norm: gn, gamma: Some(gamma) });
        st.gamma_k = gamma;
        st.x_km1 = std::mem::replace(&mut st.x_k, x_new);
        st.g_km1 = std::mem::replace(&mut st.g_k, g_new);
        st.k += 1;
        fx = f_new;
        if recent.len() == safeguard.memory.max(1) {
            recent.pop_front();
        }
        recent.push_back(fx);
    }
}

/// Steepest descent: exact line search when the objective offers one,
/// Armijo backtracking otherwise.
pub fn steepest_descent_baseline(f: &dyn Objective, x0: &[f64], tol: f64, max_iter: usize) -> Result<MinimizeResult> {
    check_start(f, x0)?;
    let (mut fx, mut g) = checked_eval(f, x0)?;
    let mut x = x0.to_vec();
    let mut trace = Vec::new();
    let mut k = 0;
    let mut last_gamma: f64 = 1.0;
    loop {
        let gn = norm(&g);
        if gn <= tol || k >= max_iter {
            trace.push(TraceEntry { k, f: fx, grad_norm: gn, gamma: None });
            return Ok(MinimizeResult { x, f: fx, iterations: k, converged: gn <= tol, trace });
        }
        let (gamma, x_new, f_new, g_new) = match f.exact_step(&x, &g) {
            Some(gamma) => {
                let cand = axpy(&x, -gamma, &g);
                let (v, gg) = checked_eval(f, &cand)?;
                (gamma, cand, v, gg)
            }
            None => {
                let mut gamma = (2.0 * last_gamma).min(GAMMA_MAX);
                let mut tries = 0;
                loop {
                    let cand = axpy(&x, -gamma, &g);
                    if let Ok((v, gg)) = checked_eval(f, &cand) {
                        if v <= fx - 1e-4 * gamma * gn * gn {
                            break (gamma, cand, v, gg);
                        }
                    }
                    gamma /= 2.0;
                    tries += 1;
                    if tries > 200 {
                        return Err(Error::DegenerateStep(format!("backtracking failed at iteration {k}")));
                    }
                }
            }
        };
        trace.push(TraceEntry { k, f: fx, grad_norm: gn, gamma: Some(gamma) });
        last_gamma = gamma;
        x = x_new;
        fx = f_new;
        g = g_new;
        k += 1;
    }
}

/// Central-difference gradient, for checking supplied gradients.
pub fn finite_difference_gradient(f: &dyn Objective, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            let hi = h * (1.0 + x[i].abs());
            xp[i] += hi;
            xm[i] -= hi;
            (f.value(&xp) - f.value(&xm)) / (2.0 * hi)
        })
        .collect()
}
