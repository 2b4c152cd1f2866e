//! Globally adaptive composite Gauss-Legendre quadrature.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, a: f64, b: f64, f: F) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + f(mid + half * x) * (w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Initial number of uniform panels (at least 8).
    pub panels: usize,
    /// Nodes of the Gauss-Legendre rule used on each panel.
    pub order: usize,
    pub target_rel_tol: f64,
    /// Absolute floor so integrals that vanish can still converge.
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 16,
            order: 20,
            target_rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_panels: 20_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    pub fn with_tolerance(mut self, rel: f64, abs: f64) -> Self {
        self.target_rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.panels < 8 {
            return Err(Error::invalid(format!(
                "quadrature needs at least 8 panels, got {}",
                self.panels
            )));
        }
        if self.order < 2 {
            return Err(Error::invalid("quadrature order must be >= 2"));
        }
        if !(self.target_rel_tol > 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub panels: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<T: QuadValue, F: Fn(f64) -> T>(rule: &GaussLegendre, f: &F, a: f64, b: f64) -> Panel<T> {
    let whole = rule.integrate(a, b, f);
    let m = 0.5 * (a + b);
    let halves = rule.integrate(a, m, f) + rule.integrate(m, b, f);
    Panel {
        a,
        b,
        value: halves,
        err: (whole - halves).magnitude(),
    }
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the summed estimate is below
/// `max(target_rel_tol * |I|, abs_tol)`.
///
/// The per-panel estimate is the difference between the rule on the panel
/// and on its two halves, which bounds the error of the (kept) halved value
/// from above for smooth integrands.
pub fn integrate<T, F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let rule = GaussLegendre::new(spec.order);
    let width = (b - a) / spec.panels as f64;
    let mut heap: BinaryHeap<Panel<T>> = (0..spec.panels)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == spec.panels { b } else { a + width * (i + 1) as f64 };
            make_panel(&rule, &f, lo, hi)
        })
        .collect();

    loop {
        let total = heap.iter().fold(T::zero(), |acc, p| acc + p.value);
        let err: f64 = heap.iter().map(|p| p.err).sum();
        // summation rounding; the truncation estimate cannot resolve below it
        let roundoff = 16.0 * f64::EPSILON * heap.iter().map(|p| p.value.magnitude()).sum::<f64>();
        if !err.is_finite() || !total.magnitude().is_finite() {
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                error_estimate: err,
                panels: heap.len(),
            });
        }
        let target = (spec.target_rel_tol * total.magnitude())
            .max(spec.abs_tol)
            .max(roundoff);
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error_estimate: err + roundoff,
                panels: heap.len(),
            });
        }
        if heap.len() >= spec.max_panels {
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                error_estimate: err,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("panel heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // cannot split any further in floating point
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                error_estimate: err,
                panels: heap.len() + 1,
            });
        }
        heap.push(make_panel(&rule, &f, worst.a, m));
        heap.push(make_panel(&rule, &f, m, worst.b));
    }
}

/// [`integrate`] with the default spec, returning only the value.
pub fn integrate_value<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64) -> Result<T> {
    integrate(f, a, b, &QuadratureSpec::default()).map(|r| r.value)
}
