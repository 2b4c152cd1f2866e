//! Generalized (q-deformed) arithmetic.
//!
//! Everything here works on dimensionless numbers. Callers holding lengths
//! divide by the characteristic length `xi` of their [`DeformationParam`]
//! before calling in.
//!
//! The deformation enters only through `1 - q`. Formulas are written with
//! `ln_1p`/`exp_m1` so they stay accurate as `q -> 1`; below
//! [`Q_LIMIT_TOL`] the exact `q = 1` limit is used instead.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this `|1 - q|` every operation switches to its undeformed limit.
pub const Q_LIMIT_TOL: f64 = 1e-8;

/// Deformation bookkeeping: the index `q`, the characteristic length `xi`
/// and the deformation rate `gamma = (1 - q) / xi` (inverse length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParam {
    q: f64,
    xi: f64,
    gamma: f64,
}

impl DeformationParam {
    pub fn new(q: f64, xi: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::invalid(format!("q must be finite, got {q}")));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::invalid(format!("xi must be finite and > 0, got {xi}")));
        }
        Ok(Self {
            q,
            xi,
            gamma: (1.0 - q) / xi,
        })
    }

    /// Builds the parameter from a deformation rate, with `xi = 1` length unit.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        Self::from_gamma_xi(gamma, 1.0)
    }

    pub fn from_gamma_xi(gamma: f64, xi: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must be finite, got {gamma}")));
        }
        Self::new(1.0 - gamma * xi, xi)
    }

    /// The undeformed case `q = 1`.
    pub fn undeformed() -> Self {
        Self {
            q: 1.0,
            xi: 1.0,
            gamma: 0.0,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `1 - q`.
    pub fn one_minus_q(&self) -> f64 {
        1.0 - self.q
    }

    pub fn is_undeformed(&self) -> bool {
        near_one(self.q)
    }
}

impl Default for DeformationParam {
    fn default() -> Self {
        Self::undeformed()
    }
}

#[inline]
fn near_one(q: f64) -> bool {
    (1.0 - q).abs() < Q_LIMIT_TOL
}

/// `exp_q(x) = [1 + (1-q) x]_+^{1/(1-q)}`.
///
/// For `q < 1` the cutoff yields `0` once the base is non-positive. For
/// `q > 1` the function diverges at `x = 1/(q-1)`; at or past that point a
/// [`Error::Pole`] is returned instead of an infinite float.
pub fn q_exp(x: f64, q: f64) -> Result<f64> {
    if near_one(q) {
        return Ok(x.exp());
    }
    let e = 1.0 - q;
    let base = 1.0 + e * x;
    if base <= 0.0 {
        if e > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::pole(format!(
            "exp_q({x}) with q = {q} lies at or beyond the pole x = {}",
            1.0 / (q - 1.0)
        )));
    }
    let v = ((e * x).ln_1p() / e).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::pole(format!("exp_q({x}) with q = {q} overflows")))
    }
}

/// Principal-branch `[1 + i(1-q) x]^{1/(1-q)}`; `cos x + i sin x` at `q = 1`.
pub fn q_exp_im(x: f64, q: f64) -> Complex64 {
    if near_one(q) {
        return Complex64::from_polar(1.0, x);
    }
    let e = 1.0 - q;
    let ex = e * x;
    // log of 1 + i ex: real part 0.5 ln(1 + ex^2), argument atan(ex)
    let modulus = (0.5 * (ex * ex).ln_1p() / e).exp();
    let phase = ex.atan() / e;
    Complex64::from_polar(modulus, phase)
}

/// `rho_q(x) = sqrt(exp_q((1-q) x^2))`, the modulus of [`q_exp_im`].
pub fn q_norm_rho(x: f64, q: f64) -> Result<f64> {
    let e = 1.0 - q;
    Ok(q_exp(e * x * x, q)?.sqrt())
}

/// `ln_q(y) = (y^{1-q} - 1)/(1-q)`, the inverse of [`q_exp`] off the cutoff.
pub fn q_log(y: f64, q: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain(format!("ln_q requires y > 0, got {y}")));
    }
    if near_one(q) {
        return Ok(y.ln());
    }
    let e = 1.0 - q;
    Ok((e * y.ln()).exp_m1() / e)
}

/// `a (+)_q b = a + b + (1-q) a b`.
pub fn q_add(a: f64, b: f64, q: f64) -> f64 {
    a + b + (1.0 - q) * a * b
}

/// `a (-)_q b = (a - b) / (1 + (1-q) b)`.
pub fn q_sub(a: f64, b: f64, q: f64) -> Result<f64> {
    let den = 1.0 + (1.0 - q) * b;
    if den == 0.0 {
        return Err(Error::pole(format!(
            "q-difference with b = {b} = 1/(q-1) (q = {q})"
        )));
    }
    let v = (a - b) / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::pole(format!("q-difference overflow at b = {b}, q = {q}")))
    }
}

/// `n (.)_q x = {[1 + (1-q) x]^n - 1}/(1-q)`, the n-fold q-sum of `x`.
///
/// Real `n` is accepted; a negative base is only allowed for integer `n`.
/// `q_ntimes(n, 1.0, q)` is the Heine deformed number.
pub fn q_ntimes(n: f64, x: f64, q: f64) -> Result<f64> {
    if near_one(q) {
        return Ok(n * x);
    }
    let e = 1.0 - q;
    let base = 1.0 + e * x;
    if base > 0.0 {
        return Ok((n * (e * x).ln_1p()).exp_m1() / e);
    }
    if n.fract() != 0.0 {
        return Err(Error::domain(format!(
            "fractional power {n} of negative base {base}"
        )));
    }
    let v = (base.powf(n) - 1.0) / e;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::pole(format!("{n} (.)_q {x} diverges for q = {q}")))
    }
}

/// The "q-product" `a (x)_q b = [a^{1-q} + b^{1-q} - 1]_+^{1/(1-q)}`.
///
/// Not the same thing as [`q_ntimes`]. Nothing in the physics uses it; it is
/// kept so the two can be told apart in tests.
pub fn q_product(a: f64, b: f64, q: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("q-product requires positive arguments"));
    }
    if near_one(q) {
        return Ok(a * b);
    }
    let e = 1.0 - q;
    let base = a.powf(e) + b.powf(e) - 1.0;
    if base <= 0.0 {
        if e > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::pole("q-product diverges"));
    }
    Ok(base.powf(1.0 / e))
}

/// A real function of one real variable, optionally carrying closed-form
/// derivatives. Plain closures get finite differences.
pub trait RealFn {
    fn eval(&self, u: f64) -> f64;

    fn derivative(&self, _u: f64) -> Option<f64> {
        None
    }

    fn second_derivative(&self, _u: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64) -> f64> RealFn for F {
    fn eval(&self, u: f64) -> f64 {
        self(u)
    }
}

/// A function bundled with its first and second derivatives.
pub struct Analytic<F, D1, D2> {
    pub f: F,
    pub df: D1,
    pub d2f: D2,
}

impl<F, D1, D2> RealFn for Analytic<F, D1, D2>
where
    F: Fn(f64) -> f64,
    D1: Fn(f64) -> f64,
    D2: Fn(f64) -> f64,
{
    fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    fn derivative(&self, u: f64) -> Option<f64> {
        Some((self.df)(u))
    }

    fn second_derivative(&self, u: f64) -> Option<f64> {
        Some((self.d2f)(u))
    }
}

fn fd_step(u: f64, rel: f64) -> f64 {
    rel.max(rel * u.abs())
}

fn first_derivative<F: RealFn + ?Sized>(f: &F, u: f64) -> f64 {
    f.derivative(u).unwrap_or_else(|| {
        let h = fd_step(u, 1e-6);
        (f.eval(u + h) - f.eval(u - h)) / (2.0 * h)
    })
}

fn second_derivative<F: RealFn + ?Sized>(f: &F, u: f64) -> f64 {
    f.second_derivative(u).unwrap_or_else(|| {
        // 1e-6 would leave ~1e-4 of roundoff in a second difference
        let h = fd_step(u, 1e-4);
        (f.eval(u + h) - 2.0 * f.eval(u) + f.eval(u - h)) / (h * h)
    })
}

fn dual_weight(fu: f64, q: f64) -> Result<f64> {
    let w = 1.0 + (1.0 - q) * fu;
    if w == 0.0 || !w.is_finite() {
        return Err(Error::pole(format!(
            "1 + (1-q) f(u) vanishes (f = {fu}, q = {q})"
        )));
    }
    Ok(w)
}

/// Dual q-derivative `f'(u) / (1 + (1-q) f(u))`.
pub fn dual_q_derivative<F: RealFn + ?Sized>(f: &F, u: f64, q: f64) -> Result<f64> {
    let w = dual_weight(f.eval(u), q)?;
    Ok(first_derivative(f, u) / w)
}

/// Second dual q-derivative, the nested form
/// `(1/w) d/du [ f'/w ]` with `w = 1 + (1-q) f`.
///
/// Expanded, that is `f''/w^2 - (1-q) f'^2 / w^3`, which is what gets
/// evaluated.
pub fn dual_q_second_derivative<F: RealFn + ?Sized>(f: &F, u: f64, q: f64) -> Result<f64> {
    let w = dual_weight(f.eval(u), q)?;
    let d1 = first_derivative(f, u);
    let d2 = second_derivative(f, u);
    Ok(d2 / (w * w) - (1.0 - q) * d1 * d1 / (w * w * w))
}
