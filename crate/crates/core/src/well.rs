//! Closed-form physics of the position-dependent-mass particle in the
//! infinite square well `0 <= x <= L`.
//!
//! With `u = 1 + gamma x` and `y = ln(u)/gamma` the problem is an ordinary
//! box of length `ln(1 + gamma L)/gamma` in `y`. All formulas depend on the
//! deformation only through the dimensionless `s = gamma L`; they are
//! written in terms of `s` and helpers that stay accurate as `s -> 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::quadrature::{integrate, QuadratureSpec};
use crate::qcalc::DeformationParam;

/// Below this `|gamma L|` the `ln(1 + s)/s` ratio uses its series.
pub const SMALL_GAMMA_L: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellSpec {
    length: f64,
    mass: f64,
    hbar: f64,
    dp: DeformationParam,
}

impl WellSpec {
    pub fn new(length: f64, mass: f64, hbar: f64, dp: DeformationParam) -> Result<Self> {
        for (name, v) in [("L", length), ("m", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(1.0 + dp.gamma() * length > 0.0) {
            return Err(Error::invalid(format!(
                "gamma L = {} puts the singularity x = -1/gamma inside the well",
                dp.gamma() * length
            )));
        }
        Ok(Self {
            length,
            mass,
            hbar,
            dp,
        })
    }

    /// `L = m = hbar = 1`, configured by `gamma L` alone.
    pub fn dimensionless(gamma_l: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, DeformationParam::from_gamma(gamma_l)?)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn deformation(&self) -> DeformationParam {
        self.dp
    }

    pub fn gamma(&self) -> f64 {
        self.dp.gamma()
    }

    pub fn gamma_l(&self) -> f64 {
        self.dp.gamma() * self.length
    }

    /// `ln(1 + gamma L)`.
    pub fn log_span(&self) -> f64 {
        self.gamma_l().ln_1p()
    }

    /// Length of the well in the deformed coordinate, `ln(1 + gamma L)/gamma`.
    pub fn deformed_length(&self) -> f64 {
        self.length * ln1p_ratio(self.gamma_l())
    }

    /// Position-dependent mass `m / (1 + gamma x)^2`.
    pub fn mass_at(&self, x: f64) -> f64 {
        let u = 1.0 + self.gamma() * x;
        self.mass / (u * u)
    }
}

/// `ln(1 + s)/s`, continuous through `s = 0`.
pub fn ln1p_ratio(s: f64) -> f64 {
    if s.abs() < SMALL_GAMMA_L {
        1.0 - s / 2.0 + s * s / 3.0
    } else {
        s.ln_1p() / s
    }
}

/// `s - ln(1 + s)`, without the cancellation for small `s`.
fn s_minus_ln1p(s: f64) -> f64 {
    if s.abs() < 1e-2 {
        // s^2/2 - s^3/3 + s^4/4 - ...
        let mut term = -s;
        let mut acc = 0.0;
        for k in 2..14 {
            term *= -s;
            acc += term / k as f64;
        }
        acc
    } else {
        s - s.ln_1p()
    }
}

/// `ln(1 + s) - s + s^2/2`, i.e. `s^3/3 - s^4/4 + ...`.
fn ln1p_cubic_remainder(s: f64) -> f64 {
    if s.abs() < 1e-2 {
        let mut term = s * s;
        let mut acc = 0.0;
        for k in 3..16 {
            term *= -s;
            acc -= term / k as f64;
        }
        acc
    } else {
        s.ln_1p() - s + 0.5 * s * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResult {
    pub n: usize,
    pub k_qn: f64,
    pub energy: f64,
    /// `A_{q,n}`, so that `A^2 = 2 gamma / ln(1 + gamma L)`.
    pub normalization: f64,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("quantum number n must be >= 1"))
    } else {
        Ok(())
    }
}

/// `k_{q,n} = n pi gamma / ln(1 + gamma L)`, tending to `n pi / L`.
pub fn k_qn(spec: &WellSpec, n: usize) -> f64 {
    n as f64 * PI / spec.deformed_length()
}

/// `E_n = hbar^2 k_{q,n}^2 / 2m`.
pub fn energy(spec: &WellSpec, n: usize) -> f64 {
    let k = k_qn(spec, n);
    spec.hbar * spec.hbar * k * k / (2.0 * spec.mass)
}

/// `A_{q,n}^2 = 2 gamma / ln(1 + gamma L)` (`2/L` in the limit).
pub fn normalization_sq(spec: &WellSpec) -> f64 {
    2.0 / spec.deformed_length()
}

pub fn eigen(spec: &WellSpec, n: usize) -> Result<EigenResult> {
    check_n(n)?;
    Ok(EigenResult {
        n,
        k_qn: k_qn(spec, n),
        energy: energy(spec, n),
        normalization: normalization_sq(spec).sqrt(),
    })
}

/// Deformed coordinate `ln(1 + gamma x)/gamma` measured in units of the
/// deformed well length, so `0` at `x = 0` and `1` at `x = L`.
fn deformed_fraction(spec: &WellSpec, x: f64) -> f64 {
    let g = spec.gamma();
    x * ln1p_ratio(g * x) / spec.deformed_length()
}

/// Sine argument `(k/gamma) ln(1 + gamma x)` of the n-th eigenfunction.
pub fn phase(spec: &WellSpec, n: usize, x: f64) -> f64 {
    n as f64 * PI * deformed_fraction(spec, x)
}

/// `psi_n(x) = A / sqrt(1 + gamma x) * sin[(k/gamma) ln(1 + gamma x)]` on
/// `[0, L]`, zero outside.
pub fn psi_n(spec: &WellSpec, n: usize, x: f64) -> f64 {
    if !(0.0..=spec.length).contains(&x) {
        return 0.0;
    }
    let u = 1.0 + spec.gamma() * x;
    let a = normalization_sq(spec).sqrt();
    a / u.sqrt() * phase(spec, n, x).sin()
}

/// `psi_n` together with its first and second derivatives (analytic),
/// valid inside `[0, L]`.
pub fn psi_n_derivatives(spec: &WellSpec, n: usize, x: f64) -> [f64; 3] {
    let g = spec.gamma();
    let k = k_qn(spec, n);
    let u = 1.0 + g * x;
    let a = normalization_sq(spec).sqrt();
    let (s, c) = phase(spec, n, x).sin_cos();
    let su = u.sqrt();
    let v0 = a / su * s;
    let v1 = a / (u * su) * (k * c - 0.5 * g * s);
    let v2 = a / (u * u * su) * ((0.75 * g * g - k * k) * s - 2.0 * g * k * c);
    [v0, v1, v2]
}

/// Zeros of `psi_n` strictly inside the well:
/// `x_j = [exp(j pi gamma / k) - 1]/gamma`, `j = 1..n-1`.
pub fn interior_nodes(spec: &WellSpec, n: usize) -> Vec<f64> {
    let g = spec.gamma();
    let k = k_qn(spec, n);
    (1..n)
        .map(|j| {
            let y = j as f64 * PI / k;
            if g == 0.0 {
                y
            } else {
                (g * y).exp_m1() / g
            }
        })
        .collect()
}

/// Plane-wave-like solution of the null-potential equation,
/// `(1 + gamma x)^{-1/2} exp[+- i (k/gamma) ln(1 + gamma x)]`.
pub fn free_eigenfunction(dp: &DeformationParam, k: f64, sign: Sign, x: f64) -> Result<Complex64> {
    let g = dp.gamma();
    let u = 1.0 + g * x;
    if !(u > 0.0) {
        return Err(Error::Singularity { at: -1.0 / g });
    }
    let y = x * ln1p_ratio(g * x);
    Ok(Complex64::from_polar(1.0 / u.sqrt(), sign.value() * k * y))
}

/// Value and first three derivatives of [`free_eigenfunction`].
pub fn free_eigenfunction_jet(
    dp: &DeformationParam,
    k: f64,
    sign: Sign,
    x: f64,
) -> Result<[Complex64; 4]> {
    let g = dp.gamma();
    let f = free_eigenfunction(dp, k, sign, x)?;
    let u = 1.0 + g * x;
    // f' = c f / u with c = -gamma/2 + i s k; each derivative lowers the
    // power of u by one: f^(j) = f prod_{m<j} (c - m gamma) / u^j
    let c = Complex64::new(-0.5 * g, sign.value() * k);
    let d1 = f * c / u;
    let d2 = d1 * (c - g) / u;
    let d3 = d2 * (c - 2.0 * g) / u;
    Ok([f, d1, d2, d3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Residual of the null-potential equation
/// `-(u^2 hbar^2/2m) psi'' - (hbar^2 gamma u/m) psi' - (hbar^2 gamma^2/8m) psi - E psi`
/// for the free eigenfunction with `E = hbar^2 k^2 / 2m`.
pub fn free_equation_residual(
    dp: &DeformationParam,
    hbar: f64,
    mass: f64,
    k: f64,
    sign: Sign,
    x: f64,
) -> Result<f64> {
    let g = dp.gamma();
    let [f, d1, d2, _] = free_eigenfunction_jet(dp, k, sign, x)?;
    let u = 1.0 + g * x;
    let e = hbar * hbar * k * k / (2.0 * mass);
    let h2m = hbar * hbar / mass;
    let lhs = -(u * u * 0.5 * h2m) * d2 - (h2m * g * u) * d1 - (h2m * g * g / 8.0) * f;
    Ok((lhs - f * e).norm())
}

/// The four moments of a state or distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub x_mean: f64,
    pub x2_mean: f64,
    pub p_mean: f64,
    pub p2_mean: f64,
}

impl Moments {
    pub fn position_variance(&self) -> f64 {
        self.x2_mean - self.x_mean * self.x_mean
    }

    pub fn momentum_variance(&self) -> f64 {
        self.p2_mean - self.p_mean * self.p_mean
    }
}

/// First term shared by `<x>` and the classical mean: `(s - ln(1+s))/(gamma ln(1+s))`.
fn mean_position_term(spec: &WellSpec) -> f64 {
    let s = spec.gamma_l();
    let l = spec.length;
    if s == 0.0 {
        return 0.5 * l;
    }
    // (s - ln(1+s)) / (s ln(1+s)) * L
    l * s_minus_ln1p(s) / (s * s * ln1p_ratio(s))
}

/// First term shared by `<x^2>` and the classical second moment:
/// `(s^2 - 2 s + 2 ln(1+s)) / (2 gamma^2 ln(1+s))`.
fn mean_square_term(spec: &WellSpec) -> f64 {
    let s = spec.gamma_l();
    let l = spec.length;
    if s == 0.0 {
        return l * l / 3.0;
    }
    // numerator is 2 [ln(1+s) - s + s^2/2]
    l * l * ln1p_cubic_remainder(s) / (s * s * s * ln1p_ratio(s))
}

/// Closed-form quantum moments of the n-th eigenstate.
///
/// `<x^2>` uses the reading whose second term has numerator
/// `[1 - (1+s)^2] ln(1+s)`; that is the form that reduces to
/// `L^2/3 - L^2/(2 n^2 pi^2)` as `gamma -> 0` and agrees with quadrature.
/// `<p^2>` is evaluated in the factored form
/// `hbar^2 F k^2/(k^2 + gamma^2) [(k - i gamma/2)(k + i gamma/2) + gamma^2]`
/// with `F = [(1+s)^2 - 1] / [2 (1+s)^2 ln(1+s)]`.
pub fn quantum_moments(spec: &WellSpec, n: usize) -> Result<Moments> {
    check_n(n)?;
    let s = spec.gamma_l();
    let l = spec.length;
    let g = spec.gamma();
    let nf = n as f64;
    let ln = s.ln_1p();
    let ratio = ln1p_ratio(s);

    // -L ln / (ln^2 + 4 n^2 pi^2)
    let x_osc = -l * ln / (ln * ln + 4.0 * nf * nf * PI * PI);
    let x_mean = mean_position_term(spec) + x_osc;

    // -(2 + s) (ln/s) L^2 / [2 (ln^2 + n^2 pi^2)]  +  2 (ln/s) L^2 / (ln^2 + 4 n^2 pi^2)
    let t2 = -(2.0 + s) * ratio * l * l / (2.0 * (ln * ln + nf * nf * PI * PI));
    let t3 = 2.0 * ratio * l * l / (ln * ln + 4.0 * nf * nf * PI * PI);
    let x2_mean = mean_square_term(spec) + t2 + t3;

    let k = k_qn(spec, n);
    let factor = classical_p2_factor(s);
    let half = Complex64::new(0.0, 0.5 * g);
    let product = (Complex64::new(k, 0.0) - half) * (Complex64::new(k, 0.0) + half);
    let bracket = product.re + g * g;
    let p2_mean = spec.hbar * spec.hbar * factor * k * k / (k * k + g * g) * bracket;

    Ok(Moments {
        x_mean,
        x2_mean,
        p_mean: 0.0,
        p2_mean,
    })
}

/// `[(1+s)^2 - 1] / [2 (1+s)^2 ln(1+s)]`; tends to 1 as `s -> 0`.
fn classical_p2_factor(s: f64) -> f64 {
    let u = 1.0 + s;
    // (s^2 + 2 s) / (2 u^2 s ratio) = (s + 2)/(2 u^2 ratio)
    (s + 2.0) / (2.0 * u * u * ln1p_ratio(s))
}

/// The same moments by quadrature of the analytic eigenfunction:
/// `<x^k> = int x^k psi^2`, `<p> = -i hbar int psi psi'`,
/// `<p^2> = -hbar^2 int psi psi''`.
///
/// `<p>` is returned as the magnitude of the (purely imaginary) integral
/// times `hbar`; it vanishes for a real eigenfunction.
pub fn quantum_moments_oracle(spec: &WellSpec, n: usize) -> Result<Moments> {
    quantum_moments_oracle_with(spec, n, &oracle_quadrature())
}

pub(crate) fn oracle_quadrature() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerance(1e-14, 1e-16).with_panels(32)
}

pub fn quantum_moments_oracle_with(
    spec: &WellSpec,
    n: usize,
    quad: &QuadratureSpec,
) -> Result<Moments> {
    check_n(n)?;
    let l = spec.length;
    let x_mean = integrate(|x| x * psi_n(spec, n, x).powi(2), 0.0, l, quad)?.value;
    let x2_mean = integrate(|x| x * x * psi_n(spec, n, x).powi(2), 0.0, l, quad)?.value;
    let p_int = integrate(
        |x| {
            let [v, d1, _] = psi_n_derivatives(spec, n, x);
            v * d1
        },
        0.0,
        l,
        quad,
    )?
    .value;
    let p2_int = integrate(
        |x| {
            let [v, _, d2] = psi_n_derivatives(spec, n, x);
            v * d2
        },
        0.0,
        l,
        quad,
    )?
    .value;
    Ok(Moments {
        x_mean,
        x2_mean,
        p_mean: spec.hbar * p_int,
        p2_mean: -spec.hbar * spec.hbar * p2_int,
    })
}

/// `sqrt(Var x Var p) / hbar` from the quadrature moments.
pub fn uncertainty_product(spec: &WellSpec, n: usize) -> Result<f64> {
    let m = quantum_moments_oracle(spec, n)?;
    Ok((m.position_variance() * m.momentum_variance()).sqrt() / spec.hbar)
}

/// Time-average density of the classical particle bouncing freely between
/// the walls: `gamma / [(1 + gamma x) ln(1 + gamma L)]`.
pub fn classical_density(spec: &WellSpec, x: f64) -> f64 {
    if !(0.0..=spec.length).contains(&x) {
        return 0.0;
    }
    let u = 1.0 + spec.gamma() * x;
    1.0 / (u * spec.deformed_length())
}

/// Upper bound of every `|psi_n|^2`: `A^2 / (1 + gamma x)`, twice the
/// classical density.
pub fn density_envelope(spec: &WellSpec, x: f64) -> f64 {
    2.0 * classical_density(spec, x)
}

/// Classical moments at energy `e` (the particle bounces with `|p_q|`
/// fixed, so `p = p_q/(1 + gamma x)`).
pub fn classical_moments(spec: &WellSpec, e: f64) -> Result<Moments> {
    if !(e > 0.0) {
        return Err(Error::invalid(format!("energy must be > 0, got {e}")));
    }
    let s = spec.gamma_l();
    Ok(Moments {
        x_mean: mean_position_term(spec),
        x2_mean: mean_square_term(spec),
        p_mean: 0.0,
        p2_mean: 2.0 * spec.mass * e * classical_p2_factor(s),
    })
}

/// Local average of `|psi_n|^2` next to the classical density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedDensity {
    pub x: f64,
    /// Averaging window; one half-oscillation of `psi_n` (a full period of
    /// `sin^2`), centred on `x` unless that would cross a wall.
    pub lo: f64,
    pub hi: f64,
    /// Mean of `|psi_n|^2` over the window.
    pub quantum: f64,
    /// Mean of the classical density over the same window.
    pub classical_window: f64,
    /// Classical density at `x` itself.
    pub classical_point: f64,
    /// Whether the window had to be shifted to stay inside the well.
    pub shifted: bool,
}

/// Averages `|psi_n|^2` over one local half-oscillation around `x`.
///
/// The window spans `pi/k` in the deformed coordinate `ln(1 + gamma x)/gamma`,
/// centred on `x`; near a wall it is shifted inwards so it keeps its full
/// width.
pub fn windowed_density(spec: &WellSpec, n: usize, x: f64) -> Result<WindowedDensity> {
    check_n(n)?;
    if !(0.0..=spec.length).contains(&x) {
        return Err(Error::domain(format!("x = {x} is outside the well")));
    }
    let g = spec.gamma();
    let k = k_qn(spec, n);
    let y_of = |x: f64| x * ln1p_ratio(g * x);
    let x_of = |y: f64| if g == 0.0 { y } else { (g * y).exp_m1() / g };
    let width = PI / k;
    let y_max = spec.deformed_length();
    let mut y_lo = y_of(x) - 0.5 * width;
    let mut shifted = false;
    if y_lo < 0.0 {
        y_lo = 0.0;
        shifted = true;
    }
    if y_lo + width > y_max {
        y_lo = (y_max - width).max(0.0);
        shifted = true;
    }
    let lo = x_of(y_lo);
    let hi = x_of((y_lo + width).min(y_max)).min(spec.length);
    let quad = QuadratureSpec::default().with_tolerance(1e-12, 1e-15);
    let q = integrate(|t| psi_n(spec, n, t).powi(2), lo, hi, &quad)?.value;
    let c = integrate(|t| classical_density(spec, t), lo, hi, &quad)?.value;
    Ok(WindowedDensity {
        x,
        lo,
        hi,
        quantum: q / (hi - lo),
        classical_window: c / (hi - lo),
        classical_point: classical_density(spec, x),
        shifted,
    })
}

/// Probability density `|psi_{n1}(x) psi_{n2}(y)|^2` in a square box of
/// side `L`, deformed identically along both axes.
pub fn box2d_density(spec: &WellSpec, n1: usize, n2: usize, x: f64, y: f64) -> f64 {
    (psi_n(spec, n1, x) * psi_n(spec, n2, y)).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn quad_value<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        integrate(f, a, b, &oracle_quadrature()).unwrap().value
    }

    #[test]
    fn spec_validation() {
        assert!(WellSpec::dimensionless(-1.0).is_err());
        assert!(WellSpec::dimensionless(-0.5).is_ok());
        let dp = DeformationParam::from_gamma(0.1).unwrap();
        assert!(WellSpec::new(0.0, 1.0, 1.0, dp).is_err());
        assert!(WellSpec::new(1.0, -1.0, 1.0, dp).is_err());
        assert!(WellSpec::new(20.0, 1.0, 1.0, DeformationParam::from_gamma(-0.1).unwrap()).is_err());
    }

    #[test]
    fn k_examples() {
        let w0 = WellSpec::dimensionless(0.0).unwrap();
        assert_relative_eq!(k_qn(&w0, 1), PI, max_relative = 1e-15);
        let w = WellSpec::dimensionless(E - 1.0).unwrap();
        assert_relative_eq!(k_qn(&w, 1), PI * (E - 1.0), max_relative = 1e-14);
        assert_relative_eq!(k_qn(&w, 1), 5.39814, max_relative = 1e-5);
        for n in 1..8 {
            assert_relative_eq!(k_qn(&w, n) / k_qn(&w, 1), n as f64, max_relative = 1e-15);
        }
        // continuity through gamma = 0
        let tiny = WellSpec::dimensionless(1e-9).unwrap();
        assert_relative_eq!(k_qn(&tiny, 1), PI, max_relative = 1e-8);
    }

    #[test]
    fn energy_examples() {
        let w0 = WellSpec::dimensionless(0.0).unwrap();
        assert_relative_eq!(energy(&w0, 1), PI * PI / 2.0, max_relative = 1e-15);
        let w = WellSpec::dimensionless(E - 1.0).unwrap();
        let expect = PI * PI * (E - 1.0).powi(2) / 2.0;
        assert_relative_eq!(energy(&w, 1), expect, max_relative = 1e-14);
        assert_relative_eq!(energy(&w, 1), 14.5700, max_relative = 1e-5);
        for n in 1..6 {
            assert_relative_eq!(energy(&w, n) / energy(&w, 1), (n * n) as f64, max_relative = 1e-14);
        }
        // closed form hbar^2 pi^2 gamma^2 n^2 / (2 m ln^2(1 + gamma L))
        let dp = DeformationParam::from_gamma(0.7).unwrap();
        let spec = WellSpec::new(2.0, 3.0, 0.5, dp).unwrap();
        let expected = 0.25 * PI * PI * 0.49 * 9.0 / (2.0 * 3.0 * (1.4f64).ln_1p().powi(2));
        assert_relative_eq!(energy(&spec, 3), expected, max_relative = 1e-14);
    }

    #[test]
    fn eigenfunction_boundaries_and_limit() {
        for &s in &[0.0, 0.5, 2.0, 10.0, -0.5] {
            let w = WellSpec::dimensionless(s).unwrap();
            for n in 1..5 {
                assert!(psi_n(&w, n, 0.0).abs() < 1e-15);
                assert!(psi_n(&w, n, 1.0).abs() < 1e-13);
                assert_eq!(psi_n(&w, n, 1.5), 0.0);
                assert_eq!(psi_n(&w, n, -0.1), 0.0);
            }
        }
        let w = WellSpec::dimensionless(1e-12).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let std = 2f64.sqrt() * (2.0 * PI * x).sin();
            assert!((psi_n(&w, 2, x) - std).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenfunction_normalized_by_quadrature() {
        for &s in &[0.0, 0.5, 2.0, 10.0, -0.5] {
            let w = WellSpec::dimensionless(s).unwrap();
            for n in [1, 2, 5] {
                let norm = quad_value(|x| psi_n(&w, n, x).powi(2), 0.0, 1.0);
                assert!((norm - 1.0).abs() < 1e-12, "s = {s}, n = {n}: {norm}");
                // in the deformed chart the integrand is A^2 sin^2(k y)
                let ly = w.deformed_length();
                let a2 = normalization_sq(&w);
                let k = k_qn(&w, n);
                let chart = quad_value(|y| a2 * (k * y).sin().powi(2), 0.0, ly);
                assert!((chart - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let w = WellSpec::dimensionless(3.0).unwrap();
        let h = 1e-5;
        for &x in &[0.1, 0.37, 0.8] {
            let [_, d1, d2] = psi_n_derivatives(&w, 3, x);
            let fd1 = (psi_n(&w, 3, x + h) - psi_n(&w, 3, x - h)) / (2.0 * h);
            let fd2 = (psi_n(&w, 3, x + h) - 2.0 * psi_n(&w, 3, x) + psi_n(&w, 3, x - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()));
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn node_count_and_positions() {
        for &s in &[0.0, 2.0, 10.0, -0.5] {
            let w = WellSpec::dimensionless(s).unwrap();
            for n in 1..7 {
                let nodes = interior_nodes(&w, n);
                assert_eq!(nodes.len(), n - 1);
                for &x in &nodes {
                    assert!(x > 0.0 && x < 1.0);
                    assert!(psi_n(&w, n, x).abs() < 1e-12);
                }
                let samples = 4000;
                let mut changes = 0;
                let mut prev = psi_n(&w, n, 0.5 / samples as f64);
                for i in 1..samples {
                    let v = psi_n(&w, n, (i as f64 + 0.5) / samples as f64);
                    if v * prev < 0.0 {
                        changes += 1;
                    }
                    prev = v;
                }
                assert_eq!(changes, n - 1);
            }
        }
    }

    #[test]
    fn free_eigenfunction_properties() {
        let dp0 = DeformationParam::undeformed();
        let z = free_eigenfunction(&dp0, 2.0, Sign::Plus, 0.3).unwrap();
        assert!((z - Complex64::from_polar(1.0, 0.6)).norm() < 1e-15);
        let dp = DeformationParam::from_gamma(1.5).unwrap();
        for &x in &[-0.5, 0.0, 0.7, 3.0] {
            for sign in [Sign::Plus, Sign::Minus] {
                let z = free_eigenfunction(&dp, 4.0, sign, x).unwrap();
                assert_relative_eq!(z.norm_sqr(), 1.0 / (1.0 + 1.5 * x), max_relative = 1e-14);
                assert!(free_equation_residual(&dp, 1.0, 1.0, 4.0, sign, x).unwrap() < 1e-8);
            }
        }
        assert!(matches!(
            free_eigenfunction(&dp, 1.0, Sign::Plus, -1.0 / 1.5),
            Err(Error::Singularity { .. })
        ));
        // [exp_q(x/xi)]^{i k xi} form
        let dp = DeformationParam::new(0.4, 2.0).unwrap();
        let x = 1.3;
        let eq = crate::qcalc::q_exp(x / 2.0, 0.4).unwrap();
        let alt = Complex64::from_polar(1.0, 3.0 * 2.0 * eq.ln()) / (1.0 + dp.gamma() * x).sqrt();
        let z = free_eigenfunction(&dp, 3.0, Sign::Plus, x).unwrap();
        assert!((z - alt).norm() < 1e-14);
    }

    #[test]
    fn free_eigenfunction_jet_matches_fd() {
        let dp = DeformationParam::from_gamma(0.8).unwrap();
        let h = 1e-5;
        let x = 0.6;
        let jet = free_eigenfunction_jet(&dp, 3.0, Sign::Minus, x).unwrap();
        let f = |x| free_eigenfunction(&dp, 3.0, Sign::Minus, x).unwrap();
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        assert!((jet[1] - fd).norm() < 1e-8);
        let fd2 = {
            let g = |x| free_eigenfunction_jet(&dp, 3.0, Sign::Minus, x).unwrap()[2];
            (g(x + h) - g(x - h)) / (2.0 * h)
        };
        assert!((jet[3] - fd2).norm() < 1e-6);
    }

    #[test]
    fn quantum_moment_examples() {
        let w = WellSpec::dimensionless(E - 1.0).unwrap();
        let m = quantum_moments(&w, 1).unwrap();
        let expect = (E - 2.0) / (E - 1.0) - 1.0 / (1.0 + 4.0 * PI * PI);
        assert_relative_eq!(m.x_mean, expect, max_relative = 1e-14);
        assert_relative_eq!(m.x_mean, 0.39332, max_relative = 2e-5);
        assert_eq!(m.p_mean, 0.0);

        for n in 1..4 {
            let nf = n as f64;
            for &s in &[0.0, 1e-9, 1e-4] {
                let w = WellSpec::dimensionless(s).unwrap();
                let m = quantum_moments(&w, n).unwrap();
                assert!((m.x_mean - 0.5).abs() < 1e-4);
                let x2 = 1.0 / 3.0 - 1.0 / (2.0 * nf * nf * PI * PI);
                assert!((m.x2_mean - x2).abs() < 1e-4, "{} vs {}", m.x2_mean, x2);
            }
        }
    }

    #[test]
    fn closed_form_moments_match_quadrature() {
        for &s in &[0.5, 2.0, 10.0, -0.5, 1e-3, 0.0] {
            let w = WellSpec::dimensionless(s).unwrap();
            for n in [1, 2, 5] {
                let c = quantum_moments(&w, n).unwrap();
                let o = quantum_moments_oracle(&w, n).unwrap();
                assert_relative_eq!(c.x_mean, o.x_mean, max_relative = 1e-8);
                assert_relative_eq!(c.x2_mean, o.x2_mean, max_relative = 1e-8);
                assert!(o.p_mean.abs() < 1e-10);
                assert_relative_eq!(c.p2_mean, o.p2_mean, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn oracle_standard_well_momentum() {
        let w = WellSpec::dimensionless(0.0).unwrap();
        for n in 1..4 {
            let o = quantum_moments_oracle(&w, n).unwrap();
            let nf = n as f64;
            assert_relative_eq!(o.p2_mean, nf * nf * PI * PI, max_relative = 1e-12);
            assert_relative_eq!(o.p2_mean, 2.0 * energy(&w, n), max_relative = 1e-12);
        }
    }

    #[test]
    fn uncertainty_examples() {
        let w = WellSpec::dimensionless(0.0).unwrap();
        let u = uncertainty_product(&w, 1).unwrap();
        let expect = PI * (1.0 / 12.0 - 1.0 / (2.0 * PI * PI)).sqrt();
        assert_relative_eq!(u, expect, max_relative = 1e-10);
        assert!((u - 0.5679).abs() < 1e-3);
        for &s in &[0.5, 2.0, 5.0, -0.5] {
            let w = WellSpec::dimensionless(s).unwrap();
            for n in 1..4 {
                assert!(uncertainty_product(&w, n).unwrap() >= 0.5);
            }
        }
    }

    #[test]
    fn classical_density_examples() {
        let w0 = WellSpec::dimensionless(0.0).unwrap();
        assert_eq!(classical_density(&w0, 0.3), 1.0);
        let w = WellSpec::dimensionless(10.0).unwrap();
        assert_relative_eq!(
            classical_density(&w, 0.0) / classical_density(&w, 1.0),
            11.0,
            max_relative = 1e-14
        );
        for &s in &[0.0, 0.5, 10.0, -0.5] {
            let w = WellSpec::dimensionless(s).unwrap();
            let total = quad_value(|x| classical_density(&w, x), 0.0, 1.0);
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_bounds_density() {
        let w = WellSpec::dimensionless(10.0).unwrap();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert_eq!(density_envelope(&w, x), 2.0 * classical_density(&w, x));
            for n in [1, 3, 10] {
                assert!(psi_n(&w, n, x).powi(2) <= density_envelope(&w, x) * (1.0 + 1e-12));
            }
        }
        // touching points: sine argument pi/2
        let n = 3;
        let k = k_qn(&w, n);
        let x_touch = ((0.5 * PI / k) * 10.0).exp_m1() / 10.0;
        assert_relative_eq!(
            psi_n(&w, n, x_touch).powi(2),
            density_envelope(&w, x_touch),
            max_relative = 1e-12
        );
        let w0 = WellSpec::dimensionless(0.0).unwrap();
        assert_eq!(density_envelope(&w0, 0.4), 2.0);
    }

    #[test]
    fn classical_moment_examples() {
        let g = E - 1.0;
        let w = WellSpec::dimensionless(g).unwrap();
        let m = classical_moments(&w, 0.5).unwrap();
        assert_relative_eq!(m.x_mean, (E - 2.0) / (E - 1.0), max_relative = 1e-14);
        assert_relative_eq!(m.x_mean, 0.41802, max_relative = 2e-5);
        assert_relative_eq!(m.x2_mean, (g * g - 2.0 * g + 2.0) / (2.0 * g * g), max_relative = 1e-14);
        assert_relative_eq!(m.x2_mean, 0.25672, max_relative = 2e-5);
        assert_relative_eq!(m.p2_mean, (E * E - 1.0) / (2.0 * E * E), max_relative = 1e-14);
        assert_relative_eq!(m.p2_mean, 0.43234, max_relative = 2e-5);

        let w0 = WellSpec::dimensionless(0.0).unwrap();
        let m0 = classical_moments(&w0, 2.0).unwrap();
        assert_eq!(m0.x_mean, 0.5);
        assert_relative_eq!(m0.x2_mean, 1.0 / 3.0);
        assert_relative_eq!(m0.p2_mean, 4.0);
        let tiny = WellSpec::dimensionless(1e-7).unwrap();
        let mt = classical_moments(&tiny, 2.0).unwrap();
        assert!((mt.x_mean - 0.5).abs() < 1e-7);
        assert!((mt.x2_mean - 1.0 / 3.0).abs() < 1e-7);
        assert!((mt.p2_mean - 4.0).abs() < 1e-6);
        assert!(classical_moments(&w, 0.0).is_err());
    }

    #[test]
    fn classical_moments_match_density_quadrature() {
        for &s in &[0.5, 3.0, 10.0, -0.5] {
            let w = WellSpec::dimensionless(s).unwrap();
            let m = classical_moments(&w, 1.0).unwrap();
            let x1 = quad_value(|x| x * classical_density(&w, x), 0.0, 1.0);
            let x2 = quad_value(|x| x * x * classical_density(&w, x), 0.0, 1.0);
            // p^2 = 2 m E / u^2 at each point
            let p2 = quad_value(|x| 2.0 * classical_density(&w, x) / (1.0 + s * x).powi(2), 0.0, 1.0);
            assert_relative_eq!(m.x_mean, x1, max_relative = 1e-12);
            assert_relative_eq!(m.x2_mean, x2, max_relative = 1e-12);
            assert_relative_eq!(m.p2_mean, p2, max_relative = 1e-12);
        }
    }

    #[test]
    fn large_n_moments_approach_classical() {
        let w = WellSpec::dimensionless(10.0).unwrap();
        let c = classical_moments(&w, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for n in [1, 10, 100, 1000] {
            let q = quantum_moments(&w, n).unwrap();
            let d = (q.x_mean - c.x_mean).abs() + (q.x2_mean - c.x2_mean).abs();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn rescaling_invariance() {
        let lambda = 3.0;
        let base = WellSpec::dimensionless(2.0).unwrap();
        let dp = DeformationParam::from_gamma(2.0 / lambda).unwrap();
        let scaled = WellSpec::new(lambda, 1.0, 1.0, dp).unwrap();
        for n in 1..4 {
            assert_relative_eq!(
                energy(&scaled, n) * lambda * lambda,
                energy(&base, n),
                max_relative = 1e-13
            );
            for &x in &[0.1, 0.5, 0.9] {
                assert_relative_eq!(
                    psi_n(&scaled, n, lambda * x) * lambda.sqrt(),
                    psi_n(&base, n, x),
                    max_relative = 1e-12
                );
            }
            let a = quantum_moments(&base, n).unwrap();
            let b = quantum_moments(&scaled, n).unwrap();
            assert_relative_eq!(b.x_mean, lambda * a.x_mean, max_relative = 1e-13);
            assert_relative_eq!(b.x2_mean, lambda * lambda * a.x2_mean, max_relative = 1e-13);
            assert_relative_eq!(b.p2_mean * lambda * lambda, a.p2_mean, max_relative = 1e-13);
        }
        assert_relative_eq!(
            uncertainty_product(&scaled, 2).unwrap(),
            uncertainty_product(&base, 2).unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn windowed_density_tracks_classical() {
        let w = WellSpec::dimensionless(10.0).unwrap();
        for i in 1..20 {
            let x = 0.05 * i as f64;
            let wd = windowed_density(&w, 10, x).unwrap();
            assert!((wd.quantum / wd.classical_window - 1.0).abs() < 0.05);
            if !wd.shifted {
                assert!((wd.quantum / wd.classical_point - 1.0).abs() < 0.05, "{wd:?}");
            }
        }
        // a window in the bulk is not shifted
        assert!(!windowed_density(&w, 10, 0.3).unwrap().shifted);
    }

    #[test]
    fn box2d_is_tensor_product() {
        let w = WellSpec::dimensionless(2.0).unwrap();
        let p = box2d_density(&w, 1, 2, 0.3, 0.6);
        assert_relative_eq!(p, (psi_n(&w, 1, 0.3) * psi_n(&w, 2, 0.6)).powi(2));
        assert_eq!(box2d_density(&w, 1, 1, 0.0, 0.5), 0.0);
    }
}
