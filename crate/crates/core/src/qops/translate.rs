//! The generalized translation `T_q(eps)` acting on sampled wavefunctions.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::operators::OperatorContext;
use crate::error::{Error, Result};
use crate::qcalc::{self, DeformationParam};

/// A wavefunction tabulated on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledWavefunction {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but there are {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 4 {
            return Err(Error::invalid("a sampled wavefunction needs at least 4 points"));
        }
        if grid.iter().any(|x| !x.is_finite()) || !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("grid must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::invalid("wavefunction values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    /// `n` equally spaced points from `a` to `b` inclusive.
    pub fn uniform(a: f64, b: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::from_fn(uniform_grid(a, b, n)?, f)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    /// Cubic Lagrange interpolation through the four nearest samples.
    /// Points outside the grid are a domain error, never extrapolated.
    pub fn interpolate(&self, x: f64) -> Result<Complex64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::domain(format!(
                "x = {x} lies outside the sampled domain [{lo}, {hi}]"
            )));
        }
        let n = self.grid.len();
        let i = self.grid.partition_point(|&g| g <= x);
        let start = i.saturating_sub(2).min(n - 4);
        let xs = &self.grid[start..start + 4];
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != j {
                    w *= (x - xs[m]) / (xs[j] - xs[m]);
                }
            }
            acc += self.values[start + j] * w;
        }
        Ok(acc)
    }

    /// Trapezoid rule for `int w(x) |psi|^2 dx` over the samples.
    pub fn integrate_density(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (w(x[0]) * v[0].norm_sqr() + w(x[1]) * v[1].norm_sqr()))
            .sum()
    }

    /// `int |psi|^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        self.integrate_density(|_| 1.0)
    }

    /// `int x |psi|^2 dx / int |psi|^2 dx`.
    pub fn position_mean(&self) -> f64 {
        self.integrate_density(|x| x) / self.norm_sq()
    }

    /// `int psi dx` (trapezoid).
    pub fn integral(&self) -> Complex64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[0] + v[1]) * (0.5 * (x[1] - x[0])))
            .sum()
    }

    fn check_side_of_singularity(&self, dp: &DeformationParam) -> Result<()> {
        let g = dp.gamma();
        let (lo, hi) = self.domain();
        if 1.0 + g * lo <= 0.0 || 1.0 + g * hi <= 0.0 {
            return Err(Error::Singularity { at: -1.0 / g });
        }
        Ok(())
    }
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(a < b) {
        return Err(Error::invalid(format!(
            "uniform grid needs a < b and at least 2 points (a = {a}, b = {b}, n = {n})"
        )));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { b } else { a + h * i as f64 })
        .collect())
}

/// Phase function `g(x)` of the translation; the default is `g = 0`.
pub type PhaseFunction<'a> = &'a dyn Fn(f64) -> f64;

pub fn zero_phase(_: f64) -> f64 {
    0.0
}

/// `xi (x~ (-)_q eps~)`, the point that `T_q(eps)` carries to `x`. Equal to
/// `(x - eps)/(1 + gamma eps)`.
pub fn back_map(x: f64, eps: f64, dp: &DeformationParam) -> Result<f64> {
    let den = 1.0 + dp.gamma() * eps;
    if den == 0.0 {
        return Err(Error::pole(format!(
            "1 + gamma eps = 0 (gamma = {}, eps = {eps})",
            dp.gamma()
        )));
    }
    Ok((x - eps) / den)
}

/// `xi (eps1~ (+)_q eps2~)`, the single displacement equivalent to `eps1`
/// followed by `eps2`.
pub fn compose_displacements(eps1: f64, eps2: f64, dp: &DeformationParam) -> f64 {
    let xi = dp.xi();
    xi * qcalc::q_add(eps1 / xi, eps2 / xi, dp.q())
}

/// `psi_eps(x) = exp_q[(i eps/hbar) g(x')] psi(x') / (1 + gamma eps)` with
/// `x'` the back-mapped point, evaluated on `target`.
pub fn translate_onto(
    psi: &SampledWavefunction,
    target: &[f64],
    eps: f64,
    ctx: &OperatorContext,
    g: PhaseFunction,
) -> Result<SampledWavefunction> {
    let dp = ctx.deformation();
    psi.check_side_of_singularity(&dp)?;
    let den = 1.0 + dp.gamma() * eps;
    let (lo, hi) = psi.domain();
    let slack = 1e-12 * (hi - lo);
    let values = target
        .iter()
        .map(|&x| {
            let mut xb = back_map(x, eps, &dp)?;
            // rounding in the back map must not turn an endpoint into an error
            if xb < lo && xb > lo - slack {
                xb = lo;
            } else if xb > hi && xb < hi + slack {
                xb = hi;
            }
            let phase = qcalc::q_exp_im(eps * g(xb) / ctx.hbar(), dp.q());
            Ok(phase * psi.interpolate(xb)? / den)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledWavefunction::new(target.to_vec(), values)
}

/// [`translate_onto`] the wavefunction's own grid.
pub fn translate(
    psi: &SampledWavefunction,
    eps: f64,
    ctx: &OperatorContext,
    g: PhaseFunction,
) -> Result<SampledWavefunction> {
    translate_onto(psi, psi.grid(), eps, ctx, g)
}

/// Normalized `<x>` of the translated state, by quadrature on `target`.
pub fn translated_position_mean(
    psi: &SampledWavefunction,
    target: &[f64],
    eps: f64,
    ctx: &OperatorContext,
) -> Result<f64> {
    Ok(translate_onto(psi, target, eps, ctx, &zero_phase)?.position_mean())
}

/// First-order prediction `<x> + eps + gamma <x> eps`.
pub fn predicted_translated_mean(mean: f64, eps: f64, dp: &DeformationParam) -> f64 {
    compose_displacements(mean, eps, dp)
}

/// The Gaussian `e^{-(x - c)^2/2 sigma^2}/(sigma sqrt(2 pi))`, which has unit
/// integral.
pub fn gaussian_packet(sigma: f64, center: f64) -> impl Fn(f64) -> Complex64 {
    move |x: f64| {
        let t = (x - center) / sigma;
        Complex64::new((-0.5 * t * t).exp() / (sigma * (2.0 * PI).sqrt()), 0.0)
    }
}

/// Closed form of `T_q(eps)` applied to `gaussian_packet(sigma, 0)` with
/// `g = 0`: centred at `eps` with width `sigma (1 + gamma eps)`.
pub fn translated_gaussian(
    sigma: f64,
    eps: f64,
    dp: &DeformationParam,
) -> Result<impl Fn(f64) -> Complex64> {
    let den = 1.0 + dp.gamma() * eps;
    if den == 0.0 {
        return Err(Error::pole("1 + gamma eps = 0"));
    }
    Ok(gaussian_packet(sigma * den, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(g: f64) -> OperatorContext {
        OperatorContext::dimensionless(DeformationParam::from_gamma(g).unwrap())
    }

    fn packet(n: usize) -> SampledWavefunction {
        SampledWavefunction::uniform(-2.0, 2.0, n, gaussian_packet(0.2, 0.0)).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        let v = vec![Complex64::new(1.0, 0.0); 4];
        assert!(SampledWavefunction::new(vec![0.0, 1.0, 1.0, 2.0], v.clone()).is_err());
        assert!(SampledWavefunction::new(vec![0.0, 1.0, 2.0], v[..3].to_vec()).is_err());
        let mut bad = v.clone();
        bad[1] = Complex64::new(f64::NAN, 0.0);
        assert!(SampledWavefunction::new(vec![0.0, 1.0, 2.0, 3.0], bad).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let f = |x: f64| Complex64::new(x * x * x - 2.0 * x, 0.5 * x * x);
        let w = SampledWavefunction::from_fn(vec![0.0, 0.3, 0.5, 1.1, 1.6, 2.0], f).unwrap();
        for &x in &[0.0, 0.1, 0.77, 1.4, 2.0] {
            assert!((w.interpolate(x).unwrap() - f(x)).norm() < 1e-13);
        }
        assert!(w.interpolate(2.0001).is_err());
    }

    #[test]
    fn zero_displacement_is_identity() {
        let w = packet(401);
        let g = |x: f64| 3.0 * x;
        for &gam in &[0.0, 0.4, -0.3] {
            let t = translate(&w, 0.0, &ctx(gam), &g).unwrap();
            assert_eq!(t.values(), w.values());
        }
    }

    #[test]
    fn undeformed_translation_is_a_shift() {
        let w = packet(801);
        let target = uniform_grid(-1.0, 1.0, 201).unwrap();
        let t = translate_onto(&w, &target, 0.13, &ctx(0.0), &zero_phase).unwrap();
        let f = gaussian_packet(0.2, 0.13);
        for (x, v) in target.iter().zip(t.values()) {
            assert!((v - f(*x)).norm() < 1e-6);
        }
    }

    #[test]
    fn gaussian_width_grows() {
        let w = packet(801);
        let target = uniform_grid(-1.0, 1.5, 251).unwrap();
        let dp = DeformationParam::from_gamma(0.4).unwrap();
        let eps = 0.1;
        let t = translate_onto(&w, &target, eps, &ctx(0.4), &zero_phase).unwrap();
        let exact = translated_gaussian(0.2, eps, &dp).unwrap();
        let peak = exact(eps).norm();
        for (x, v) in target.iter().zip(t.values()) {
            assert!((v - exact(*x)).norm() < 1e-5 * peak);
        }
        // unit integral survives exactly; the L2 norm picks up 1/(1 + gamma eps)
        assert_relative_eq!(t.integral().re, 1.0, max_relative = 1e-6);
        assert_relative_eq!(
            t.norm_sq() * (1.0 + 0.4 * eps),
            w.norm_sq(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn composition_group_law() {
        let w = packet(1601);
        let c = ctx(0.4);
        let dp = c.deformation();
        let mid = uniform_grid(-1.8, 1.8, 1601).unwrap();
        let target = uniform_grid(-1.0, 1.0, 201).unwrap();
        let (e1, e2) = (0.07, -0.12);
        let once = translate_onto(&w, &mid, e1, &c, &zero_phase).unwrap();
        let twice = translate_onto(&once, &target, e2, &c, &zero_phase).unwrap();
        let e12 = compose_displacements(e1, e2, &dp);
        let direct = translate_onto(&w, &target, e12, &c, &zero_phase).unwrap();
        let peak = direct.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in twice.values().iter().zip(direct.values()) {
            assert!((a - b).norm() < 1e-7 * peak);
        }
    }

    #[test]
    fn back_map_matches_q_difference() {
        let dp = DeformationParam::new(0.7, 0.4).unwrap();
        let (x, eps) = (0.9, 0.25);
        let xi = dp.xi();
        let via_q = xi * qcalc::q_sub(x / xi, eps / xi, dp.q()).unwrap();
        assert_relative_eq!(back_map(x, eps, &dp).unwrap(), via_q, max_relative = 1e-14);
    }

    #[test]
    fn errors() {
        let w = packet(101);
        let c = ctx(2.0);
        // pole at eps = -1/gamma
        assert!(matches!(
            translate(&w, -0.5, &c, &zero_phase),
            Err(Error::Singularity { .. }) | Err(Error::Pole(_))
        ));
        let w = SampledWavefunction::uniform(-0.4, 1.0, 101, gaussian_packet(0.1, 0.3)).unwrap();
        assert!(matches!(translate_onto(&w, &[0.0], -0.5, &c, &zero_phase), Err(Error::Pole(_))));
        // shifting the grid onto itself leaves points without a preimage
        assert!(matches!(translate(&w, 0.1, &c, &zero_phase), Err(Error::Domain(_))));
        // straddling the singularity
        let s = SampledWavefunction::uniform(-1.0, 1.0, 11, gaussian_packet(0.1, 0.3)).unwrap();
        assert!(matches!(translate(&s, 0.0, &c, &zero_phase), Err(Error::Singularity { .. })));
    }

    #[test]
    fn phase_modulus_is_second_order() {
        // with g != 0 the q-exponential phase has modulus 1 + O(eps^2)
        let dp = DeformationParam::new(0.7, 1.0).unwrap();
        let c = OperatorContext::dimensionless(dp);
        let w = packet(801);
        let target = uniform_grid(-1.0, 1.0, 401).unwrap();
        let g = |x: f64| 2.0 + x;
        let base = |eps: f64| {
            let t = translate_onto(&w, &target, eps, &c, &g).unwrap();
            t.norm_sq() * (1.0 + dp.gamma() * eps) / w.norm_sq() - 1.0
        };
        let (d1, d2) = (base(0.02), base(0.01));
        assert!(d1.abs() > 1e-6);
        assert_relative_eq!(d1 / d2, 4.0, max_relative = 0.05);
    }

    #[test]
    fn translated_mean() {
        let w = SampledWavefunction::uniform(-2.0, 3.0, 2001, gaussian_packet(0.15, 0.4)).unwrap();
        let target = uniform_grid(-1.5, 2.5, 1601).unwrap();
        let mean = w.position_mean();
        assert_relative_eq!(mean, 0.4, max_relative = 1e-10);
        for &g in &[0.0, 0.3, -0.25] {
            let c = ctx(g);
            let eps = 1e-2;
            let got = translated_position_mean(&w, &target, eps, &c).unwrap();
            let want = predicted_translated_mean(mean, eps, &c.deformation());
            assert!((got - want).abs() < 1e-8, "g={g}: {got} vs {want}");
        }
        let c = ctx(0.0);
        let got = translated_position_mean(&w, &target, 0.2, &c).unwrap();
        assert!((got - 0.6).abs() < 1e-9);
    }
}
