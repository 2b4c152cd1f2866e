//! Functions with closed-form derivatives, for exact operator-action checks.

use num_complex::Complex64;

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::qcalc::DeformationParam;
use crate::well::{self, Sign};

/// A complex function of position with known derivatives up to third order.
pub trait AnalyticTestFunction: Send + Sync {
    fn name(&self) -> String;

    /// Value and derivatives at `x`.
    fn jet(&self, x: f64) -> Result<Jet>;

    fn value(&self, x: f64) -> Result<Complex64> {
        Ok(self.jet(x)?.raw()[0])
    }
}

/// `(x - c)^m exp(-(x - c)^2 / 2 s^2)`, optionally times `exp(i k0 x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBump {
    center: f64,
    width: f64,
    power: u32,
    momentum: f64,
    // coefficients in t = x - c of the polynomial factor of each derivative
    polys: [Vec<f64>; 4],
}

impl GaussianBump {
    pub fn new(center: f64, width: f64, power: u32) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::invalid(format!(
                "Gaussian bump needs a finite centre and width > 0, got c = {center}, s = {width}"
            )));
        }
        let mut p0 = vec![0.0; power as usize + 1];
        p0[power as usize] = 1.0;
        // d/dt [P(t) G] = [P'(t) - t P(t)/s^2] G
        let next = |p: &Vec<f64>| {
            let mut q = vec![0.0; p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                if i > 0 {
                    q[i - 1] += i as f64 * c;
                }
                q[i + 1] -= c / (width * width);
            }
            q
        };
        let p1 = next(&p0);
        let p2 = next(&p1);
        let p3 = next(&p2);
        Ok(Self {
            center,
            width,
            power,
            momentum: 0.0,
            polys: [p0, p1, p2, p3],
        })
    }

    /// Multiplies the bump by `exp(i k0 x)`.
    pub fn with_momentum(mut self, k0: f64) -> Self {
        self.momentum = k0;
        self
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Interval outside of which the bump is below `1e-16` of its scale.
    pub fn support(&self) -> (f64, f64) {
        let r = self.width * (12.0 + self.power as f64);
        (self.center - r, self.center + r)
    }

    /// The default family: powers 0, 1, 2 at the given centre and width.
    pub fn family(center: f64, width: f64) -> Result<Vec<GaussianBump>> {
        (0..3).map(|m| GaussianBump::new(center, width, m)).collect()
    }
}

fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

impl AnalyticTestFunction for GaussianBump {
    fn name(&self) -> String {
        let mut s = format!(
            "gauss(c={}, s={}, m={})",
            self.center, self.width, self.power
        );
        if self.momentum != 0.0 {
            s.push_str(&format!(" e^(i {} x)", self.momentum));
        }
        s
    }

    fn jet(&self, x: f64) -> Result<Jet> {
        let t = x - self.center;
        let g = (-0.5 * t * t / (self.width * self.width)).exp();
        let bump = Jet::real([0, 1, 2, 3].map(|j| horner(&self.polys[j], t) * g));
        if self.momentum == 0.0 {
            return Ok(bump);
        }
        let k = self.momentum;
        let w = Complex64::from_polar(1.0, k * x);
        let i = Complex64::i();
        let wave = Jet::new([w, i * k * w, -k * k * w, -i * k * k * k * w]);
        Ok(bump * wave)
    }
}

/// `(1 + gamma x)^{-1/2} exp[+- i (k/gamma) ln(1 + gamma x)]`, the
/// null-potential eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeWave {
    pub dp: DeformationParam,
    pub k: f64,
    pub sign: Sign,
}

impl AnalyticTestFunction for FreeWave {
    fn name(&self) -> String {
        format!("free(k={}, {:?})", self.k, self.sign)
    }

    fn jet(&self, x: f64) -> Result<Jet> {
        Ok(Jet::new(well::free_eigenfunction_jet(
            &self.dp, self.k, self.sign, x,
        )?))
    }
}

/// Largest disagreement between each closed-form derivative and a
/// fourth-order central difference of the one below it, relative to
/// `max(1, |f^(j)|)`.
pub fn fd_consistency(f: &dyn AnalyticTestFunction, points: &[f64]) -> Result<f64> {
    let h = 1e-3;
    let mut worst = 0.0f64;
    for &x in points {
        let jets = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|&o| f.jet(x + o * h).map(|j| j.raw()))
            .collect::<Result<Vec<_>>>()?;
        let exact = f.jet(x)?.raw();
        for j in 1..4 {
            let fd = (jets[0][j - 1] - 8.0 * jets[1][j - 1] + 8.0 * jets[2][j - 1]
                - jets[3][j - 1])
                / (12.0 * h);
            let err = (fd - exact[j]).norm() / exact[j].norm().max(1.0);
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_values() {
        let b = GaussianBump::new(0.5, 0.2, 2).unwrap();
        let j = b.jet(0.7).unwrap().raw();
        let g = (-0.5f64).exp();
        assert_relative_eq!(j[0].re, 0.04 * g, max_relative = 1e-14);
        // f' = (2t - t^3/s^2) G
        assert_relative_eq!(j[1].re, (0.4 - 0.008 / 0.04) * g, max_relative = 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let pts: Vec<f64> = (0..21).map(|i| -0.5 + 0.1 * i as f64).collect();
        for m in 0..3 {
            let b = GaussianBump::new(0.3, 0.4, m).unwrap();
            assert!(fd_consistency(&b, &pts).unwrap() < 1e-6);
            let b = b.with_momentum(3.0);
            assert!(fd_consistency(&b, &pts).unwrap() < 1e-6);
        }
        let w = FreeWave {
            dp: DeformationParam::from_gamma(2.0).unwrap(),
            k: 4.0,
            sign: Sign::Plus,
        };
        let pts: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        assert!(fd_consistency(&w, &pts).unwrap() < 1e-6);
    }

    #[test]
    fn inconsistent_function_is_caught() {
        struct Wrong;
        impl AnalyticTestFunction for Wrong {
            fn name(&self) -> String {
                "wrong".into()
            }
            fn jet(&self, x: f64) -> Result<Jet> {
                // derivative of sin x claimed as sin x
                Ok(Jet::real([x.sin(), x.sin(), -x.sin(), -x.cos()]))
            }
        }
        assert!(fd_consistency(&Wrong, &[0.3]).unwrap() > 1e-2);
    }

    #[test]
    fn rejects_bad_width() {
        assert!(GaussianBump::new(0.0, 0.0, 1).is_err());
    }
}
