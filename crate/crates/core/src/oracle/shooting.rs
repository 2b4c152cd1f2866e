//! Shooting solver for
//! `u^2 psi'' + 2 gamma u psi' + (gamma^2/4 + 2 m E / hbar^2) psi = 0`,
//! `u = 1 + gamma x`, with `psi(0) = 0`, `psi'(0) = 1`, bisecting `E` on the
//! sign of `psi(L)`.

use crate::error::{Error, Result};
use crate::well::{self, WellSpec};

#[derive(Debug, Clone)]
pub struct ShootingSpec {
    /// Energy interval; `None` seeds it from the closed form as
    /// `[E / (1 + w), E (1 + w)]` with `w = bracket_widening`. The bracket is
    /// asymmetric so the first bisection midpoint is not the seed itself.
    pub energy_bracket: Option<(f64, f64)>,
    pub bracket_widening: f64,
    pub ode_steps: usize,
    /// Stop once the bracket is narrower than this fraction of `E`.
    pub rel_energy_tol: f64,
    pub max_bisections: usize,
}

impl Default for ShootingSpec {
    fn default() -> Self {
        Self {
            energy_bracket: None,
            bracket_widening: 0.2,
            ode_steps: 20_000,
            rel_energy_tol: 1e-14,
            max_bisections: 200,
        }
    }
}

impl ShootingSpec {
    pub fn with_steps(mut self, ode_steps: usize) -> Self {
        self.ode_steps = ode_steps;
        self
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Self {
        self.energy_bracket = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingResult {
    pub n: usize,
    pub energy: f64,
    /// Width of the final energy bracket.
    pub error_bar: f64,
    pub nodes: usize,
    pub bisections: usize,
}

struct Trace {
    end_value: f64,
    nodes: usize,
}

/// RK4 in `x` for `(psi, psi')`. Counts sign changes strictly inside the
/// well (the last few steps are excluded, where `psi` heads to zero).
fn integrate_well(spec: &WellSpec, energy: f64, steps: usize) -> Trace {
    let g = spec.gamma();
    let kappa = 2.0 * spec.mass() * energy / (spec.hbar() * spec.hbar()) + 0.25 * g * g;
    let h = spec.length() / steps as f64;
    let rhs = |x: f64, psi: f64, dpsi: f64| -> (f64, f64) {
        let u = 1.0 + g * x;
        (dpsi, -(2.0 * g * u * dpsi + kappa * psi) / (u * u))
    };
    let mut psi = 0.0;
    let mut dpsi = 1.0;
    let mut nodes = 0;
    let guard = steps.saturating_sub(steps / 200 + 2);
    for i in 0..steps {
        let x = i as f64 * h;
        let (k1a, k1b) = rhs(x, psi, dpsi);
        let (k2a, k2b) = rhs(x + 0.5 * h, psi + 0.5 * h * k1a, dpsi + 0.5 * h * k1b);
        let (k3a, k3b) = rhs(x + 0.5 * h, psi + 0.5 * h * k2a, dpsi + 0.5 * h * k2b);
        let (k4a, k4b) = rhs(x + h, psi + h * k3a, dpsi + h * k3b);
        let next = psi + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        dpsi += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        if i > 0 && i < guard && next * psi < 0.0 {
            nodes += 1;
        }
        psi = next;
    }
    Trace {
        end_value: psi,
        nodes,
    }
}

/// Finds the `n`-th eigenvalue by shooting. The bracket must contain
/// exactly one eigenvalue; the interior node count of the converged
/// solution must be `n - 1`.
pub fn shoot_eigenvalue(spec: &WellSpec, n: usize, sh: &ShootingSpec) -> Result<ShootingResult> {
    if n == 0 {
        return Err(Error::invalid("quantum number n must be >= 1"));
    }
    if sh.ode_steps < 10 {
        return Err(Error::invalid("shooting needs at least 10 ODE steps"));
    }
    let (mut lo, mut hi) = sh.energy_bracket.unwrap_or_else(|| {
        let seed = well::energy(spec, n);
        (seed / (1.0 + sh.bracket_widening), seed * (1.0 + sh.bracket_widening))
    });
    if !(lo < hi) {
        return Err(Error::BracketFailure { lo, hi });
    }
    let mut f_lo = integrate_well(spec, lo, sh.ode_steps).end_value;
    let f_hi = integrate_well(spec, hi, sh.ode_steps).end_value;
    if f_lo * f_hi > 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    let mut bisections = 0;
    let mut mid = 0.5 * (lo + hi);
    while bisections < sh.max_bisections {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = integrate_well(spec, mid, sh.ode_steps).end_value;
        bisections += 1;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid * f_lo > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < sh.rel_energy_tol * mid.abs() {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    let nodes = integrate_well(spec, mid, sh.ode_steps).nodes;
    if nodes != n - 1 {
        return Err(Error::NodeMismatch {
            expected: n - 1,
            found: nodes,
        });
    }
    Ok(ShootingResult {
        n,
        energy: mid,
        error_bar: hi - lo,
        nodes,
        bisections,
    })
}

/// Richardson extrapolation of two shooting runs with `N` and `2N` steps,
/// `(16 E_2N - E_N)/15` for the fourth-order integrator.
pub fn shoot_eigenvalue_richardson(spec: &WellSpec, n: usize, sh: &ShootingSpec) -> Result<f64> {
    let coarse = shoot_eigenvalue(spec, n, sh)?;
    let fine_spec = ShootingSpec {
        ode_steps: sh.ode_steps * 2,
        ..sh.clone()
    };
    let fine = shoot_eigenvalue(spec, n, &fine_spec)?;
    Ok((16.0 * fine.energy - coarse.energy) / 15.0)
}

/// Residual of the Euler-type form `u^2 psi_uu + 2 u psi_u + b psi = 0` for
/// `psi_n`, with `b = (2m/(hbar gamma)^2)(E + hbar^2 gamma^2 / 8m)`.
///
/// The equation is multiplied through by `gamma^2` so that it stays finite
/// as `gamma -> 0`, where it becomes `psi'' + (2mE/hbar^2) psi = 0`:
/// the returned value is `|u^2 psi'' + 2 gamma u psi' + gamma^2 b psi|`.
pub fn euler_form_check(spec: &WellSpec, n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < spec.length()) {
        return Err(Error::domain(format!("x = {x} is not inside the well")));
    }
    let g = spec.gamma();
    let u = 1.0 + g * x;
    let e = well::energy(spec, n);
    let hbar2 = spec.hbar() * spec.hbar();
    let gamma2_b = 2.0 * spec.mass() / hbar2 * (e + hbar2 * g * g / (8.0 * spec.mass()));
    let [v, d1, d2] = well::psi_n_derivatives(spec, n, x);
    Ok((u * u * d2 + 2.0 * g * u * d1 + gamma2_b * v).abs())
}

/// `b - 1/4 - (k/gamma)^2` with the dimensionless `b` of the Euler form.
/// Zero up to rounding for every `gamma != 0`.
pub fn euler_index_identity(spec: &WellSpec, n: usize) -> Result<f64> {
    let g = spec.gamma();
    if g == 0.0 {
        return Err(Error::domain("the Euler form needs gamma != 0"));
    }
    let e = well::energy(spec, n);
    let m = spec.mass();
    let hbar2 = spec.hbar() * spec.hbar();
    let b = 2.0 * m / (hbar2 * g * g) * (e + hbar2 * g * g / (8.0 * m));
    let kg = well::k_qn(spec, n) / g;
    Ok((b - 0.25 - kg * kg) / (kg * kg).max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn standard_well_ground_state() {
        let w = WellSpec::dimensionless(0.0).unwrap();
        let r = shoot_eigenvalue(&w, 1, &ShootingSpec::default()).unwrap();
        assert_relative_eq!(r.energy, PI * PI / 2.0, max_relative = 1e-8);
        assert_eq!(r.nodes, 0);
    }

    #[test]
    fn deformed_ground_state() {
        let w = WellSpec::dimensionless(E - 1.0).unwrap();
        let r = shoot_eigenvalue(&w, 1, &ShootingSpec::default()).unwrap();
        assert_relative_eq!(r.energy, PI * PI * (E - 1.0).powi(2) / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn strongly_deformed_levels() {
        let w = WellSpec::dimensionless(10.0).unwrap();
        for n in 1..=5 {
            let r = shoot_eigenvalue(&w, n, &ShootingSpec::default()).unwrap();
            assert_relative_eq!(r.energy, well::energy(&w, n), max_relative = 1e-6);
            assert_eq!(r.nodes, n - 1);
        }
    }

    #[test]
    fn negative_gamma_branch() {
        let w = WellSpec::dimensionless(-0.5).unwrap();
        for n in 1..=3 {
            let r = shoot_eigenvalue(&w, n, &ShootingSpec::default()).unwrap();
            assert_relative_eq!(r.energy, well::energy(&w, n), max_relative = 1e-6);
        }
    }

    #[test]
    fn fourth_order_convergence_and_richardson() {
        let w = WellSpec::dimensionless(10.0).unwrap();
        let exact = well::energy(&w, 3);
        let e1 = shoot_eigenvalue(&w, 3, &ShootingSpec::default().with_steps(1500)).unwrap().energy;
        let e2 = shoot_eigenvalue(&w, 3, &ShootingSpec::default().with_steps(3000)).unwrap().energy;
        let order = ((e1 - exact) / (e2 - exact)).log2();
        assert!((order - 4.0).abs() < 0.2, "observed order {order}");
        let r = shoot_eigenvalue_richardson(&w, 3, &ShootingSpec::default().with_steps(2000)).unwrap();
        assert_relative_eq!(r, exact, max_relative = 1e-8);
    }

    #[test]
    fn bracket_failure() {
        let w = WellSpec::dimensionless(2.0).unwrap();
        let e1 = well::energy(&w, 1);
        let sh = ShootingSpec::default().with_bracket(1.1 * e1, 1.3 * e1);
        assert!(matches!(shoot_eigenvalue(&w, 1, &sh), Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn node_mismatch_detected() {
        let w = WellSpec::dimensionless(2.0).unwrap();
        let e2 = well::energy(&w, 2);
        let sh = ShootingSpec::default().with_bracket(0.8 * e2, 1.2 * e2);
        // the bracket holds level 2, but level 1 was requested
        assert!(matches!(
            shoot_eigenvalue(&w, 1, &sh),
            Err(Error::NodeMismatch { expected: 0, found: 1 })
        ));
    }

    #[test]
    fn euler_form_examples() {
        let w0 = WellSpec::dimensionless(0.0).unwrap();
        for &x in &[0.2, 0.5, 0.77] {
            assert!(euler_form_check(&w0, 2, x).unwrap() < 1e-10);
        }
        let w = WellSpec::dimensionless(2.0).unwrap();
        assert!(euler_form_check(&w, 3, 0.5).unwrap() < 1e-8);
        for n in 1..6 {
            assert!(euler_index_identity(&w, n).unwrap().abs() < 1e-12);
        }
        assert!(euler_form_check(&w, 1, 0.0).is_err());
        assert!(euler_index_identity(&w0, 1).is_err());
    }
}
