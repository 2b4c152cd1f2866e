//! Classical mechanics of the position-dependent-mass particle.
//!
//! The canonical map `x_q = ln(1 + gamma x)/gamma`, `p_q = (1 + gamma x) p`
//! turns the constant-mass Hamiltonian `K = p_q^2/2m + V` into
//! `H = p^2/2m(x) + V` with `m(x) = m/(1 + gamma x)^2`. Trajectories are
//! integrated in `(x, p)`; the `(x_q, p_q)` chart is the cross-check.

pub mod box_density;
pub mod dynamics;
pub mod potential;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qcalc::DeformationParam;
use crate::well::ln1p_ratio;

pub use box_density::{
    box_ensemble_density, box_trajectory_density, classical_bin_probabilities, BoxHistogram,
    BoxRun,
};
pub use dynamics::{
    newton_residual, step, trajectory, velocity_chart_check, NewtonResidual,
};
pub use potential::{potential_by_name, potential_registry, Potential, PotentialKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedPhaseState {
    pub x_q: f64,
    pub p_q: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p, t: 0.0 }
    }
}

fn check_domain(x: f64, dp: &DeformationParam) -> Result<f64> {
    let u = 1.0 + dp.gamma() * x;
    if !(u > 0.0) {
        return Err(Error::domain(format!(
            "1 + gamma x = {u} <= 0 at x = {x} (gamma = {})",
            dp.gamma()
        )));
    }
    Ok(u)
}

pub fn to_deformed(s: PhaseState, dp: &DeformationParam) -> Result<DeformedPhaseState> {
    let u = check_domain(s.x, dp)?;
    Ok(DeformedPhaseState {
        x_q: s.x * ln1p_ratio(dp.gamma() * s.x),
        p_q: u * s.p,
        t: s.t,
    })
}

pub fn from_deformed(d: DeformedPhaseState, dp: &DeformationParam) -> PhaseState {
    let g = dp.gamma();
    let x = if g == 0.0 { d.x_q } else { (g * d.x_q).exp_m1() / g };
    PhaseState {
        x,
        p: d.p_q * (-g * d.x_q).exp(),
        t: d.t,
    }
}

/// `|{x_q, p_q}_(x,p) - 1|` from the analytic partials
/// `dx_q/dx = 1/u`, `dx_q/dp = 0`, `dp_q/dx = gamma p`, `dp_q/dp = u`.
pub fn poisson_bracket_check(dp: &DeformationParam, s: PhaseState) -> Result<f64> {
    let u = check_domain(s.x, dp)?;
    let (dxq_dx, dxq_dp) = (1.0 / u, 0.0);
    let (dpq_dx, dpq_dp) = (dp.gamma() * s.p, u);
    Ok((dxq_dx * dpq_dp - dxq_dp * dpq_dx - 1.0).abs())
}

/// The same bracket with central-difference partials of [`to_deformed`].
pub fn poisson_bracket_fd(dp: &DeformationParam, s: PhaseState) -> Result<f64> {
    let hx = 1e-5 * s.x.abs().max(1e-3);
    let hp = 1e-5 * s.p.abs().max(1e-3);
    let at = |x: f64, p: f64| to_deformed(PhaseState { x, p, t: s.t }, dp);
    let (xp, xm) = (at(s.x + hx, s.p)?, at(s.x - hx, s.p)?);
    let (pp, pm) = (at(s.x, s.p + hp)?, at(s.x, s.p - hp)?);
    let dxq_dx = (xp.x_q - xm.x_q) / (2.0 * hx);
    let dpq_dx = (xp.p_q - xm.p_q) / (2.0 * hx);
    let dxq_dp = (pp.x_q - pm.x_q) / (2.0 * hp);
    let dpq_dp = (pp.p_q - pm.p_q) / (2.0 * hp);
    Ok((dxq_dx * dpq_dp - dxq_dp * dpq_dx - 1.0).abs())
}

/// `Phi(x_q, p) = -p (e^{gamma x_q} - 1)/gamma`.
pub fn generating_function(dp: &DeformationParam, x_q: f64, p: f64) -> f64 {
    let g = dp.gamma();
    -p * x_q * expm1_ratio(g * x_q)
}

/// `(e^s - 1)/s`, continuous through `s = 0`.
fn expm1_ratio(s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        s.exp_m1() / s
    }
}

/// Residuals `(|x + dPhi/dp|, |p_q + dPhi/dx_q|)` with `x`, `p_q` from the
/// canonical map and the partials of `Phi` in closed form.
pub fn generating_function_check(dp: &DeformationParam, x_q: f64, p: f64) -> Result<(f64, f64)> {
    let g = dp.gamma();
    let dphi_dp = -x_q * expm1_ratio(g * x_q);
    let dphi_dxq = -p * (g * x_q).exp();
    let x = from_deformed(DeformedPhaseState { x_q, p_q: 0.0, t: 0.0 }, dp).x;
    let p_q = to_deformed(PhaseState { x, p, t: 0.0 }, dp)?.p_q;
    let scale = |v: f64| v.abs().max(1.0);
    Ok((
        (x + dphi_dp).abs() / scale(x),
        (p_q + dphi_dxq).abs() / scale(p_q),
    ))
}

/// Mass, deformation, time step and potential for trajectory integration.
#[derive(Clone)]
pub struct DynamicsConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub mass: f64,
    pub dp: DeformationParam,
    pub potential: Arc<dyn Potential>,
}

impl std::fmt::Debug for DynamicsConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DynamicsConfig")
            .field("dt", &self.dt)
            .field("n_steps", &self.n_steps)
            .field("mass", &self.mass)
            .field("dp", &self.dp)
            .field("potential", &self.potential.name())
            .finish()
    }
}

impl DynamicsConfig {
    pub fn new(
        dt: f64,
        n_steps: usize,
        mass: f64,
        dp: DeformationParam,
        potential: Arc<dyn Potential>,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid(format!("mass must be > 0, got {mass}")));
        }
        Ok(Self {
            dt,
            n_steps,
            mass,
            dp,
            potential,
        })
    }

    /// Free particle.
    pub fn free(dt: f64, n_steps: usize, mass: f64, dp: DeformationParam) -> Result<Self> {
        Self::new(dt, n_steps, mass, dp, Arc::new(potential::Free))
    }

    pub fn gamma(&self) -> f64 {
        self.dp.gamma()
    }

    /// True when `dV/dx` comes from finite differences.
    pub fn reduced_precision(&self) -> bool {
        self.potential.gradient(0.0).is_none()
    }

    /// `F(x) = -dV/dx`.
    pub fn force(&self, x: f64) -> f64 {
        -potential::gradient(self.potential.as_ref(), x)
    }

    /// `m / (1 + gamma x)^2`.
    pub fn mass_at(&self, x: f64) -> f64 {
        let u = 1.0 + self.gamma() * x;
        self.mass / (u * u)
    }
}

/// `K = p_q^2/2m + V`, with `V` evaluated at the physical position
/// `x(x_q)`.
pub fn hamiltonian_k(s: DeformedPhaseState, cfg: &DynamicsConfig) -> f64 {
    let x = from_deformed(s, &cfg.dp).x;
    s.p_q * s.p_q / (2.0 * cfg.mass) + cfg.potential.value(x)
}

/// `H = p^2/2m(x) + V(x)`.
pub fn hamiltonian_h(s: PhaseState, cfg: &DynamicsConfig) -> Result<f64> {
    let u = check_domain(s.x, &cfg.dp)?;
    let pu = s.p * u;
    Ok(pu * pu / (2.0 * cfg.mass) + cfg.potential.value(s.x))
}
