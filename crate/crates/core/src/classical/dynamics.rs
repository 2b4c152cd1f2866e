//! RK4 integration of `xdot = p u^2/m`, `pdot = -gamma u p^2/m - V'(x)`
//! (`u = 1 + gamma x`) and residuals of the equivalent Newton-law forms.

use super::{to_deformed, DynamicsConfig, PhaseState};
use crate::error::{Error, Result};
use crate::qcalc::{dual_q_second_derivative, Analytic, DeformationParam};

fn rhs(cfg: &DynamicsConfig, x: f64, p: f64) -> Option<(f64, f64)> {
    let g = cfg.gamma();
    let u = 1.0 + g * x;
    if !(u > 0.0) {
        return None;
    }
    let m = cfg.mass;
    Some((p * u * u / m, -g * u * p * p / m + cfg.force(x)))
}

/// One RK4 step of length `h`; `None` if a stage leaves `1 + gamma x > 0`.
pub(crate) fn rk4(cfg: &DynamicsConfig, s: PhaseState, h: f64) -> Option<PhaseState> {
    let (k1x, k1p) = rhs(cfg, s.x, s.p)?;
    let (k2x, k2p) = rhs(cfg, s.x + 0.5 * h * k1x, s.p + 0.5 * h * k1p)?;
    let (k3x, k3p) = rhs(cfg, s.x + 0.5 * h * k2x, s.p + 0.5 * h * k2p)?;
    let (k4x, k4p) = rhs(cfg, s.x + h * k3x, s.p + h * k3p)?;
    let next = PhaseState {
        x: s.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        p: s.p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        t: s.t + h,
    };
    if 1.0 + cfg.gamma() * next.x > 0.0 && next.x.is_finite() && next.p.is_finite() {
        Some(next)
    } else {
        None
    }
}

/// One step of length `cfg.dt`.
pub fn step(s: PhaseState, cfg: &DynamicsConfig) -> Result<PhaseState> {
    rk4(cfg, s, cfg.dt).ok_or(Error::DomainExit {
        t_lo: s.t,
        t_hi: s.t + cfg.dt,
    })
}

/// `cfg.n_steps` steps from `s0`, including `s0` itself.
pub fn trajectory(s0: PhaseState, cfg: &DynamicsConfig) -> Result<Vec<PhaseState>> {
    to_deformed(s0, &cfg.dp)?;
    let mut out = Vec::with_capacity(cfg.n_steps + 1);
    out.push(s0);
    let mut s = s0;
    for _ in 0..cfg.n_steps {
        s = step(s, cfg)?;
        out.push(s);
    }
    Ok(out)
}

/// Time step of a uniformly sampled trajectory.
fn sample_step(traj: &[PhaseState]) -> Result<f64> {
    if traj.len() < 5 {
        return Err(Error::invalid("trajectory derivatives need at least 5 samples"));
    }
    let h = (traj[traj.len() - 1].t - traj[0].t) / (traj.len() - 1) as f64;
    let uniform = h > 0.0
        && traj
            .windows(2)
            .all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-6 * h);
    if !uniform {
        return Err(Error::invalid("trajectory must be sampled at a uniform time step"));
    }
    Ok(h)
}

fn d1(v: [f64; 5], h: f64) -> f64 {
    (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h)
}

fn d2(v: [f64; 5], h: f64) -> f64 {
    (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h)
}

fn window<T: Copy>(v: &[T], i: usize) -> [T; 5] {
    [v[i - 2], v[i - 1], v[i], v[i + 1], v[i + 2]]
}

/// Maximum residuals of the three equivalent forms of the equation of
/// motion over the interior samples of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonResidual {
    /// `|m D~^2 x - F(x)|`, dual q-derivative of the sampled `x(t)`.
    pub dual_form: f64,
    /// `|m [xddot/u^2 - gamma xdot^2/u^3] - F(x)|` with `xdot`, `xddot` in
    /// closed form from the state.
    pub explicit_form: f64,
    /// `|pdot + gamma u p^2/m + V'(x)|`, `pdot` from the sampled `p(t)`.
    pub momentum_form: f64,
    pub points: usize,
}

impl NewtonResidual {
    pub fn max(&self) -> f64 {
        self.dual_form.max(self.explicit_form).max(self.momentum_form)
    }
}

/// Derivatives use five-point central stencils on the samples.
pub fn newton_residual(traj: &[PhaseState], cfg: &DynamicsConfig) -> Result<NewtonResidual> {
    let h = sample_step(traj)?;
    let g = cfg.gamma();
    let m = cfg.mass;
    // D~ with (1 - q) -> gamma, i.e. dual derivative in time of x(t)
    let q_eff = 1.0 - g;
    let xs: Vec<f64> = traj.iter().map(|s| s.x).collect();
    let ps: Vec<f64> = traj.iter().map(|s| s.p).collect();
    let mut out = NewtonResidual {
        dual_form: 0.0,
        explicit_form: 0.0,
        momentum_form: 0.0,
        points: 0,
    };
    for (i, &s) in traj.iter().enumerate().take(traj.len() - 2).skip(2) {
        let u = 1.0 + g * s.x;
        let force = cfg.force(s.x);

        let (xd, xdd) = (d1(window(&xs, i), h), d2(window(&xs, i), h));
        let x_of_t = Analytic {
            f: |_: f64| s.x,
            df: |_: f64| xd,
            d2f: |_: f64| xdd,
        };
        let dual = dual_q_second_derivative(&x_of_t, s.t, q_eff)?;
        out.dual_form = out.dual_form.max((m * dual - force).abs());

        let xd_exact = s.p * u * u / m;
        let pd_exact = -g * u * s.p * s.p / m + force;
        let xdd_exact = pd_exact * u * u / m + 2.0 * g * s.p * u * xd_exact / m;
        let explicit = m * (xdd_exact / (u * u) - g * xd_exact * xd_exact / (u * u * u));
        out.explicit_form = out.explicit_form.max((explicit - force).abs());

        let pd = d1(window(&ps, i), h);
        out.momentum_form = out.momentum_form.max((pd - pd_exact).abs());
        out.points += 1;
    }
    Ok(out)
}

/// `max |xdot/(1 + gamma x) - d x_q/dt|` over the interior samples, both
/// derivatives by five-point stencils.
pub fn velocity_chart_check(traj: &[PhaseState], dp: &DeformationParam) -> Result<f64> {
    let h = sample_step(traj)?;
    let xs: Vec<f64> = traj.iter().map(|s| s.x).collect();
    let xq = traj
        .iter()
        .map(|&s| to_deformed(s, dp).map(|d| d.x_q))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for i in 2..traj.len() - 2 {
        let u = 1.0 + dp.gamma() * xs[i];
        let deformed_velocity = d1(window(&xs, i), h) / u;
        worst = worst.max((deformed_velocity - d1(window(&xq, i), h)).abs());
    }
    Ok(worst)
}
