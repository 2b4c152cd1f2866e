//! `classical-sim trajectory | box`.

use std::sync::Arc;

use clap::{Args, Subcommand};

use qpdm_core::classical::{
    box_ensemble_density, box_trajectory_density, classical_bin_probabilities, hamiltonian_h,
    hamiltonian_k, potential_by_name, potential_registry, to_deformed, trajectory,
    DynamicsConfig, PhaseState,
};
use qpdm_core::qcalc::DeformationParam;
use qpdm_core::well::WellSpec;

use crate::{CliError, Log, Table};

#[derive(Debug, Subcommand)]
pub enum SimCommand {
    /// Integrate one trajectory; columns t, x, p, x_q, p_q, H, K, drift.
    Trajectory(TrajectoryArgs),
    /// Time-averaged position histogram of the particle bouncing in the
    /// well, against the classical density.
    Box(BoxArgs),
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    /// gamma (lengths in units of L).
    #[arg(long = "gamma-L", visible_alias = "gamma-l", default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma_l: f64,
    /// Potential family: free, linear, harmonic.
    #[arg(long, default_value = "free")]
    pub potential: String,
    /// Strength parameter of the potential.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub strength: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub x0: f64,
    /// Initial physical momentum p.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Emit every k-th state.
    #[arg(long, default_value_t = 100)]
    pub every: usize,
}

#[derive(Debug, Args)]
pub struct BoxArgs {
    #[arg(long = "gamma-L", visible_alias = "gamma-l", default_value_t = 10.0, allow_hyphen_values = true)]
    pub gamma_l: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Simulated time per trajectory.
    #[arg(long, default_value_t = 1000.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 25)]
    pub bins: usize,
    /// Start of a single trajectory.
    #[arg(long, default_value_t = 0.2)]
    pub x0: f64,
    /// Initial physical momentum of a single trajectory.
    #[arg(long, default_value_t = 1.0 / 3.0, allow_hyphen_values = true)]
    pub p0: f64,
    /// Average this many trajectories with random starts instead.
    #[arg(long, default_value_t = 1)]
    pub trajectories: usize,
    /// Range of |p_q| for ensemble starts, `lo,hi`.
    #[arg(long, default_value = "0.5,2")]
    pub p_q_range: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(cmd: &SimCommand, log: &mut Log) -> Result<Table, CliError> {
    match cmd {
        SimCommand::Trajectory(a) => run_trajectory(a, log),
        SimCommand::Box(a) => run_box(a, log),
    }
}

fn run_trajectory(a: &TrajectoryArgs, log: &mut Log) -> Result<Table, CliError> {
    if a.every == 0 {
        return Err(CliError::Usage("--every must be >= 1".into()));
    }
    let dp = DeformationParam::from_gamma(a.gamma_l)?;
    let potential = potential_by_name(&a.potential, a.strength).map_err(|e| {
        let known: Vec<_> = potential_registry().iter().map(|k| k.name).collect();
        CliError::Usage(format!("{e}; choose one of {}", known.join(", ")))
    })?;
    let cfg = DynamicsConfig::new(a.dt, a.steps, a.mass, dp, Arc::from(potential))?;
    let states = trajectory(PhaseState::new(a.x0, a.p0), &cfg)?;
    let h0 = hamiltonian_h(states[0], &cfg)?;
    let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
    let mut t = Table::new(
        "classical-sim trajectory",
        &["t", "x", "p", "x_q", "p_q", "H", "K", "drift"],
    )
    .param("gamma_L", a.gamma_l)
    .param("potential", a.potential.as_str())
    .param("strength", a.strength)
    .param("mass", a.mass)
    .param("dt", a.dt)
    .param("steps", a.steps);
    let mut max_drift = 0.0f64;
    for (i, &s) in states.iter().enumerate() {
        let h = hamiltonian_h(s, &cfg)?;
        let drift = (h - h0).abs() / scale;
        max_drift = max_drift.max(drift);
        if i % a.every == 0 || i + 1 == states.len() {
            let d = to_deformed(s, &cfg.dp)?;
            t.push(vec![
                s.t.into(),
                s.x.into(),
                s.p.into(),
                d.x_q.into(),
                d.p_q.into(),
                h.into(),
                hamiltonian_k(d, &cfg).into(),
                drift.into(),
            ]);
        }
    }
    log.line(format!(
        "classical-sim trajectory: {} steps, max relative energy drift {max_drift:.3e}",
        a.steps
    ));
    Ok(t)
}

fn run_box(a: &BoxArgs, log: &mut Log) -> Result<Table, CliError> {
    let spec = WellSpec::dimensionless(a.gamma_l)?;
    let cfg = DynamicsConfig::free(a.dt, 0, spec.mass(), spec.deformation())?;
    let mut t = Table::new(
        "classical-sim box",
        &["bin_lo", "bin_hi", "x", "density", "classical", "abs_dev"],
    )
    .param("gamma_L", a.gamma_l)
    .param("dt", a.dt)
    .param("duration", a.duration)
    .param("bins", a.bins)
    .param("trajectories", a.trajectories);
    let hist = if a.trajectories <= 1 {
        let run = box_trajectory_density(&cfg, &spec, PhaseState::new(a.x0, a.p0), a.duration, a.bins)?;
        log.line(format!(
            "classical-sim box: {} reflections, max relative energy drift {:.3e}",
            run.reflections, run.energy_drift
        ));
        t = t.param("x0", a.x0).param("p0", a.p0);
        run.histogram
    } else {
        let range = crate::lists::parse_reals(std::slice::from_ref(&a.p_q_range)).map_err(CliError::Usage)?;
        let [lo, hi] = range[..] else {
            return Err(CliError::Usage("--p-q-range needs two values lo,hi".into()));
        };
        t = t.param("seed", a.seed).param("p_q_lo", lo).param("p_q_hi", hi);
        box_ensemble_density(&cfg, &spec, a.duration, a.bins, a.trajectories, (lo, hi), a.seed)?
    };
    let exact = classical_bin_probabilities(&spec, &hist.edges);
    for ((e, d), p) in hist.edges.windows(2).zip(&hist.density).zip(&exact) {
        let width = e[1] - e[0];
        let c = p / width;
        t.push(vec![
            e[0].into(),
            e[1].into(),
            (0.5 * (e[0] + e[1])).into(),
            (*d).into(),
            c.into(),
            (d - c).abs().into(),
        ]);
    }
    log.line(format!(
        "classical-sim box: {} samples, L1 distance to the classical density {:.3e}",
        hist.samples,
        hist.l1_to_classical(&spec)
    ));
    Ok(t)
}
