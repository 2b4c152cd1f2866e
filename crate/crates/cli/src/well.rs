//! `well eigen | density | box2d | moments`.

use clap::{Args, Subcommand};
use rayon::prelude::*;

use qpdm_core::oracle::shooting::{shoot_eigenvalue, ShootingSpec};
use qpdm_core::well::{self, WellSpec};

use crate::{check_grid_points, quantum_numbers, Cell, CliError, GammaList, Log, Table};

/// gamma L values of the spectrum table by default.
pub const EIGEN_GAMMA_L: [f64; 5] = [0.0, 0.5, std::f64::consts::E - 1.0, 2.0, 10.0];
/// The wave-function panels are drawn for a handful of gamma L values.
pub const DENSITY_GAMMA_L: [f64; 4] = [0.0, 1.0, 2.0, 5.0];
pub const BOX2D_PAIRS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 2), (3, 3)];

#[derive(Debug, Subcommand)]
pub enum WellCommand {
    /// Closed-form spectrum against the shooting solver.
    Eigen(EigenArgs),
    /// psi_n, |psi_n|^2, the envelope and the classical density on a grid.
    Density(DensityArgs),
    /// |psi_n1(x) psi_n2(y)|^2 on a square grid.
    Box2d(Box2dArgs),
    /// Closed-form and quadrature moments and the uncertainty product.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub gamma: GammaList,
    /// Quantum numbers, e.g. `1,2,3` or `1..5` [default: 1..5].
    #[arg(long)]
    pub n: Vec<String>,
    /// RK4 steps across the well for shooting.
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub gamma: GammaList,
    /// Quantum numbers [default: 1,2,3].
    #[arg(long)]
    pub n: Vec<String>,
    #[arg(long, default_value_t = 201)]
    pub grid_points: usize,
    /// Add |psi_n|^2 and the classical density averaged over one local
    /// half-oscillation.
    #[arg(long)]
    pub windowed: bool,
}

#[derive(Debug, Args)]
pub struct Box2dArgs {
    #[command(flatten)]
    pub gamma: GammaList,
    /// Quantum-number pairs `n1:n2` [default: 1:1,1:2,2:2,3:3].
    #[arg(long)]
    pub pairs: Vec<String>,
    /// Points per axis.
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub gamma: GammaList,
    /// Quantum numbers [default: 1,2,3].
    #[arg(long)]
    pub n: Vec<String>,
}

pub fn run(cmd: &WellCommand, log: &mut Log) -> Result<Table, CliError> {
    match cmd {
        WellCommand::Eigen(a) => eigen(a, log),
        WellCommand::Density(a) => density(a, log),
        WellCommand::Box2d(a) => box2d(a, log),
        WellCommand::Moments(a) => moments(a, log),
    }
}

/// All `(gamma L, n)` combinations in emission order.
fn combinations(gammas: &[f64], ns: &[usize]) -> Vec<(f64, usize)> {
    gammas
        .iter()
        .flat_map(|&g| ns.iter().map(move |&n| (g, n)))
        .collect()
}

/// Evaluates `f` on every item in parallel and concatenates the rows in
/// input order.
fn fan_out<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> Result<Vec<Vec<Cell>>, CliError> + Sync + Send,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let parts: Vec<_> = items.par_iter().map(f).collect();
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    Ok(rows)
}

fn grid(spec: &WellSpec, points: usize) -> impl Iterator<Item = f64> + '_ {
    let l = spec.length();
    (0..points).map(move |i| {
        if i + 1 == points {
            l
        } else {
            l * i as f64 / (points - 1) as f64
        }
    })
}

fn eigen(a: &EigenArgs, log: &mut Log) -> Result<Table, CliError> {
    let gammas = a.gamma.values_or(&EIGEN_GAMMA_L)?;
    let ns = quantum_numbers(&a.n, &[1, 2, 3, 4, 5])?;
    let shooting = ShootingSpec::default().with_steps(a.steps);
    let mut t = Table::new(
        "well eigen",
        &["gamma_L", "n", "k_qn", "E_n", "E_shooting", "rel_err"],
    )
    .param("ode_steps", a.steps);
    t.rows = fan_out(&combinations(&gammas, &ns), |&(g, n)| {
        let spec = WellSpec::dimensionless(g)?;
        let e = well::eigen(&spec, n)?;
        let shot = shoot_eigenvalue(&spec, n, &shooting)?;
        let rel = ((shot.energy - e.energy) / e.energy).abs();
        Ok(vec![vec![
            g.into(),
            n.into(),
            e.k_qn.into(),
            e.energy.into(),
            shot.energy.into(),
            rel.into(),
        ]])
    })?;
    let worst = column_max(&t, "rel_err");
    log.line(format!("well eigen: {} levels, max rel err {worst:.3e}", t.rows.len()));
    Ok(t)
}

fn density(a: &DensityArgs, log: &mut Log) -> Result<Table, CliError> {
    let gammas = a.gamma.values_or(&DENSITY_GAMMA_L)?;
    let ns = quantum_numbers(&a.n, &[1, 2, 3])?;
    let points = check_grid_points(a.grid_points)?;
    let mut columns = vec!["gamma_L", "n", "x", "psi", "psi_sq", "envelope", "classical"];
    if a.windowed {
        columns.extend(["psi_sq_windowed", "classical_windowed"]);
    }
    let mut t = Table::new("well density", &columns)
        .param("grid_points", points)
        .param("windowed", a.windowed);
    let windowed = a.windowed;
    t.rows = fan_out(&combinations(&gammas, &ns), |&(g, n)| {
        let spec = WellSpec::dimensionless(g)?;
        grid(&spec, points)
            .map(|x| {
                let psi = well::psi_n(&spec, n, x);
                let mut row: Vec<Cell> = vec![
                    g.into(),
                    n.into(),
                    x.into(),
                    psi.into(),
                    (psi * psi).into(),
                    well::density_envelope(&spec, x).into(),
                    well::classical_density(&spec, x).into(),
                ];
                if windowed {
                    let w = well::windowed_density(&spec, n, x)?;
                    row.extend([w.quantum.into(), w.classical_window.into()]);
                }
                Ok(row)
            })
            .collect()
    })?;
    log.line(format!(
        "well density: {} gamma L value(s) x {} level(s) x {points} points",
        gammas.len(),
        ns.len()
    ));
    Ok(t)
}

fn box2d(a: &Box2dArgs, log: &mut Log) -> Result<Table, CliError> {
    let gammas = a.gamma.values_or(&[2.0])?;
    let pairs = if a.pairs.is_empty() {
        BOX2D_PAIRS.to_vec()
    } else {
        crate::lists::parse_pairs(&a.pairs).map_err(CliError::Usage)?
    };
    let points = check_grid_points(a.grid_points)?;
    let items: Vec<(f64, (usize, usize))> = gammas
        .iter()
        .flat_map(|&g| pairs.iter().map(move |&p| (g, p)))
        .collect();
    let mut t = Table::new("well box2d", &["gamma_L", "n1", "n2", "x", "y", "P"])
        .param("grid_points", points);
    t.rows = fan_out(&items, |&(g, (n1, n2))| {
        let spec = WellSpec::dimensionless(g)?;
        let axis: Vec<f64> = grid(&spec, points).collect();
        let mut rows = Vec::with_capacity(points * points);
        for &x in &axis {
            for &y in &axis {
                let p = well::box2d_density(&spec, n1, n2, x, y);
                rows.push(vec![g.into(), n1.into(), n2.into(), x.into(), y.into(), p.into()]);
            }
        }
        Ok(rows)
    })?;
    log.line(format!("well box2d: {} panel(s) of {points}x{points}", items.len()));
    Ok(t)
}

fn moments(a: &MomentsArgs, log: &mut Log) -> Result<Table, CliError> {
    let default: Vec<f64> = (0..=50).map(|i| 5.0 * i as f64 / 50.0).collect();
    let gammas = a.gamma.values_or(&default)?;
    let ns = quantum_numbers(&a.n, &[1, 2, 3])?;
    let mut t = Table::new(
        "well moments",
        &[
            "gamma_L",
            "n",
            "x_mean",
            "x2_mean",
            "p_mean",
            "p2_mean",
            "x_mean_quadrature",
            "x2_mean_quadrature",
            "p_mean_quadrature",
            "p2_mean_quadrature",
            "p2_ratio",
            "delta_x",
            "delta_p",
            "uncertainty_product",
        ],
    );
    t.rows = fan_out(&combinations(&gammas, &ns), |&(g, n)| {
        let spec = WellSpec::dimensionless(g)?;
        let c = well::quantum_moments(&spec, n)?;
        let o = well::quantum_moments_oracle(&spec, n)?;
        let (dx, dp) = (o.position_variance().sqrt(), o.momentum_variance().sqrt());
        Ok(vec![vec![
            g.into(),
            n.into(),
            c.x_mean.into(),
            c.x2_mean.into(),
            c.p_mean.into(),
            c.p2_mean.into(),
            o.x_mean.into(),
            o.x2_mean.into(),
            o.p_mean.into(),
            o.p2_mean.into(),
            (o.p2_mean / c.p2_mean).into(),
            dx.into(),
            dp.into(),
            (dx * dp / spec.hbar()).into(),
        ]])
    })?;
    // report the minimum of the uncertainty curve for each n
    let (gi, ni, pi) = (
        t.column("gamma_L").expect("column"),
        t.column("n").expect("column"),
        t.column("uncertainty_product").expect("column"),
    );
    for &n in &ns {
        let best = t
            .rows
            .iter()
            .filter(|r| r[ni] == Cell::Int(n as i64))
            .filter_map(|r| match (&r[gi], &r[pi]) {
                (Cell::Num(g), Cell::Num(p)) => Some((*g, *p)),
                _ => None,
            })
            .fold((f64::NAN, f64::INFINITY), |acc, (g, p)| if p < acc.1 { (g, p) } else { acc });
        log.line(format!(
            "well moments: n = {n}, minimum product {:.6} at gamma L = {}",
            best.1, best.0
        ));
    }
    Ok(t)
}

pub(crate) fn column_max(t: &Table, name: &str) -> f64 {
    let Some(i) = t.column(name) else {
        return f64::NAN;
    };
    t.rows
        .iter()
        .filter_map(|r| match r[i] {
            Cell::Num(v) => Some(v),
            _ => None,
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
