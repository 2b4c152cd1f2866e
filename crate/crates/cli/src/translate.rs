//! `translate`: the deformed translation of a Gaussian packet on a grid,
//! against its closed form.

use clap::Args;

use qpdm_core::qcalc::DeformationParam;
use qpdm_core::qops::{
    compose_displacements, gaussian_packet, predicted_translated_mean, translate_onto,
    uniform_grid, zero_phase, OperatorContext, SampledWavefunction,
};

use crate::{check_grid_points, CliError, Log, Table};

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(long = "gamma-L", visible_alias = "gamma-l", default_value_t = 0.5, allow_hyphen_values = true)]
    pub gamma_l: f64,
    /// Width of the initial packet.
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub center: f64,
    /// Displacement parameter.
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub eps: f64,
    /// Sampling interval `lo,hi`; must not contain x = -1/gamma.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long, default_value_t = 801)]
    pub grid_points: usize,
}

pub fn run(a: &TranslateArgs, log: &mut Log) -> Result<Table, CliError> {
    let points = check_grid_points(a.grid_points)?;
    let dom = crate::lists::parse_reals(std::slice::from_ref(&a.domain)).map_err(CliError::Usage)?;
    let [lo, hi] = dom[..] else {
        return Err(CliError::Usage("--domain needs two values lo,hi".into()));
    };
    if !(a.sigma > 0.0) {
        return Err(CliError::Usage(format!("sigma must be > 0, got {}", a.sigma)));
    }
    let dp = DeformationParam::from_gamma(a.gamma_l)?;
    let ctx = OperatorContext::dimensionless(dp);
    let den = 1.0 + dp.gamma() * a.eps;
    if !(den > 0.0) {
        return Err(qpdm_core::Error::Domain(format!("1 + gamma eps = {den} must be > 0")).into());
    }
    let psi = SampledWavefunction::uniform(lo, hi, points, gaussian_packet(a.sigma, a.center))?;
    // evaluate on the image of the sampled interval, x -> x (+) eps
    let image = |x: f64| compose_displacements(x, a.eps, &dp);
    let target = uniform_grid(image(lo), image(hi), points)?;
    let moved = translate_onto(&psi, &target, a.eps, &ctx, &zero_phase)?;
    // the image of a Gaussian is a Gaussian with centre c (+) eps and width
    // sigma (1 + gamma eps)
    let exact = gaussian_packet(a.sigma * den, compose_displacements(a.center, a.eps, &dp));

    let mut t = Table::new(
        "translate",
        &["x", "psi_eps_re", "psi_eps_im", "closed_form", "abs_err"],
    )
    .param("gamma_L", a.gamma_l)
    .param("sigma", a.sigma)
    .param("center", a.center)
    .param("eps", a.eps)
    .param("grid_points", points);
    let mut worst = 0.0f64;
    for (&x, m) in moved.grid().iter().zip(moved.values()) {
        let c = exact(x).re;
        let err = (*m - exact(x)).norm();
        worst = worst.max(err);
        t.push(vec![
            x.into(),
            m.re.into(),
            m.im.into(),
            c.into(),
            err.into(),
        ]);
    }
    let mean = psi.position_mean();
    log.line(format!(
        "translate: norm^2 {:.10} -> {:.10}, integral {:.10} -> {:.10}",
        psi.norm_sq(),
        moved.norm_sq(),
        psi.integral().re,
        moved.integral().re
    ));
    log.line(format!(
        "translate: <x> {:.10} -> {:.10} (predicted {:.10}), max |psi_eps - closed form| {worst:.3e}",
        mean,
        moved.position_mean(),
        predicted_translated_mean(mean, a.eps, &dp)
    ));
    Ok(t)
}
