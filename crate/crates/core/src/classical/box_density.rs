//! Time-averaged position density of the free particle bouncing elastically
//! between `x = 0` and `x = L`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dynamics::rk4;
use super::{hamiltonian_h, DynamicsConfig, PhaseState};
use crate::error::{Error, Result};
use crate::well::WellSpec;

/// Normalized histogram on equal-width bins over `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxHistogram {
    pub edges: Vec<f64>,
    /// Probability density per bin; integrates to 1.
    pub density: Vec<f64>,
    pub samples: usize,
}

impl BoxHistogram {
    fn from_counts(length: f64, counts: &[u64]) -> Self {
        let bins = counts.len();
        let total: u64 = counts.iter().sum();
        let width = length / bins as f64;
        Self {
            edges: (0..=bins).map(|i| length * i as f64 / bins as f64).collect(),
            density: counts
                .iter()
                .map(|&c| c as f64 / (total.max(1) as f64 * width))
                .collect(),
            samples: total as usize,
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.edges
            .windows(2)
            .zip(&self.density)
            .map(|(e, d)| d * (e[1] - e[0]))
            .collect()
    }

    /// `sum_i |P_i - Q_i|` against the exact bin probabilities of the
    /// classical density `gamma / [(1 + gamma x) ln(1 + gamma L)]`.
    pub fn l1_to_classical(&self, spec: &WellSpec) -> f64 {
        let exact = classical_bin_probabilities(spec, &self.edges);
        self.probabilities()
            .iter()
            .zip(&exact)
            .map(|(p, q)| (p - q).abs())
            .sum()
    }

    /// `sum_i |P_i - Q_i|` between two histograms on the same bins.
    pub fn l1_to(&self, other: &BoxHistogram) -> Result<f64> {
        if self.edges != other.edges {
            return Err(Error::invalid("histograms have different bins"));
        }
        Ok(self
            .probabilities()
            .iter()
            .zip(other.probabilities())
            .map(|(p, q)| (p - q).abs())
            .sum())
    }
}

/// Integral of the classical density over each bin, in closed form.
pub fn classical_bin_probabilities(spec: &WellSpec, edges: &[f64]) -> Vec<f64> {
    let g = spec.gamma();
    let cumulative = |x: f64| x * crate::well::ln1p_ratio(g * x) / spec.deformed_length();
    edges
        .windows(2)
        .map(|e| cumulative(e[1]) - cumulative(e[0]))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxRun {
    pub histogram: BoxHistogram,
    /// Largest `|H(t) - H(0)|/|H(0)|` over the samples.
    pub energy_drift: f64,
    pub reflections: usize,
    pub final_state: PhaseState,
}

fn check_box(cfg: &DynamicsConfig, spec: &WellSpec) -> Result<()> {
    if !cfg.potential.is_force_free() {
        return Err(Error::invalid("the box particle must be force-free inside the well"));
    }
    if cfg.dp != spec.deformation() || cfg.mass != spec.mass() {
        return Err(Error::invalid(
            "dynamics and well must share the mass and the deformation",
        ));
    }
    Ok(())
}

/// Advances `s` by `h`, reflecting `p -> -p` at the walls. A wall crossing
/// is located by bisection on the sub-step length.
fn advance(cfg: &DynamicsConfig, length: f64, s: PhaseState, h: f64, reflections: &mut usize) -> Result<PhaseState> {
    let exit = |s: PhaseState| Error::DomainExit {
        t_lo: s.t,
        t_hi: s.t + h,
    };
    let inside = |x: f64| (0.0..=length).contains(&x);
    let mut s = s;
    let mut remaining = h;
    // a crossing per sub-step; bounded so a stuck particle cannot spin
    for _ in 0..64 {
        let next = rk4(cfg, s, remaining).ok_or_else(|| exit(s))?;
        if inside(next.x) {
            return Ok(next);
        }
        let (mut lo, mut hi) = (0.0, remaining);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let trial = rk4(cfg, s, mid).ok_or_else(|| exit(s))?;
            if inside(trial.x) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let at_wall = rk4(cfg, s, lo).ok_or_else(|| exit(s))?;
        let wall = if next.x < 0.0 { 0.0 } else { length };
        s = PhaseState {
            x: wall,
            p: -at_wall.p,
            t: at_wall.t,
        };
        *reflections += 1;
        remaining -= lo;
        if remaining <= 0.0 {
            return Ok(s);
        }
    }
    Err(exit(s))
}

/// Histogram of `x(t)` sampled every `cfg.dt` over `duration`, starting
/// from `s0` inside the well.
pub fn box_trajectory_density(
    cfg: &DynamicsConfig,
    spec: &WellSpec,
    s0: PhaseState,
    duration: f64,
    bins: usize,
) -> Result<BoxRun> {
    check_box(cfg, spec)?;
    let length = spec.length();
    if !(0.0..=length).contains(&s0.x) {
        return Err(Error::domain(format!("initial x = {} is outside the well", s0.x)));
    }
    if bins == 0 || !(duration > 0.0) {
        return Err(Error::invalid("need at least one bin and a positive duration"));
    }
    let steps = (duration / cfg.dt).round() as usize;
    let e0 = hamiltonian_h(s0, cfg)?;
    let mut counts = vec![0u64; bins];
    let mut s = s0;
    let mut drift = 0.0f64;
    let mut reflections = 0;
    for _ in 0..steps {
        s = advance(cfg, length, s, cfg.dt, &mut reflections)?;
        let b = ((s.x / length) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
        let e = hamiltonian_h(s, cfg)?;
        drift = drift.max(((e - e0) / e0).abs());
    }
    Ok(BoxRun {
        histogram: BoxHistogram::from_counts(length, &counts),
        energy_drift: drift,
        reflections,
        final_state: s,
    })
}

/// Average of `n_traj` trajectory histograms with random starting points
/// and `|p_q|` drawn uniformly from `p_q_range`. Trajectories run in
/// parallel; the result depends only on `seed`.
pub fn box_ensemble_density(
    cfg: &DynamicsConfig,
    spec: &WellSpec,
    duration: f64,
    bins: usize,
    n_traj: usize,
    p_q_range: (f64, f64),
    seed: u64,
) -> Result<BoxHistogram> {
    check_box(cfg, spec)?;
    if n_traj == 0 || !(0.0 < p_q_range.0 && p_q_range.0 <= p_q_range.1) {
        return Err(Error::invalid("need trajectories and a positive momentum range"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<PhaseState> = (0..n_traj)
        .map(|_| {
            let x = rng.gen_range(0.0..spec.length());
            let pq = if p_q_range.0 == p_q_range.1 {
                p_q_range.0
            } else {
                rng.gen_range(p_q_range.0..p_q_range.1)
            };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            PhaseState::new(x, sign * pq / (1.0 + spec.gamma() * x))
        })
        .collect();
    let runs: Vec<Result<BoxRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .map(|&s0| scope.spawn(move || box_trajectory_density(cfg, spec, s0, duration, bins)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trajectory thread panicked"))
            .collect()
    });
    let mut density = vec![0.0; bins];
    let mut samples = 0;
    let mut edges = Vec::new();
    for run in runs {
        let run = run?;
        for (acc, d) in density.iter_mut().zip(&run.histogram.density) {
            *acc += d / n_traj as f64;
        }
        samples += run.histogram.samples;
        edges = run.histogram.edges;
    }
    Ok(BoxHistogram {
        edges,
        density,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::DeformationParam;

    fn setup(gamma_l: f64, dt: f64) -> (DynamicsConfig, WellSpec) {
        let spec = WellSpec::dimensionless(gamma_l).unwrap();
        let cfg = DynamicsConfig::free(dt, 0, 1.0, spec.deformation()).unwrap();
        (cfg, spec)
    }

    #[test]
    fn exact_bin_probabilities_sum_to_one() {
        let spec = WellSpec::dimensionless(10.0).unwrap();
        let edges: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let p = classical_bin_probabilities(&spec, &edges);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn undeformed_box_is_uniform() {
        let (cfg, spec) = setup(0.0, 1e-3);
        let run = box_trajectory_density(&cfg, &spec, PhaseState::new(0.3, 1.3), 300.0, 20).unwrap();
        assert!(run.histogram.l1_to_classical(&spec) < 0.02);
        assert!(run.energy_drift < 1e-12);
        assert!(run.reflections > 300);
    }

    #[test]
    fn deformed_box_matches_classical_density() {
        let (cfg, spec) = setup(10.0, 1e-3);
        let s0 = PhaseState::new(0.2, 1.0 / 3.0);
        let run = box_trajectory_density(&cfg, &spec, s0, 1000.0, 25).unwrap();
        assert!(run.histogram.samples >= 1_000_000);
        let l1 = run.histogram.l1_to_classical(&spec);
        assert!(l1 < 0.02, "L1 = {l1}");
        assert!(run.energy_drift < 1e-7, "drift {}", run.energy_drift);
        // a different energy and start gives the same distribution
        let other = box_trajectory_density(&cfg, &spec, PhaseState::new(0.7, -0.4), 1000.0, 25).unwrap();
        assert!(run.histogram.l1_to(&other.histogram).unwrap() < 0.02);
    }

    #[test]
    fn ensemble_is_deterministic() {
        let (cfg, spec) = setup(2.0, 2e-3);
        let a = box_ensemble_density(&cfg, &spec, 20.0, 10, 4, (0.5, 2.0), 42).unwrap();
        let b = box_ensemble_density(&cfg, &spec, 20.0, 10, 4, (0.5, 2.0), 42).unwrap();
        assert_eq!(a, b);
        assert!(a.l1_to_classical(&spec) < 0.05);
    }

    #[test]
    fn rejects_forces_and_mismatches() {
        let spec = WellSpec::dimensionless(2.0).unwrap();
        let cfg = DynamicsConfig::new(
            1e-3,
            0,
            1.0,
            spec.deformation(),
            std::sync::Arc::new(crate::classical::potential::Harmonic { stiffness: 1.0 }),
        )
        .unwrap();
        assert!(box_trajectory_density(&cfg, &spec, PhaseState::new(0.5, 1.0), 1.0, 10).is_err());
        let cfg = DynamicsConfig::free(1e-3, 0, 1.0, DeformationParam::from_gamma(1.0).unwrap()).unwrap();
        assert!(box_trajectory_density(&cfg, &spec, PhaseState::new(0.5, 1.0), 1.0, 10).is_err());
        let (cfg, spec) = setup(2.0, 1e-3);
        assert!(box_trajectory_density(&cfg, &spec, PhaseState::new(1.5, 1.0), 1.0, 10).is_err());
    }
}
