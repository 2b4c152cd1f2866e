//! Potentials `V(x)` for the classical dynamics, selectable by name.

use crate::error::{Error, Result};

pub trait Potential: Send + Sync {
    fn name(&self) -> String;

    fn value(&self, x: f64) -> f64;

    /// Closed-form `dV/dx`, if known. Without one the dynamics falls back
    /// to a central difference and flags its results as reduced precision.
    fn gradient(&self, _x: f64) -> Option<f64> {
        None
    }

    /// True when `V` is identically zero.
    fn is_force_free(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Free;

impl Potential for Free {
    fn name(&self) -> String {
        "free".into()
    }
    fn value(&self, _: f64) -> f64 {
        0.0
    }
    fn gradient(&self, _: f64) -> Option<f64> {
        Some(0.0)
    }
    fn is_force_free(&self) -> bool {
        true
    }
}

/// `V = -F x`, a constant force `F`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub force: f64,
}

impl Potential for Linear {
    fn name(&self) -> String {
        format!("linear(F={})", self.force)
    }
    fn value(&self, x: f64) -> f64 {
        -self.force * x
    }
    fn gradient(&self, _: f64) -> Option<f64> {
        Some(-self.force)
    }
}

/// `V = k x^2 / 2`.
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub stiffness: f64,
}

impl Potential for Harmonic {
    fn name(&self) -> String {
        format!("harmonic(k={})", self.stiffness)
    }
    fn value(&self, x: f64) -> f64 {
        0.5 * self.stiffness * x * x
    }
    fn gradient(&self, x: f64) -> Option<f64> {
        Some(self.stiffness * x)
    }
}

/// A potential given only by its values.
pub struct FnPotential<F> {
    pub label: String,
    pub f: F,
}

impl<F: Fn(f64) -> f64 + Send + Sync> Potential for FnPotential<F> {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// `dV/dx`, from the closed form when there is one.
pub fn gradient(v: &dyn Potential, x: f64) -> f64 {
    v.gradient(x).unwrap_or_else(|| fd_gradient(v, x))
}

fn fd_gradient(v: &dyn Potential, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    (v.value(x - 2.0 * h) - 8.0 * v.value(x - h) + 8.0 * v.value(x + h) - v.value(x + 2.0 * h))
        / (12.0 * h)
}

/// Largest `|dV/dx - FD(V)|` over `points`, relative to `max(1, |dV/dx|)`.
pub fn gradient_consistency(v: &dyn Potential, points: &[f64]) -> f64 {
    points
        .iter()
        .map(|&x| (gradient(v, x) - fd_gradient(v, x)).abs() / gradient(v, x).abs().max(1.0))
        .fold(0.0, f64::max)
}

/// A named potential family with one strength parameter.
pub struct PotentialKind {
    pub name: &'static str,
    pub parameter: &'static str,
    pub build: fn(f64) -> Box<dyn Potential>,
}

pub fn potential_registry() -> Vec<PotentialKind> {
    vec![
        PotentialKind {
            name: "free",
            parameter: "ignored",
            build: |_| Box::new(Free),
        },
        PotentialKind {
            name: "linear",
            parameter: "constant force F (V = -F x)",
            build: |f| Box::new(Linear { force: f }),
        },
        PotentialKind {
            name: "harmonic",
            parameter: "stiffness k (V = k x^2/2)",
            build: |k| Box::new(Harmonic { stiffness: k }),
        },
    ]
}

pub fn potential_by_name(name: &str, strength: f64) -> Result<Box<dyn Potential>> {
    let reg = potential_registry();
    match reg.iter().find(|k| k.name == name) {
        Some(k) => Ok((k.build)(strength)),
        None => Err(Error::invalid(format!(
            "unknown potential '{name}' (known: {})",
            reg.iter().map(|k| k.name).collect::<Vec<_>>().join(", ")
        ))),
    }
}
