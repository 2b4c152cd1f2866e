//! Independent numerical ground truth: adaptive quadrature and a shooting
//! eigen-solver that integrates the position-dependent-mass equation in the
//! physical coordinate `x`.

pub mod quadrature;
pub mod shooting;

pub use quadrature::{integrate, GaussLegendre, QuadResult, QuadValue, QuadratureSpec};
pub use shooting::{
    euler_form_check, euler_index_identity, shoot_eigenvalue, shoot_eigenvalue_richardson,
    ShootingResult, ShootingSpec,
};
