//! The generalized translation, the Hermitian deformed momentum `p_q` and
//! the conjugate position `x_q`, acting on concrete wavefunctions.
//!
//! Operator actions are evaluated on [`Jet`]s (value plus exact
//! derivatives), so commutator and Hermiticity residuals carry no
//! discretization error. Translation acts on sampled wavefunctions through
//! cubic interpolation.

pub mod jet;
pub mod operators;
pub mod testfn;
pub mod translate;

pub use jet::Jet;
pub use operators::{
    apply_p_q, apply_p_q_symmetric, commutator_by_name, commutator_check, commutator_registry,
    hermiticity_residual, hermiticity_residual_with, overlap, x_of_x_q, x_q_of_x,
    CommutatorIdentity, OperatorContext, PointOps,
};
pub use testfn::{fd_consistency, AnalyticTestFunction, FreeWave, GaussianBump};
pub use translate::{
    back_map, compose_displacements, gaussian_packet, predicted_translated_mean, translate,
    translate_onto, translated_gaussian, translated_position_mean, uniform_grid, zero_phase,
    PhaseFunction, SampledWavefunction,
};
