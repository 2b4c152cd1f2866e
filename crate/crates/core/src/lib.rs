//! q-deformed translation, momentum and position operators, and the
//! position-dependent-mass particle they describe.
//!
//! * [`qcalc`]: q-exponential, q-addition and the dual q-derivative.
//! * [`qops`]: operator actions on wavefunctions and analytic test functions.
//! * [`well`]: the infinite square well in closed form.
//! * [`classical`]: the classical analogue and its trajectories.
//! * [`oracle`]: quadrature and shooting, used to check the closed forms.
//! * [`checks`]: named verification checks, selectable at runtime.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod classical;
pub mod error;
pub mod oracle;
pub mod qcalc;
pub mod qops;
pub mod well;

pub use error::{Error, Result};
pub use qcalc::DeformationParam;
pub use well::{EigenResult, Moments, WellSpec};
