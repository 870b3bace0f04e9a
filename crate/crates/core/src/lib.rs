//! Simulation laboratory for the generalized cross-coupled Camassa–Holm
//! system
//!
//! ```text
//! m_t + v^p m_x + a v^{p-1} v_x m = 0,   m = u - u_xx
//! n_t + u^q n_x + b u^{q-1} u_x n = 0,   n = v - v_xx
//! ```
//!
//! The numerical layers ([`spectral`], [`norms`], [`dynamics`], [`peakon`])
//! are generic over the scalar type through [`Real`]; the experiment
//! harnesses in [`experiments`] run in `f64`.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod norms;
pub mod peakon;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid64 = spectral::GridSpec<f64>;
pub type Field64 = spectral::Field<f64>;
pub type FieldState64 = dynamics::FieldState<f64>;
pub type PdeParams64 = dynamics::PdeParams<f64>;
pub type SolverParams64 = dynamics::SolverParams<f64>;
pub type PeakonConfiguration64 = peakon::PeakonConfiguration<f64>;


pub type Grid32 = spectral::GridSpec<f32>;
pub type Field32 = spectral::Field<f32>;
pub type FieldState32 = dynamics::FieldState<f32>;
