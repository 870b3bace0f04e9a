//! Time evolution: right-hand sides in momentum and velocity form, RK4 with
//! CFL-triggered step halving, blow-up monitors, conservation diagnostics,
//! characteristics and the compact-support check.

mod characteristics;
mod integrate;
mod lifespan;
mod rhs;
mod state;
mod support;

pub use characteristics::{evolve_characteristics, lagrangian_residual, CharacteristicBundle};
pub use integrate::{
    integrate, step_rk4, BlowupIndicators, DiagnosticTrace, MonitorRecord, RunVerdict, Trajectory,
};
pub use lifespan::{
    calibrate_c_s, lifespan_estimate, lifespan_from_norm, size_ratio_history, SizeHistory, CALIBRATED_C_S,
    CALIBRATION_S,
};
pub use rhs::{
    conservation_rates, rhs_momentum, rhs_momentum_with, rhs_velocity, rhs_velocity_with,
    ConservationRates,
};
pub use state::{FieldState, Formulation, PdeParams, SolverParams};
pub use support::{support_diagnostic, support_interval, SupportReport, SupportVerdict};
