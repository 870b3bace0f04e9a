//! Peaked travelling waves and the multi-peakon reduction
//!
//! ```text
//! u = Σ f_i K(x - g_i),   v = Σ h_j K(x - k_j)
//! g_i' = v^p(g_i),  f_i' = (p - a) v^{p-1}(g_i) <v_x(g_i)> f_i
//! k_j' = u^q(k_j),  h_j' = (q - b) u^{q-1}(k_j) <u_x(k_j)> h_j
//! ```
//!
//! with `K = e^{-|x|}` on the line and `K = cosh([x]_π - π)` on the circle of
//! length 2π. `<·>` is the average of one-sided limits, realised by taking
//! `sgn(0) = 0` in the kernel derivative.

mod config;
mod ode;
mod weak;

pub use config::{
    eval_peakon_fields, exact_traveling_peakon, kernel, kernel_deriv, wrap, Domain, PEAK_MERGE,
    PeakonConfiguration,
};
pub use ode::{integrate_peakons, peakon_rhs, PeakonOutcome, PeakonRates, PeakonTrajectory};
pub use weak::{weak_residual, WeakResidualReport};
