use super::integrate::Trajectory;
use super::state::FieldState;
use crate::error::{invalid, Result};
use crate::norms::sobolev_norm;
use crate::scalar::{ipow, Real};

/// Sobolev index at which [`CALIBRATED_C_S`] was fitted.
pub const CALIBRATION_S: f64 = 3.0;

/// Constant of the lifespan bound for `s = 3`, fitted with
/// `experiments::calibrate_lifespan_constant` over seeds 0..40 (the
/// `calibrate` example) and rounded up.
pub const CALIBRATED_C_S: f64 = 2.1129e-2;

/// `T₀ = (2^κ - 1) / (2^{κ+1} κ C_s ‖z₀‖^κ)`; `+∞` for `‖z₀‖ = 0`.
pub fn lifespan_from_norm<T: Real>(kappa: u32, c_s: T, z0: T) -> T {
    if z0 == T::zero() {
        return T::infinity();
    }
    let two_k = ipow(T::lit(2.0), kappa);
    let k = T::from_usize_lossy(kappa as usize);
    (two_k - T::one()) / (T::lit(2.0) * two_k * k * c_s * ipow(z0, kappa))
}

/// Lifespan lower bound with `‖z₀‖ = ‖u₀‖_{H^s} + ‖v₀‖_{H^s}`.
pub fn lifespan_estimate<T: Real>(state0: &FieldState<T>, s: T, c_s: T) -> Result<T> {
    if !(c_s > T::zero() && c_s.is_finite()) {
        return Err(invalid(format!("C_s must be positive, got {c_s}")));
    }
    Ok(lifespan_from_norm(
        state0.params.kappa(),
        c_s,
        state0.pair_norm(s),
    ))
}

/// `(t, max(‖u(t)‖/‖u₀‖, ‖v(t)‖/‖v₀‖))` in `H^s` along the stored snapshots;
/// a component with zero initial norm is skipped.
pub fn size_ratio_history<T: Real>(traj: &Trajectory<T>, s: T) -> Vec<(T, T)> {
    let u0 = sobolev_norm(&traj.initial().u, s);
    let v0 = sobolev_norm(&traj.initial().v, s);
    traj.snapshots
        .iter()
        .map(|st| {
            let mut r = T::one();
            if u0 > T::zero() {
                r = r.max(sobolev_norm(&st.u, s) / u0);
            }
            if v0 > T::zero() {
                r = r.max(sobolev_norm(&st.v, s) / v0);
            }
            (st.time, r)
        })
        .collect()
}

/// Size history of one calibration run: `‖z₀‖_{H^s}`, `κ`, and the ratio
/// samples from [`size_ratio_history`].
#[derive(Clone, Debug)]
pub struct SizeHistory<T> {
    pub z0: T,
    pub kappa: u32,
    pub samples: Vec<(T, T)>,
}

fn bound_holds<T: Real>(hs: &[SizeHistory<T>], c: T) -> bool {
    hs.iter().all(|h| {
        let t0 = lifespan_from_norm(h.kappa, c, h.z0);
        h.samples
            .iter()
            .filter(|(t, _)| *t <= t0)
            .all(|&(_, r)| r <= T::lit(2.0))
    })
}

/// Smallest `C_s` (to bisection accuracy) for which every history keeps its
/// size ratio at most 2 up to `T₀(C_s)`. Histories must extend to `t_max`;
/// the search starts from the value where the shortest `T₀` equals `t_max`,
/// which is returned unchanged if the bound already holds there.
pub fn calibrate_c_s<T: Real>(hs: &[SizeHistory<T>], t_max: T) -> Result<T> {
    if hs.is_empty() {
        return Err(invalid("calibration needs at least one history"));
    }
    let c_at = |t: T| {
        hs.iter()
            .map(|h| lifespan_from_norm(h.kappa, T::one(), h.z0) / t)
            .fold(T::zero(), T::max)
    };
    let lo0 = c_at(t_max);
    if bound_holds(hs, lo0) {
        return Ok(lo0);
    }
    let t_first = hs
        .iter()
        .flat_map(|h| h.samples.iter().map(|s| s.0))
        .filter(|&t| t > T::zero())
        .fold(T::infinity(), T::min);
    if !t_first.is_finite() {
        return Err(invalid("calibration histories have no positive sample times"));
    }
    let mut lo = lo0;
    let mut hi = c_at(t_first / T::lit(2.0));
    if !bound_holds(hs, hi) {
        return Err(invalid("size bound fails at the first recorded step"));
    }
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if bound_holds(hs, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
