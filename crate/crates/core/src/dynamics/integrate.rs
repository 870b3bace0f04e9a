use serde::Serialize;

use super::rhs::{conservation_rates, rhs_momentum_with, rhs_velocity_with};
use super::state::{FieldState, Formulation, SolverParams};
use crate::error::{invalid, Result};
use crate::norms::{inner, lp_integral, sobolev_norm, sup_norm};
use crate::scalar::{ipow, Real};
use crate::spectral::{deriv, helmholtz_inv, Field};

fn tendency<T: Real>(
    state: &FieldState<T>,
    params: &SolverParams<T>,
) -> (Field<T>, Field<T>) {
    match params.formulation {
        Formulation::Velocity => rhs_velocity_with(state, params.dealias_degree),
        Formulation::Momentum => {
            let (dm, dn) = rhs_momentum_with(state, params.dealias_degree);
            (helmholtz_inv(&dm), helmholtz_inv(&dn))
        }
    }
}

fn shifted<T: Real>(state: &FieldState<T>, h: T, k: &(Field<T>, Field<T>)) -> FieldState<T> {
    FieldState {
        u: state.u.axpy(h, &k.0),
        v: state.v.axpy(h, &k.1),
        params: state.params,
        time: state.time + h,
    }
}

/// One classical RK4 step. In momentum form the update is carried out on
/// `(m, n)` and mapped back through the Helmholtz inverse, which is linear
/// and therefore commutes with the stage combination.
pub fn step_rk4<T: Real>(
    state: &FieldState<T>,
    dt: T,
    params: &SolverParams<T>,
) -> Result<FieldState<T>> {
    if !(dt > T::zero()) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    let half = dt / T::lit(2.0);
    let k1 = tendency(state, params);
    let k2 = tendency(&shifted(state, half, &k1), params);
    let k3 = tendency(&shifted(state, half, &k2), params);
    let k4 = tendency(&shifted(state, dt, &k3), params);
    let w = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let combine = |x: &Field<T>, a: &Field<T>, b: &Field<T>, c: &Field<T>, d: &Field<T>| {
        let mut out = x.clone();
        for (i, o) in out.values_mut().iter_mut().enumerate() {
            *o += w * (a.values()[i] + two * b.values()[i] + two * c.values()[i] + d.values()[i]);
        }
        out
    };
    Ok(FieldState {
        u: combine(&state.u, &k1.0, &k2.0, &k3.0, &k4.0),
        v: combine(&state.v, &k1.1, &k2.1, &k3.1, &k4.1),
        params: state.params,
        time: state.time + dt,
    })
}

/// Blow-up monitors of a single state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupIndicators<T> {
    pub sup_m: T,
    pub sup_n: T,
    pub slope_min_vp: T,
    pub slope_max_vp: T,
    pub slope_min_uq: T,
    pub slope_max_uq: T,
    pub argmin_vp: T,
    pub argmax_vp: T,
    pub argmin_uq: T,
    pub argmax_uq: T,
    /// Running time integral of
    /// `‖n‖^p + ‖m‖‖n‖^{p-1} + ‖m‖^q + ‖n‖‖m‖^{q-1}` (sup norms).
    pub thm13_accum: T,
}

impl<T: Real> BlowupIndicators<T> {
    pub fn is_finite(&self) -> bool {
        [
            self.sup_m,
            self.sup_n,
            self.slope_min_vp,
            self.slope_max_vp,
            self.slope_min_uq,
            self.slope_max_uq,
            self.thm13_accum,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// `(min, argmin, max, argmax)` of `(w^p)_x` on the grid.
fn slope_extremes<T: Real>(w: &Field<T>, p: u32) -> (T, T, T, T) {
    let wx = deriv(w, 1);
    let pr = T::from_usize_lossy(p as usize);
    let grid = w.grid();
    let mut out = (T::infinity(), T::zero(), T::neg_infinity(), T::zero());
    for (j, (&wj, &wxj)) in w.values().iter().zip(wx.values()).enumerate() {
        let s = pr * ipow(wj, p - 1) * wxj;
        if s < out.0 {
            out.0 = s;
            out.1 = grid.point(j);
        }
        if s > out.2 {
            out.2 = s;
            out.3 = grid.point(j);
        }
    }
    out
}

fn thm13_integrand<T: Real>(sm: T, sn: T, p: u32, q: u32) -> T {
    ipow(sn, p) + sm * ipow(sn, p - 1) + ipow(sm, q) + sn * ipow(sm, q - 1)
}

/// One row of the diagnostic trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorRecord<T> {
    pub step: usize,
    pub time: T,
    pub norm_u: T,
    pub norm_v: T,
    pub indicators: BlowupIndicators<T>,
    /// `∫m²` and `∫n²`.
    pub l2_m: T,
    pub l2_n: T,
    /// `∫|m|^{p/a}` and `∫|n|^{q/b}`; absent when the coefficient is zero.
    pub lpa_m: Option<T>,
    pub lqb_n: Option<T>,
    /// Relative mismatch of the energy-rate identity.
    pub rate_residual_m: T,
    pub rate_residual_n: T,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticTrace<T> {
    pub records: Vec<MonitorRecord<T>>,
}

fn max_rel_drift<T: Real>(xs: impl Iterator<Item = T>) -> T {
    let xs: Vec<T> = xs.collect();
    let Some(&x0) = xs.first() else {
        return T::zero();
    };
    let scale = x0.abs().max(T::min_positive_value());
    xs.iter()
        .map(|&x| (x - x0).abs() / scale)
        .fold(T::zero(), T::max)
}

impl<T: Real> DiagnosticTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn drift_l2_m(&self) -> T {
        max_rel_drift(self.records.iter().map(|r| r.l2_m))
    }

    pub fn drift_l2_n(&self) -> T {
        max_rel_drift(self.records.iter().map(|r| r.l2_n))
    }

    pub fn drift_lpa_m(&self) -> Option<T> {
        self.records
            .iter()
            .map(|r| r.lpa_m)
            .collect::<Option<Vec<T>>>()
            .map(|v| max_rel_drift(v.into_iter()))
    }

    pub fn drift_lqb_n(&self) -> Option<T> {
        self.records
            .iter()
            .map(|r| r.lqb_n)
            .collect::<Option<Vec<T>>>()
            .map(|v| max_rel_drift(v.into_iter()))
    }

    pub fn max_rate_residual(&self) -> T {
        self.records
            .iter()
            .map(|r| r.rate_residual_m.max(r.rate_residual_n))
            .fold(T::zero(), T::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunVerdict<T> {
    Healthy,
    BlowUp { time: T, reason: String },
}

impl<T> RunVerdict<T> {
    pub fn is_healthy(&self) -> bool {
        matches!(self, RunVerdict::Healthy)
    }
}

/// Snapshots at the monitored steps (always including the initial state and,
/// for healthy runs, the final one), the diagnostic trace and the verdict.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub params: SolverParams<T>,
    pub snapshots: Vec<FieldState<T>>,
    pub trace: DiagnosticTrace<T>,
    pub verdict: RunVerdict<T>,
    pub steps: usize,
    /// Number of steps that needed CFL halving.
    pub halved_steps: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn initial(&self) -> &FieldState<T> {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &FieldState<T> {
        self.snapshots.last().expect("trajectory has an initial state")
    }

    pub fn times(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
}

fn record<T: Real>(
    state: &FieldState<T>,
    step: usize,
    s: T,
    thm13_accum: T,
) -> MonitorRecord<T> {
    let pp = state.params;
    let m = state.m();
    let n = state.n();
    let (smin_v, amin_v, smax_v, amax_v) = slope_extremes(&state.v, pp.p);
    let (smin_u, amin_u, smax_u, amax_u) = slope_extremes(&state.u, pp.q);
    let rates = conservation_rates(state);
    let (rm, rn) = rates.relative_residuals();
    let lp = |f: &Field<T>, num: u32, c: T| {
        (c != T::zero()).then(|| lp_integral(f, T::from_usize_lossy(num as usize) / c))
    };
    MonitorRecord {
        step,
        time: state.time,
        norm_u: sobolev_norm(&state.u, s),
        norm_v: sobolev_norm(&state.v, s),
        indicators: BlowupIndicators {
            sup_m: sup_norm(&m),
            sup_n: sup_norm(&n),
            slope_min_vp: smin_v,
            slope_max_vp: smax_v,
            slope_min_uq: smin_u,
            slope_max_uq: smax_u,
            argmin_vp: amin_v,
            argmax_vp: amax_v,
            argmin_uq: amin_u,
            argmax_uq: amax_u,
            thm13_accum,
        },
        l2_m: inner(&m, &m),
        l2_n: inner(&n, &n),
        lpa_m: lp(&m, pp.p, pp.a),
        lqb_n: lp(&n, pp.q, pp.b),
        rate_residual_m: rm,
        rate_residual_n: rn,
    }
}

const MAX_HALVINGS: u32 = 30;

/// March `state0` to `params.t_final`.
///
/// The run stops early with a blow-up verdict when values turn non-finite,
/// when a sup norm of `u, v, m, n` exceeds the ceiling, or when CFL halving
/// would need more than 2^30 substeps. Invalid parameters are the only
/// error.
pub fn integrate<T: Real>(
    state0: &FieldState<T>,
    params: &SolverParams<T>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    if params.pde != state0.params {
        return Err(invalid(
            "solver parameters and state disagree on (p, q, a, b)",
        ));
    }
    let pp = state0.params;
    let s = params.norm_index;
    let k_max = state0.grid().k_max();
    let total_steps = (params.t_final / params.dt - T::lit(1e-9))
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);

    let mut traj = Trajectory {
        params: params.clone(),
        snapshots: vec![state0.clone()],
        trace: DiagnosticTrace::default(),
        verdict: RunVerdict::Healthy,
        steps: 0,
        halved_steps: 0,
    };
    if !state0.is_finite() {
        traj.verdict = RunVerdict::BlowUp {
            time: state0.time,
            reason: "non-finite initial data".into(),
        };
        return Ok(traj);
    }
    traj.trace.records.push(record(state0, 0, s, T::zero()));

    let sups = |st: &FieldState<T>| (sup_norm(&st.m()), sup_norm(&st.n()));
    let (mut sm, mut sn) = sups(state0);
    let mut j_prev = thm13_integrand(sm, sn, pp.p, pp.q);
    let mut accum = T::zero();
    let mut state = state0.clone();
    let t0 = state0.time;

    for step in 1..=total_steps {
        let t_target = if step == total_steps {
            t0 + params.t_final
        } else {
            t0 + params.dt * T::from_usize_lossy(step)
        };
        let h = t_target - state.time;
        let speed = ipow(sup_norm(&state.v), pp.p).max(ipow(sup_norm(&state.u), pp.q));
        let proxy = h * speed * k_max / params.cfl;
        let mut halvings = 0u32;
        while proxy / T::from_usize_lossy(1usize << halvings.min(62)) > T::one() {
            halvings += 1;
            if halvings > MAX_HALVINGS {
                break;
            }
        }
        if halvings > MAX_HALVINGS || !proxy.is_finite() {
            traj.verdict = RunVerdict::BlowUp {
                time: state.time,
                reason: "CFL step underflow".into(),
            };
            break;
        }
        if halvings > 0 {
            traj.halved_steps += 1;
        }
        let sub = 1usize << halvings;
        let hs = h / T::from_usize_lossy(sub);
        let mut ok = true;
        for _ in 0..sub {
            state = step_rk4(&state, hs, params)?;
            if !state.is_finite() {
                ok = false;
                break;
            }
        }
        state.time = t_target;
        traj.steps = step;
        if !ok {
            traj.verdict = RunVerdict::BlowUp {
                time: state.time,
                reason: "non-finite values".into(),
            };
            break;
        }
        (sm, sn) = sups(&state);
        let ceiling = params.blowup_ceiling;
        let biggest = sm.max(sn).max(sup_norm(&state.u)).max(sup_norm(&state.v));
        if !(biggest <= ceiling) {
            traj.verdict = RunVerdict::BlowUp {
                time: state.time,
                reason: format!("sup norm {biggest:e} exceeds ceiling {ceiling:e}"),
            };
            traj.trace.records.push(record(&state, step, s, accum));
            traj.snapshots.push(state.clone());
            break;
        }
        let j_new = thm13_integrand(sm, sn, pp.p, pp.q);
        accum += h * (j_prev + j_new) / T::lit(2.0);
        j_prev = j_new;
        if step % params.monitor_every == 0 || step == total_steps {
            traj.trace.records.push(record(&state, step, s, accum));
            traj.snapshots.push(state.clone());
        }
    }
    Ok(traj)
}
