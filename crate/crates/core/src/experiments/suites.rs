//! Regression suites: conservation laws on a random smooth run, and the
//! lifespan/size estimate.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Verdict};
use crate::dynamics::{
    calibrate_c_s, evolve_characteristics, integrate, lagrangian_residual, lifespan_estimate,
    size_ratio_history, FieldState, PdeParams, RunVerdict, SizeHistory, SolverParams, Trajectory,
};
use crate::error::{invalid, Result};
use crate::norms::sup_norm;
use crate::spectral::{random_smooth_field, GridSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConservationParams {
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub modes: usize,
    pub amplitude: f64,
    pub monitor_every: usize,
    /// Number of evenly spaced characteristic seeds for the Lagrangian check;
    /// zero skips it.
    pub lagrangian_seeds: usize,
    pub drift_tol: f64,
    pub rate_tol: f64,
    pub lagrangian_tol: f64,
}

impl Default for ConservationParams {
    fn default() -> Self {
        Self {
            p: 2,
            q: 2,
            a: 1.0,
            b: 1.0,
            n: 256,
            length: 2.0 * std::f64::consts::PI,
            dt: 1e-3,
            t_final: 1.0,
            seed: 0,
            modes: 4,
            amplitude: 0.5,
            monitor_every: 10,
            lagrangian_seeds: 32,
            drift_tol: 1e-8,
            rate_tol: 1e-8,
            lagrangian_tol: 1e-4,
        }
    }
}

impl ConservationParams {
    pub fn pde(&self) -> Result<PdeParams<f64>> {
        PdeParams::new(self.p, self.q, self.a, self.b)
    }

    pub fn solver(&self) -> Result<SolverParams<f64>> {
        let sp = SolverParams::new(self.pde()?, self.t_final)
            .with_dt(self.dt)
            .with_monitor_every(self.monitor_every);
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver()?;
        GridSpec::new(self.n, self.length)?;
        if self.modes == 0 || 2 * self.modes >= self.n {
            return Err(invalid("modes must be positive and below n/2"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("amplitude must be non-negative"));
        }
        if [self.drift_tol, self.rate_tol, self.lagrangian_tol]
            .iter()
            .any(|t| !(*t > 0.0))
        {
            return Err(invalid("tolerances must be positive"));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<FieldState<f64>> {
        let grid = GridSpec::new(self.n, self.length)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let u = random_smooth_field(&grid, self.modes, self.amplitude, &mut rng);
        let v = random_smooth_field(&grid, self.modes, self.amplitude, &mut rng);
        FieldState::new(u, v, self.pde()?)
    }
}

/// `|m|^{p/a}` integrates accurately on the grid when the exponent is an even
/// integer or `m` keeps one sign.
fn lebesgue_applicable(m: &[f64], num: u32, den: f64) -> bool {
    if den == 0.0 {
        return false;
    }
    let e = num as f64 / den;
    let even = e > 0.0 && e.fract() == 0.0 && (e as u64) % 2 == 0;
    even || m.iter().all(|&x| x > 0.0) || m.iter().all(|&x| x < 0.0)
}

/// Integrate a random smooth datum and check the conservation identities
/// that apply to `(p, q, a, b)`.
pub fn run_conservation(prm: &ConservationParams) -> Result<(ExperimentReport, Trajectory<f64>)> {
    prm.validate()?;
    let start = Instant::now();
    let state0 = prm.initial_state()?;
    let traj = integrate(&state0, &prm.solver()?)?;
    let config = serde_json::to_value(prm).map_err(|e| invalid(e.to_string()))?;
    let mut report = ExperimentReport::new(
        "conservation",
        &["t", "l2_m", "l2_n", "rate_residual_m", "rate_residual_n"],
        config,
    );
    for r in &traj.trace.records {
        report
            .rows
            .push(vec![r.time, r.l2_m, r.l2_n, r.rate_residual_m, r.rate_residual_n]);
    }
    let energy = prm.p as f64 == 2.0 * prm.a && prm.q as f64 == 2.0 * prm.b;
    if let RunVerdict::BlowUp { time, reason } = &traj.verdict {
        report
            .flagged
            .push(format!("blow-up at t = {time}: {reason}"));
        report.verdicts.push(Verdict::new(
            "global_regularity",
            prm.t_final,
            *time,
            !energy,
            if energy {
                "blow-up where the energy is conserved"
            } else {
                "blow-up detected"
            },
        ));
    }
    let t = &traj.trace;
    if energy {
        let d = t.drift_l2_m().max(t.drift_l2_n());
        report.verdicts.push(Verdict::new(
            "l2_drift",
            0.0,
            d,
            d <= prm.drift_tol,
            format!("relative drift of ∫m² and ∫n², tolerance {:e}", prm.drift_tol),
        ));
    } else {
        report.verdicts.push(Verdict::not_applicable(
            "l2_drift",
            0.0,
            "∫m² is conserved only for p = 2a and q = 2b",
        ));
    }
    let rr = t.max_rate_residual();
    report.verdicts.push(Verdict::new(
        "rate_identity",
        0.0,
        rr,
        rr <= prm.rate_tol,
        format!(
            "largest relative residual of d/dt ∫m² = (p-2a)/p ∫m²(v^p)_x, tolerance {:e}",
            prm.rate_tol
        ),
    ));
    let m0 = state0.m();
    let n0 = state0.n();
    let lm = lebesgue_applicable(m0.values(), prm.p, prm.a);
    let ln = lebesgue_applicable(n0.values(), prm.q, prm.b);
    let drifts: Vec<f64> = [
        lm.then(|| t.drift_lpa_m()).flatten(),
        ln.then(|| t.drift_lqb_n()).flatten(),
    ]
    .into_iter()
    .flatten()
    .collect();
    if drifts.is_empty() {
        report.verdicts.push(Verdict::not_applicable(
            "lebesgue_drift",
            0.0,
            "no momentum with a reliably integrable power",
        ));
    } else {
        let d = drifts.iter().copied().fold(0.0, f64::max);
        report.verdicts.push(Verdict::new(
            "lebesgue_drift",
            0.0,
            d,
            d <= 100.0 * prm.drift_tol,
            "relative drift of ∫|m|^{p/a} and ∫|n|^{q/b}",
        ));
    }
    if prm.lagrangian_seeds > 0 && traj.verdict == RunVerdict::Healthy {
        let g = state0.grid();
        let seeds: Vec<f64> = (0..prm.lagrangian_seeds)
            .map(|i| g.length() * (i as f64 + 0.5) / prm.lagrangian_seeds as f64)
            .collect();
        let bundle = evolve_characteristics(&traj, &seeds)?;
        let scale = sup_norm(&m0).max(sup_norm(&n0)).max(f64::MIN_POSITIVE);
        let res = lagrangian_residual(&traj, &bundle)
            .into_iter()
            .map(|(_, a, b)| a.max(b))
            .fold(0.0, f64::max);
        report.verdicts.push(Verdict::new(
            "lagrangian_identity",
            0.0,
            res,
            res <= prm.lagrangian_tol * scale.max(1.0) && bundle.jacobians_positive(),
            format!(
                "sup of |m(t,φ)φ_x^(a/p) - m₀|; jacobians positive: {}",
                bundle.jacobians_positive()
            ),
        ));
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((report, traj))
}

/// Grid points, box and datum size of the lifespan calibration runs.
pub const CALIBRATION_N: usize = 128;
pub const CALIBRATION_MODES: usize = 6;
pub const CALIBRATION_AMPLITUDE: f64 = 0.5;
pub const CALIBRATION_DT: f64 = 1e-3;

/// Random smooth CCCH datum (`p = q = 1`, `a = b = 2`) for seed `seed`.
pub fn calibration_state(seed: u64) -> Result<FieldState<f64>> {
    let grid = GridSpec::new(CALIBRATION_N, 2.0 * std::f64::consts::PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_smooth_field(&grid, CALIBRATION_MODES, CALIBRATION_AMPLITUDE, &mut rng);
    let v = random_smooth_field(&grid, CALIBRATION_MODES, CALIBRATION_AMPLITUDE, &mut rng);
    FieldState::new(u, v, PdeParams::new(1, 1, 2.0, 2.0)?)
}

/// Size-ratio history of `state0` in `H^s` up to `t_max`; a blow-up is
/// recorded as an infinite ratio at the blow-up time.
pub fn size_history(state0: &FieldState<f64>, s: f64, t_max: f64, dt: f64) -> Result<SizeHistory<f64>> {
    let sp = SolverParams::new(state0.params, t_max)
        .with_dt(dt)
        .with_monitor_every(1);
    let traj = integrate(state0, &sp)?;
    let mut samples = size_ratio_history(&traj, s);
    if let RunVerdict::BlowUp { time, .. } = traj.verdict {
        samples.push((time, f64::INFINITY));
    }
    Ok(SizeHistory {
        z0: state0.pair_norm(s),
        kappa: state0.params.kappa(),
        samples,
    })
}

/// Smallest `C_s` for which the factor-2 size bound holds up to `T₀` on
/// every calibration seed.
pub fn calibrate_lifespan_constant(seeds: &[u64], s: f64, t_max: f64) -> Result<f64> {
    let hs = seeds
        .par_iter()
        .map(|&seed| size_history(&calibration_state(seed)?, s, t_max, CALIBRATION_DT))
        .collect::<Result<Vec<_>>>()?;
    calibrate_c_s(&hs, t_max)
}

/// Integrate each seed to its `T₀(C_s)` and check `‖z(t)‖ ≤ 2‖z₀‖`
/// componentwise along the way.
pub fn check_size_estimate(seeds: &[u64], s: f64, c_s: f64) -> Result<ExperimentReport> {
    let start = Instant::now();
    let config = serde_json::json!({ "seeds": seeds, "s": s, "c_s": c_s });
    let mut report = ExperimentReport::new(
        "size_estimate",
        &["seed", "z0_norm", "t0", "max_ratio"],
        config,
    );
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let st = calibration_state(seed)?;
            let t0 = lifespan_estimate(&st, s, c_s)?;
            let dt = CALIBRATION_DT.min(t0 / 50.0);
            let h = size_history(&st, s, t0, dt)?;
            let worst = h.samples.iter().map(|x| x.1).fold(0.0, f64::max);
            Ok(vec![seed as f64, h.z0, t0, worst])
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    report.rows = rows;
    report.verdicts.push(Verdict::new(
        "size_bound",
        2.0,
        worst,
        worst <= 2.0,
        format!("largest H^{s} growth factor up to T0 with C_s = {c_s}"),
    ));
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}
