//! Two-frequency families `z_{ω,λ} = low + high` and the λ-sweep showing that
//! close initial data separate at a later time.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profiles::CutoffProfile;
use super::report::{fit_loglog, ExperimentReport, Verdict};
use crate::dynamics::{integrate, rhs_velocity, FieldState, PdeParams, RunVerdict, SolverParams};
use crate::error::{invalid, Error, Result};
use crate::norms::sobolev_norm;
use crate::spectral::{Field, GridSpec};

const MIN_POINTS_PER_WAVELENGTH: f64 = 8.0;

/// Parameters of the non-uniform dependence sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonuniformParams {
    pub s: f64,
    pub delta: f64,
    /// Index of the residual norm used for the error-exponent check.
    pub theta: f64,
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    pub lambdas: Vec<f64>,
    /// The two values of ω whose solutions are compared.
    pub omegas: [f64; 2],
    pub t_probe: f64,
    pub dt: f64,
    pub phi: CutoffProfile,
    pub psi: CutoffProfile,
    pub phi_tilde: CutoffProfile,
    pub psi_tilde: CutoffProfile,
    /// Fraction of the asymptotic lower bound required at `t_probe`.
    pub lower_bound_slack: f64,
    /// Uniform bound on `‖z_{ω,λ}(0)‖_{H^s}` over the sweep.
    pub hs_ceiling: f64,
}

impl Default for NonuniformParams {
    fn default() -> Self {
        Self {
            s: 3.0,
            delta: 0.5,
            theta: 1.75,
            p: 1,
            q: 1,
            a: 2.0,
            b: 2.0,
            lambdas: vec![64.0, 128.0, 256.0, 512.0, 1024.0],
            omegas: [0.0, 1.0],
            t_probe: 1.0,
            dt: 0.02,
            phi: CutoffProfile::Bump,
            psi: CutoffProfile::Bump,
            phi_tilde: CutoffProfile::WideBump,
            psi_tilde: CutoffProfile::WideBump,
            lower_bound_slack: 0.5,
            hs_ceiling: 4.0,
        }
    }
}

impl NonuniformParams {
    pub fn pde(&self) -> Result<PdeParams<f64>> {
        PdeParams::new(self.p, self.q, self.a, self.b)
    }

    /// `1 + s - δ - θ`.
    pub fn theta_s(&self) -> f64 {
        1.0 + self.s - self.delta - self.theta
    }

    pub fn validate(&self) -> Result<()> {
        self.pde()?;
        if !(self.s > 2.5) {
            return Err(invalid(format!("s must exceed 5/2, got {}", self.s)));
        }
        if !(self.theta > 1.5 && self.theta < self.s) {
            return Err(invalid(format!(
                "theta must lie in (3/2, s), got {}",
                self.theta
            )));
        }
        let dmax = 1.0_f64.min(2.0_f64.min(1.0 + self.s - self.theta));
        if !(self.delta > 0.0 && self.delta < dmax) {
            return Err(invalid(format!(
                "delta must lie in (0, {dmax}), got {}",
                self.delta
            )));
        }
        if self.lambdas.len() < 2 {
            return Err(invalid("need at least two values of lambda"));
        }
        if self.lambdas.iter().any(|&l| !(l >= 4.0 && l.is_finite())) {
            return Err(invalid("every lambda must be finite and at least 4"));
        }
        if self.lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("lambdas must be strictly increasing"));
        }
        if self.omegas.iter().any(|w| !w.is_finite()) {
            return Err(invalid("omegas must be finite"));
        }
        if !(self.t_probe > 0.0 && self.t_probe.is_finite()) {
            return Err(invalid("t_probe must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt must be positive"));
        }
        if !(self.lower_bound_slack > 0.0 && self.hs_ceiling > 0.0) {
            return Err(invalid("lower_bound_slack and hs_ceiling must be positive"));
        }
        Ok(())
    }

    fn max_reach(&self) -> f64 {
        [self.phi, self.psi, self.phi_tilde, self.psi_tilde]
            .iter()
            .map(|p| p.reach())
            .fold(0.0, f64::max)
    }
}

fn next_pow2_at_least(x: f64) -> usize {
    (x.ceil().max(8.0) as usize).next_power_of_two()
}

/// Box for frequency `λ`: profiles of half-width `reach` dilated by
/// `ρ = λ^{δ/min(p,q)}` occupy the middle half of `L = 4·reach·ρ`, sampled
/// with at least 8 points per wavelength.
pub fn nonuniform_grid(lambda: f64, delta: f64, p: u32, q: u32, reach: f64) -> Result<GridSpec<f64>> {
    let rho = lambda.powf(delta / p.min(q) as f64);
    let length = 4.0 * reach.max(1.0) * rho;
    let n = next_pow2_at_least(MIN_POINTS_PER_WAVELENGTH * lambda * length / (2.0 * PI));
    GridSpec::new(n, length)
}

fn check_resolution(grid: &GridSpec<f64>, lambda: f64) -> Result<()> {
    if !(lambda >= 4.0) {
        return Err(invalid(format!("lambda must be at least 4, got {lambda}")));
    }
    let ppw = grid.n() as f64 * (2.0 * PI / lambda) / grid.length();
    if ppw < MIN_POINTS_PER_WAVELENGTH {
        return Err(Error::UnderResolved {
            lambda,
            points_per_wavelength: ppw,
        });
    }
    Ok(())
}

/// Samples `A·profile((x - L/2)/ρ)·wave(λ(x - L/2) - phase)`.
fn modulated(
    grid: &GridSpec<f64>,
    amp: f64,
    profile: CutoffProfile,
    rho: f64,
    lambda: f64,
    phase: f64,
    wave: fn(f64) -> f64,
) -> Field<f64> {
    let c = grid.length() / 2.0;
    Field::from_fn(grid, |x| {
        let y = x - c;
        let env = profile.eval(y / rho);
        if env == 0.0 {
            0.0
        } else {
            amp * env * wave(lambda * y - phase)
        }
    })
}

/// High-frequency part
/// `u_h = λ^{-δ/(2p)-s} φ(x/λ^{δ/p}) cos(λx - ω^p t)`,
/// `v_h = λ^{-δ/(2q)-s} ψ(x/λ^{δ/q}) cos(λx - ω^q t)`,
/// centred in the box.
#[allow(clippy::too_many_arguments)]
pub fn build_high_freq(
    grid: &GridSpec<f64>,
    omega: f64,
    lambda: f64,
    delta: f64,
    s: f64,
    p: u32,
    q: u32,
    t: f64,
    phi: CutoffProfile,
    psi: CutoffProfile,
) -> Result<(Field<f64>, Field<f64>)> {
    check_resolution(grid, lambda)?;
    let (pf, qf) = (p as f64, q as f64);
    let u = modulated(
        grid,
        lambda.powf(-delta / (2.0 * pf) - s),
        phi,
        lambda.powf(delta / pf),
        lambda,
        omega.powi(p as i32) * t,
        f64::cos,
    );
    let v = modulated(
        grid,
        lambda.powf(-delta / (2.0 * qf) - s),
        psi,
        lambda.powf(delta / qf),
        lambda,
        omega.powi(q as i32) * t,
        f64::cos,
    );
    Ok((u, v))
}

/// Time derivative of [`build_high_freq`].
#[allow(clippy::too_many_arguments)]
fn high_freq_rate(
    grid: &GridSpec<f64>,
    omega: f64,
    lambda: f64,
    delta: f64,
    s: f64,
    p: u32,
    q: u32,
    t: f64,
    phi: CutoffProfile,
    psi: CutoffProfile,
) -> (Field<f64>, Field<f64>) {
    let (pf, qf) = (p as f64, q as f64);
    let (wp, wq) = (omega.powi(p as i32), omega.powi(q as i32));
    let u = modulated(
        grid,
        wp * lambda.powf(-delta / (2.0 * pf) - s),
        phi,
        lambda.powf(delta / pf),
        lambda,
        wp * t,
        f64::sin,
    );
    let v = modulated(
        grid,
        wq * lambda.powf(-delta / (2.0 * qf) - s),
        psi,
        lambda.powf(delta / qf),
        lambda,
        wq * t,
        f64::sin,
    );
    (u, v)
}

/// Low-frequency initial data
/// `u_l(0) = ωλ^{-1/q} φ̃(x/λ^{δ/q})`, `v_l(0) = ωλ^{-1/p} ψ̃(x/λ^{δ/p})`.
#[allow(clippy::too_many_arguments)]
pub fn build_low_freq_data(
    grid: &GridSpec<f64>,
    omega: f64,
    lambda: f64,
    delta: f64,
    params: PdeParams<f64>,
    phi_tilde: CutoffProfile,
    psi_tilde: CutoffProfile,
) -> Result<FieldState<f64>> {
    check_resolution(grid, lambda)?;
    let (pf, qf) = (params.p as f64, params.q as f64);
    let c = grid.length() / 2.0;
    let (au, ru) = (omega * lambda.powf(-1.0 / qf), lambda.powf(delta / qf));
    let (av, rv) = (omega * lambda.powf(-1.0 / pf), lambda.powf(delta / pf));
    let u = Field::from_fn(grid, |x| au * phi_tilde.eval((x - c) / ru));
    let v = Field::from_fn(grid, |x| av * psi_tilde.eval((x - c) / rv));
    FieldState::new(u, v, params)
}

/// Whether the oscillating carrier is `cos` or `sin`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    #[default]
    Cos,
    Sin,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma51Row {
    pub lambda: f64,
    pub n: usize,
    pub length: f64,
    /// `λ^{-δ/2-s} ‖ψ(x/λ^δ) carrier(λx - α)‖_{H^s}`.
    pub scaled_norm: f64,
    /// `scaled_norm / limit`; NaN when the limit is zero.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma51Table {
    pub limit: f64,
    pub rows: Vec<Lemma51Row>,
    /// `|scaled_norm - limit|` is non-increasing in λ.
    pub monotone: bool,
}

/// Scaled `H^s` norms of a modulated, dilated profile against the limit
/// `‖ψ‖_{L²}/√2`.
pub fn check_lemma51(
    profile: CutoffProfile,
    s: f64,
    delta: f64,
    lambdas: &[f64],
    carrier: Carrier,
    alpha: f64,
) -> Result<Lemma51Table> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let limit = profile.l2_norm() / SQRT_2;
    let wave: fn(f64) -> f64 = match carrier {
        Carrier::Cos => f64::cos,
        Carrier::Sin => f64::sin,
    };
    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let grid = nonuniform_grid(lambda, delta, 1, 1, profile.reach())?;
            check_resolution(&grid, lambda)?;
            let f = modulated(&grid, 1.0, profile, lambda.powf(delta), lambda, alpha, wave);
            let scaled = lambda.powf(-delta / 2.0 - s) * sobolev_norm(&f, s);
            Ok(Lemma51Row {
                lambda,
                n: grid.n(),
                length: grid.length(),
                scaled_norm: scaled,
                ratio: if limit > 0.0 { scaled / limit } else { f64::NAN },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows
        .windows(2)
        .all(|w| (w[1].scaled_norm - limit).abs() <= (w[0].scaled_norm - limit).abs());
    Ok(Lemma51Table {
        limit,
        rows,
        monotone,
    })
}

struct LambdaOutcome {
    lambda: f64,
    n: usize,
    /// `max_ω ‖z_{ω,λ}(0)‖_{H^s}`.
    z0_norm: f64,
    dist0: f64,
    dist_t: f64,
    dist_t_u: f64,
    residual: f64,
    blowup: Option<String>,
}

fn pair_dist(a: &FieldState<f64>, b: &FieldState<f64>, s: f64) -> Result<(f64, f64)> {
    let du = sobolev_norm(&a.u.zip_map(&b.u, |x, y| x - y)?, s);
    let dv = sobolev_norm(&a.v.zip_map(&b.v, |x, y| x - y)?, s);
    Ok((du + dv, du))
}

fn initial_state(
    prm: &NonuniformParams,
    grid: &GridSpec<f64>,
    omega: f64,
    lambda: f64,
) -> Result<(FieldState<f64>, FieldState<f64>)> {
    let low = build_low_freq_data(
        grid,
        omega,
        lambda,
        prm.delta,
        prm.pde()?,
        prm.phi_tilde,
        prm.psi_tilde,
    )?;
    let (uh, vh) = build_high_freq(
        grid, omega, lambda, prm.delta, prm.s, prm.p, prm.q, 0.0, prm.phi, prm.psi,
    )?;
    let z = FieldState::new(low.u.axpy(1.0, &uh), low.v.axpy(1.0, &vh), low.params)?;
    Ok((low, z))
}

/// `‖∂_t(z_l + z_h) - F(z_l + z_h)‖_{H^θ}` at `t = 0`, using that `z_l`
/// solves the equation exactly.
fn approximate_residual(
    prm: &NonuniformParams,
    grid: &GridSpec<f64>,
    omega: f64,
    lambda: f64,
    low: &FieldState<f64>,
    z: &FieldState<f64>,
) -> Result<f64> {
    let (hu, hv) = high_freq_rate(
        grid, omega, lambda, prm.delta, prm.s, prm.p, prm.q, 0.0, prm.phi, prm.psi,
    );
    let (fu, fv) = rhs_velocity(z);
    let (lu, lv) = rhs_velocity(low);
    let ru = hu.axpy(1.0, &lu).axpy(-1.0, &fu);
    let rv = hv.axpy(1.0, &lv).axpy(-1.0, &fv);
    Ok(sobolev_norm(&ru, prm.theta) + sobolev_norm(&rv, prm.theta))
}

fn run_lambda(prm: &NonuniformParams, lambda: f64) -> Result<LambdaOutcome> {
    let grid = nonuniform_grid(lambda, prm.delta, prm.p, prm.q, prm.max_reach())?;
    let pde = prm.pde()?;
    let steps = (prm.t_probe / prm.dt).ceil().max(1.0);
    let solver = SolverParams::new(pde, prm.t_probe)
        .with_dt(prm.t_probe / steps)
        .with_monitor_every(usize::MAX);
    let solve = |omega: f64| -> Result<_> {
        let (low, z0) = initial_state(prm, &grid, omega, lambda)?;
        let residual = approximate_residual(prm, &grid, omega, lambda, &low, &z0)?;
        let traj = integrate(&z0, &solver)?;
        Ok((z0, traj, residual))
    };
    let (r0, r1) = rayon::join(|| solve(prm.omegas[0]), || solve(prm.omegas[1]));
    let ((z0a, ta, _), (z0b, tb, residual)) = (r0?, r1?);
    let z0_norm = z0a.pair_norm(prm.s).max(z0b.pair_norm(prm.s));
    let (dist0, _) = pair_dist(&z0a, &z0b, prm.s)?;
    let mut blowup = None;
    for (w, t) in prm.omegas.iter().zip([&ta, &tb]) {
        if let RunVerdict::BlowUp { time, reason } = &t.verdict {
            blowup = Some(format!(
                "lambda = {lambda}, omega = {w}: blow-up at t = {time} ({reason})"
            ));
        }
    }
    let (dist_t, dist_t_u) = if blowup.is_none() {
        pair_dist(ta.last(), tb.last(), prm.s)?
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(LambdaOutcome {
        lambda,
        n: grid.n(),
        z0_norm,
        dist0,
        dist_t,
        dist_t_u,
        residual,
        blowup,
    })
}

/// Sweep over λ: initial distance decay, separation at `t_probe`, the
/// uniform `H^s` ceiling and the decay of the approximate-solution residual.
pub fn run_nonuniform(prm: &NonuniformParams) -> Result<ExperimentReport> {
    prm.validate()?;
    let start = Instant::now();
    let config = serde_json::to_value(prm).map_err(|e| invalid(e.to_string()))?;
    let mut report = ExperimentReport::new(
        "nonuniform",
        &[
            "lambda",
            "n",
            "z0_norm_hs",
            "dist_t0_hs",
            "dist_tprobe_hs",
            "dist_tprobe_u_hs",
            "residual_h_theta",
        ],
        config,
    );
    let outcomes = prm
        .lambdas
        .par_iter()
        .map(|&l| run_lambda(prm, l))
        .collect::<Result<Vec<_>>>()?;
    for o in &outcomes {
        report.rows.push(vec![
            o.lambda,
            o.n as f64,
            o.z0_norm,
            o.dist0,
            o.dist_t,
            o.dist_t_u,
            o.residual,
        ]);
        if let Some(msg) = &o.blowup {
            report.flagged.push(msg.clone());
        }
    }
    if prm.p != prm.q {
        report.flagged.push(format!(
            "p = {} and q = {} differ: the low-frequency plateaus need not cover both high-frequency supports",
            prm.p, prm.q
        ));
    }
    let kept: Vec<&LambdaOutcome> = outcomes.iter().filter(|o| o.blowup.is_none()).collect();
    let lam: Vec<f64> = outcomes.iter().map(|o| o.lambda).collect();
    let d0: Vec<f64> = outcomes.iter().map(|o| o.dist0).collect();

    let predicted = (prm.delta - 2.0) / (2.0 * prm.p.max(prm.q) as f64);
    if d0.iter().all(|&d| d == 0.0) {
        report.verdicts.push(Verdict::not_applicable(
            "initial_distance_slope",
            predicted,
            "all initial distances vanish",
        ));
    } else {
        let decreasing = d0.windows(2).all(|w| w[1] < w[0]);
        report.verdicts.push(Verdict::new(
            "initial_distance_decreasing",
            0.0,
            d0.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max),
            decreasing,
            "largest successive change of the t = 0 distance; must be negative",
        ));
        match fit_loglog("initial_distance_slope", &lam, &d0) {
            Some(fit) => {
                let ok = (fit.slope - predicted).abs() <= 0.2 * predicted.abs();
                report.verdicts.push(Verdict::new(
                    "initial_distance_slope",
                    predicted,
                    fit.slope,
                    ok,
                    format!(
                        "log-log slope {:.4} ± {:.4} against {predicted:.4} with 20% tolerance",
                        fit.slope, fit.slope_stderr
                    ),
                ));
                report.fits.push(fit);
            }
            None => report.verdicts.push(Verdict::not_applicable(
                "initial_distance_slope",
                predicted,
                "slope fit undefined",
            )),
        }
    }

    let bound = prm.lower_bound_slack * prm.phi.l2_norm() / SQRT_2 * prm.t_probe.sin().abs();
    let dw = (prm.omegas[1].powi(prm.p as i32) - prm.omegas[0].powi(prm.p as i32)).abs();
    if dw == 0.0 || bound == 0.0 {
        report.verdicts.push(Verdict::not_applicable(
            "separation_at_t_probe",
            bound,
            "the two phases coincide",
        ));
    } else if kept.len() < 2 {
        report.verdicts.push(Verdict::not_applicable(
            "separation_at_t_probe",
            bound,
            "fewer than two runs reached t_probe",
        ));
    } else {
        let measured = kept[kept.len() - 2..]
            .iter()
            .map(|o| o.dist_t_u)
            .fold(f64::INFINITY, f64::min);
        report.verdicts.push(Verdict::new(
            "separation_at_t_probe",
            bound,
            measured,
            measured >= bound,
            "smallest u-distance at t_probe over the two largest lambdas against slack·‖φ‖/√2·|sin t|",
        ));
    }

    let ceiling = outcomes.iter().map(|o| o.z0_norm).fold(0.0, f64::max);
    report.verdicts.push(Verdict::new(
        "uniform_initial_bound",
        prm.hs_ceiling,
        ceiling,
        ceiling <= prm.hs_ceiling,
        "largest initial H^s norm over the sweep",
    ));

    let res: Vec<f64> = outcomes.iter().map(|o| o.residual).collect();
    let predicted_res = -prm.theta_s();
    if res.iter().all(|&r| r == 0.0) {
        report.verdicts.push(Verdict::not_applicable(
            "residual_decay",
            predicted_res,
            "approximate solution is exact",
        ));
    } else if let Some(fit) = fit_loglog("residual_decay", &lam, &res) {
        report.verdicts.push(Verdict::new(
            "residual_decay",
            predicted_res,
            fit.slope,
            fit.slope <= predicted_res + 0.3,
            format!(
                "H^theta residual slope {:.4} must not exceed -theta_s + 0.3 = {:.4}",
                fit.slope,
                predicted_res + 0.3
            ),
        ));
        report.fits.push(fit);
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}
