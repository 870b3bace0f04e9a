//! Hölder continuity of the data-to-solution map in a weaker norm.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{fit_loglog, ExperimentReport, Verdict};
use crate::dynamics::{integrate, FieldState, PdeParams, RunVerdict, SolverParams};
use crate::error::{invalid, Error, Result};
use crate::norms::sobolev_norm;
use crate::spectral::{random_smooth_field, Field, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoelderRegion {
    A1,
    A2,
    A3,
    A4,
}

/// Region of `(s, r)` and the exponent `α` it predicts.
pub fn hoelder_region(s: f64, r: f64) -> Result<(HoelderRegion, f64)> {
    let none = Error::NoHoelderRegion { s, r };
    if !(s.is_finite() && r.is_finite()) || r < 0.0 || s <= 2.5 || r >= s {
        return Err(none);
    }
    let a1 = (r <= 0.5 && r + s >= 3.0)
        || (r > 0.5 && r <= 1.5 && r + 2.0 <= s)
        || (r > 1.5 && r + 1.0 <= s);
    if a1 {
        return Ok((HoelderRegion::A1, 1.0));
    }
    if s < 3.0 && r <= 3.0 - s {
        return Ok((HoelderRegion::A2, (2.0 * s - 3.0) / (s - r)));
    }
    if s - 2.0 <= r && r <= 1.5 {
        return Ok((HoelderRegion::A3, (s - r) / 2.0));
    }
    if s - 1.0 <= r {
        return Ok((HoelderRegion::A4, s - r));
    }
    Err(none)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HoelderParams {
    pub s: f64,
    pub r: f64,
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    /// Perturbation sizes measured in `H^r × H^r`.
    pub epsilons: Vec<f64>,
    pub t_final: f64,
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    /// Sup norm of each component of the base datum.
    pub amplitude: f64,
    pub modes: usize,
    pub seed: u64,
    /// Scale of the perturbation direction; zero gives identical runs.
    pub direction_scale: f64,
}

impl Default for HoelderParams {
    fn default() -> Self {
        Self {
            s: 3.0,
            r: 2.0,
            p: 1,
            q: 1,
            a: 2.0,
            b: 2.0,
            epsilons: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4],
            t_final: 0.5,
            n: 128,
            length: 2.0 * std::f64::consts::PI,
            dt: 1e-3,
            amplitude: 0.5,
            modes: 6,
            seed: 7,
            direction_scale: 1.0,
        }
    }
}

impl HoelderParams {
    pub fn pde(&self) -> Result<PdeParams<f64>> {
        PdeParams::new(self.p, self.q, self.a, self.b)
    }

    pub fn validate(&self) -> Result<()> {
        self.pde()?;
        hoelder_region(self.s, self.r)?;
        if self.epsilons.len() < 5 {
            return Err(invalid("need at least five perturbation sizes"));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(invalid("perturbation sizes must be positive"));
        }
        if !(self.t_final > 0.0 && self.dt > 0.0 && self.amplitude >= 0.0) {
            return Err(invalid("t_final and dt must be positive, amplitude non-negative"));
        }
        if self.modes == 0 || 2 * self.modes >= self.n {
            return Err(invalid("modes must be positive and below n/2"));
        }
        if !(self.direction_scale >= 0.0 && self.direction_scale.is_finite()) {
            return Err(invalid("direction_scale must be non-negative"));
        }
        GridSpec::new(self.n, self.length)?;
        Ok(())
    }
}

fn diff_norm(a: &FieldState<f64>, b: &FieldState<f64>, r: f64) -> Result<f64> {
    Ok(sobolev_norm(&a.u.zip_map(&b.u, |x, y| x - y)?, r)
        + sobolev_norm(&a.v.zip_map(&b.v, |x, y| x - y)?, r))
}

/// Perturb a random smooth datum by `ε` in `H^r` along a fixed random
/// direction and fit `log‖z(t) - w(t)‖_{H^r}` against `log‖z₀ - w₀‖_{H^r}`.
pub fn run_hoelder(prm: &HoelderParams) -> Result<ExperimentReport> {
    prm.validate()?;
    let start = Instant::now();
    let (region, alpha) = hoelder_region(prm.s, prm.r)?;
    let pde = prm.pde()?;
    let grid = GridSpec::new(prm.n, prm.length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(prm.seed);
    let z0 = FieldState::new(
        random_smooth_field(&grid, prm.modes, prm.amplitude, &mut rng),
        random_smooth_field(&grid, prm.modes, prm.amplitude, &mut rng),
        pde,
    )?;
    let du = random_smooth_field(&grid, prm.modes, 1.0, &mut rng);
    let dv = random_smooth_field(&grid, prm.modes, 1.0, &mut rng);
    let dnorm = sobolev_norm(&du, prm.r) + sobolev_norm(&dv, prm.r);
    let k = prm.direction_scale / dnorm;
    let (du, dv): (Field<f64>, Field<f64>) = (du.map(|x| k * x), dv.map(|x| k * x));

    let solver = SolverParams::new(pde, prm.t_final)
        .with_dt(prm.dt)
        .with_monitor_every(usize::MAX);
    let base = integrate(&z0, &solver)?;
    if let RunVerdict::BlowUp { time, reason } = &base.verdict {
        return Err(invalid(format!(
            "base solution blows up at t = {time} ({reason})"
        )));
    }
    let config = serde_json::to_value(prm).map_err(|e| invalid(e.to_string()))?;
    let mut report = ExperimentReport::new(
        "hoelder",
        &["epsilon", "dist_t0_hr", "dist_t_hr"],
        config,
    );
    let runs = prm
        .epsilons
        .par_iter()
        .map(|&eps| {
            let w0 = FieldState::new(z0.u.axpy(eps, &du), z0.v.axpy(eps, &dv), pde)?;
            let traj = integrate(&w0, &solver)?;
            let d0 = diff_norm(&z0, &w0, prm.r)?;
            let dt = match traj.verdict {
                RunVerdict::Healthy => Some(diff_norm(base.last(), traj.last(), prm.r)?),
                RunVerdict::BlowUp { .. } => None,
            };
            Ok((eps, d0, dt))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for &(eps, d0, dt) in &runs {
        report.rows.push(vec![eps, d0, dt.unwrap_or(f64::NAN)]);
        match dt {
            Some(d) => {
                x.push(d0);
                y.push(d);
            }
            None => report
                .flagged
                .push(format!("epsilon = {eps}: perturbed run blew up")),
        }
    }
    let label = format!("exponent_{region:?}");
    let fit = if x.iter().chain(&y).all(|&d| d > 0.0) {
        fit_loglog("hoelder_exponent", &x, &y)
    } else {
        None
    };
    match fit {
        Some(fit) if fit.points >= 5 => {
            report.verdicts.push(Verdict::new(
                &label,
                alpha,
                fit.slope,
                fit.slope >= alpha - 0.1,
                format!(
                    "fitted exponent {:.4} ± {:.4}, predicted {alpha:.4}, pass if at least {:.4}",
                    fit.slope,
                    fit.slope_stderr,
                    alpha - 0.1
                ),
            ));
            report.fits.push(fit);
        }
        _ => report.verdicts.push(Verdict::not_applicable(
            &label,
            alpha,
            "distances vanish or too few healthy runs for a fit",
        )),
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}
