//! Command dispatch and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ccch_core::dynamics::{integrate, FieldState, MonitorRecord, PdeParams, RunVerdict, SolverParams};
use ccch_core::experiments::{
    run_conservation, run_hoelder, run_nonuniform, ExperimentReport, LinearFit, Verdict, VerdictStatus,
};
use ccch_core::peakon::{
    exact_traveling_peakon, integrate_peakons, weak_residual, wrap, Domain, PeakonConfiguration,
    PeakonOutcome,
};
use ccch_core::spectral::{random_smooth_field, Field, GridSpec};
use ccch_core::Field64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    CheckPeakonConfig, FieldSpec, NormsConfig, PeakonConfig, RunConfig, SimulateConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot write {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] ccch_core::Error),
}

/// Column order of `trace.csv`.
pub const TRACE_COLUMNS: [&str; 16] = [
    "t",
    "norm_u",
    "norm_v",
    "sup_m",
    "sup_n",
    "slope_min_vp",
    "slope_max_vp",
    "slope_min_uq",
    "slope_max_uq",
    "thm13_accum",
    "l2_m",
    "l2_n",
    "lpa_m",
    "lqb_n",
    "rate_residual_m",
    "rate_residual_n",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pass,
    Fail,
    BlowUp,
}

/// Contents of `report.json`.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: Option<u64>,
    pub status: RunStatus,
    pub exit_code: i32,
    pub verdicts: Vec<Verdict>,
    pub fits: Vec<LinearFit>,
    pub flagged: Vec<String>,
    pub details: Value,
    /// The configuration exactly as read.
    pub config: Value,
    /// The configuration with defaults filled in.
    pub resolved: Value,
    pub wall_time_secs: f64,
    pub threads: usize,
}

struct Partial {
    verdicts: Vec<Verdict>,
    fits: Vec<LinearFit>,
    flagged: Vec<String>,
    details: Value,
    blowup: bool,
}

impl Partial {
    fn new(details: Value) -> Self {
        Self {
            verdicts: Vec::new(),
            fits: Vec::new(),
            flagged: Vec::new(),
            details,
            blowup: false,
        }
    }

    fn from_experiment(rep: ExperimentReport, blowup: bool) -> Self {
        Self {
            verdicts: rep.verdicts,
            fits: rep.fits,
            flagged: rep.flagged,
            details: json!({ "experiment": rep.experiment, "experiment_wall_time_secs": rep.wall_time_secs }),
            blowup,
        }
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl ToString) -> RunError {
    RunError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<(), RunError>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r.iter().map(|x| fmt_num(*x)))
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn trace_row(r: &MonitorRecord<f64>) -> Vec<f64> {
    let i = &r.indicators;
    vec![
        r.time,
        r.norm_u,
        r.norm_v,
        i.sup_m,
        i.sup_n,
        i.slope_min_vp,
        i.slope_max_vp,
        i.slope_min_uq,
        i.slope_max_uq,
        i.thm13_accum,
        r.l2_m,
        r.l2_n,
        // a = 0 (b = 0): the conserved quantity is the sup norm
        r.lpa_m.unwrap_or(i.sup_m),
        r.lqb_n.unwrap_or(i.sup_n),
        r.rate_residual_m,
        r.rate_residual_n,
    ]
}

fn write_trace(path: &Path, records: &[MonitorRecord<f64>]) -> Result<(), RunError> {
    let header: Vec<String> = TRACE_COLUMNS.iter().map(|s| s.to_string()).collect();
    write_csv(path, &header, records.iter().map(trace_row))
}

fn write_sweep(path: &Path, rep: &ExperimentReport) -> Result<(), RunError> {
    write_csv(path, &rep.columns, rep.rows.iter().cloned())
}

fn build_fields(spec: &FieldSpec, grid: &GridSpec<f64>, seed: u64) -> (Field64, Field64) {
    match spec {
        FieldSpec::Random { modes, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_smooth_field(grid, *modes, *amplitude, &mut rng);
            let v = random_smooth_field(grid, *modes, *amplitude, &mut rng);
            (u, v)
        }
        FieldSpec::Fourier { u, v } => {
            let k0 = grid.k0();
            let series = |list: &[[f64; 3]]| {
                Field::from_fn(grid, |x| {
                    list.iter()
                        .map(|[j, a, b]| {
                            let th = j * k0 * x;
                            a * th.cos() + b * th.sin()
                        })
                        .sum()
                })
            };
            (series(u), series(v))
        }
        FieldSpec::Peakon { amplitude, x0 } => {
            let c = x0.unwrap_or(grid.length() / 2.0);
            let f = Field::from_fn(grid, |x| amplitude * (-(x - c).abs()).exp());
            (f.clone(), f)
        }
    }
}

fn simulate(c: &SimulateConfig, out: &Path) -> Result<Partial, RunError> {
    let grid = GridSpec::new(c.n, c.length)?;
    let pde = PdeParams::new(c.p, c.q, c.a, c.b)?;
    let (u, v) = build_fields(&c.initial, &grid, c.seed);
    let state = FieldState::new(u, v, pde)?;
    let mut sp = SolverParams::new(pde, c.t_final)
        .with_dt(c.dt)
        .with_monitor_every(c.monitor_every)
        .with_formulation(c.formulation);
    sp.cfl = c.cfl;
    sp.norm_index = c.s;
    sp.blowup_ceiling = c.blowup_ceiling;
    if let Some(d) = c.dealias_degree {
        sp.dealias_degree = d;
    }
    let traj = integrate(&state, &sp)?;
    write_trace(&out.join("trace.csv"), &traj.trace.records)?;
    let mut part = Partial::new(json!({
        "steps": traj.steps,
        "halved_steps": traj.halved_steps,
        "final_time": traj.last().time,
        "run": traj.verdict,
        "drift_l2_m": traj.trace.drift_l2_m(),
        "drift_l2_n": traj.trace.drift_l2_n(),
    }));
    match &traj.verdict {
        RunVerdict::Healthy => {
            let finite = traj
                .trace
                .records
                .iter()
                .all(|r| trace_row(r).iter().all(|x| x.is_finite()));
            part.verdicts.push(Verdict::new(
                "finite_trace",
                1.0,
                if finite { 1.0 } else { 0.0 },
                finite,
                "every monitored quantity is finite",
            ));
        }
        RunVerdict::BlowUp { time, reason } => {
            part.blowup = true;
            part.flagged.push(format!("blow-up at t = {time}: {reason}"));
        }
    }
    let rr = traj.trace.max_rate_residual();
    part.verdicts.push(Verdict::new(
        "rate_identity",
        0.0,
        rr,
        rr <= 1e-8,
        "largest relative residual of the instantaneous ∫m² rate identity",
    ));
    Ok(part)
}

fn peakon_config(c: &PeakonConfig) -> Result<PeakonConfiguration<f64>, RunError> {
    let pde = PdeParams::new(c.p, c.q, c.a, c.b)?;
    Ok(match c.c {
        Some(speed) => exact_traveling_peakon(speed, pde, c.domain, c.x0)?,
        None => PeakonConfiguration::new(
            c.domain,
            c.f.clone().unwrap_or_default(),
            c.g.clone().unwrap_or_default(),
            c.h.clone().unwrap_or_default(),
            c.k.clone().unwrap_or_default(),
            pde,
        )?,
    })
}

fn displacement(domain: Domain, from: f64, to: f64) -> f64 {
    match domain {
        Domain::Line => to - from,
        Domain::Circle => wrap(to - from),
    }
}

fn peakon(c: &PeakonConfig, out: &Path) -> Result<Partial, RunError> {
    let cfg = peakon_config(c)?;
    let traj = integrate_peakons(&cfg, c.t_final, c.dt)?;
    let last = traj.configs.len() - 1;
    let rows = traj
        .configs
        .iter()
        .enumerate()
        .filter(|(i, _)| i % c.record_every == 0 || *i == last)
        .map(|(_, s)| s.csv_row());
    write_csv(&out.join("trace.csv"), &cfg.csv_header(), rows)?;
    let end = traj.last();
    let mut part = Partial::new(json!({
        "outcome": traj.outcome,
        "final": end,
    }));
    if traj.outcome != PeakonOutcome::Completed {
        part.blowup = true;
        part.flagged.push(format!("peakon run stopped early: {:?}", traj.outcome));
    }
    if let Some(speed) = c.c {
        let moved = displacement(c.domain, cfg.g[0], end.g[0]);
        let miss = displacement(c.domain, speed * end.time, moved).abs();
        part.verdicts.push(Verdict::new(
            "travel_distance",
            speed * end.time,
            moved,
            miss <= 1e-8,
            "distance covered by the peak against c·t",
        ));
        let drift = traj
            .configs
            .iter()
            .map(|s| (s.f[0] - cfg.f[0]).abs().max((s.h[0] - cfg.h[0]).abs()))
            .fold(0.0, f64::max);
        part.verdicts.push(Verdict::new(
            "amplitudes_constant",
            0.0,
            drift,
            drift <= 1e-10,
            "largest change of the peak amplitudes",
        ));
    }
    Ok(part)
}

fn norms(c: &NormsConfig, out: &Path) -> Result<Partial, RunError> {
    let grid = GridSpec::new(c.n, c.length)?;
    let (u, v) = build_fields(&c.field, &grid, c.seed);
    let mut table = Vec::new();
    let mut rows = Vec::new();
    for (i, req) in c.norms.iter().enumerate() {
        let (nu, nv) = (req.evaluate(&u)?, req.evaluate(&v)?);
        table.push(json!({ "index": i, "norm": req.label(), "u": nu, "v": nv }));
        rows.push(vec![i as f64, nu, nv]);
    }
    let header = ["index", "u", "v"].map(String::from);
    write_csv(&out.join("norms.csv"), &header, rows)?;
    Ok(Partial::new(json!({ "norms": table })))
}

fn check_peakon(c: &CheckPeakonConfig, out: &Path) -> Result<Partial, RunError> {
    let pde = PdeParams::new(c.p, c.q, c.a, c.b)?;
    let mut cfg = exact_traveling_peakon(c.c, pde, c.domain, c.x0)?;
    cfg.f[0] *= c.amplitude_scale;
    cfg.h[0] *= c.amplitude_scale;
    let weak = weak_residual(&cfg, c.c)?;
    let traj = integrate_peakons(&cfg, c.t_final, c.dt)?;
    write_csv(
        &out.join("trace.csv"),
        &cfg.csv_header(),
        traj.configs.iter().map(|s| s.csv_row()),
    )?;
    let mut part = Partial::new(json!({
        "alpha": weak.alpha,
        "beta": weak.beta,
        "identity_error_u": weak.identity_error_u,
        "identity_error_v": weak.identity_error_v,
        "residual_u": weak.residual_u,
        "residual_v": weak.residual_v,
        "samples": weak.samples.len(),
        "ode_outcome": traj.outcome,
    }));
    part.verdicts.push(Verdict::new(
        "convolution_identities",
        0.0,
        weak.identity_error_u.max(weak.identity_error_v),
        weak.identities_hold,
        format!("quadrature of the nonlocal terms against closed forms, tolerance {:e}", weak.tolerance),
    ));
    part.verdicts.push(Verdict::new(
        "weak_residual",
        0.0,
        weak.residual_u.max(weak.residual_v),
        weak.residual_vanishes,
        format!("sup of the weak-form residual away from the peak, tolerance {:e}", weak.tolerance),
    ));
    if traj.outcome == PeakonOutcome::Completed {
        let end = traj.last();
        let moved = displacement(c.domain, cfg.g[0], end.g[0]);
        let miss = displacement(c.domain, c.c * end.time, moved).abs();
        part.verdicts.push(Verdict::new(
            "travel_distance",
            c.c * end.time,
            moved,
            miss <= 1e-8,
            "peak displacement under the ODE against c·t",
        ));
    } else {
        part.blowup = true;
        part.flagged.push(format!("peakon ODE stopped early: {:?}", traj.outcome));
    }
    Ok(part)
}

fn nan_rows(rep: &ExperimentReport, col: &str) -> bool {
    rep.column(col)
        .is_some_and(|c| c.iter().any(|x| x.is_nan()))
}

fn execute(cfg: &RunConfig, out: &Path) -> Result<Partial, RunError> {
    match cfg {
        RunConfig::Simulate(c) => simulate(c, out),
        RunConfig::Peakon(c) => peakon(c, out),
        RunConfig::Norms(c) => norms(c, out),
        RunConfig::CheckPeakon(c) => check_peakon(c, out),
        RunConfig::ExpNonuniform(c) => {
            let rep = run_nonuniform(c)?;
            write_sweep(&out.join("sweep.csv"), &rep)?;
            let blow = nan_rows(&rep, "dist_tprobe_hs");
            Ok(Partial::from_experiment(rep, blow))
        }
        RunConfig::ExpHoelder(c) => {
            let rep = run_hoelder(c)?;
            write_sweep(&out.join("sweep.csv"), &rep)?;
            let blow = nan_rows(&rep, "dist_t_hr");
            Ok(Partial::from_experiment(rep, blow))
        }
        RunConfig::ExpConservation(c) => {
            let (rep, traj) = run_conservation(c)?;
            write_trace(&out.join("trace.csv"), &traj.trace.records)?;
            let blow = matches!(traj.verdict, RunVerdict::BlowUp { .. });
            Ok(Partial::from_experiment(rep, blow))
        }
    }
}

/// Exit code for a set of verdicts: any failure wins, then blow-up.
pub fn exit_code(verdicts: &[Verdict], blowup: bool) -> i32 {
    if verdicts.iter().any(|v| v.status == VerdictStatus::Fail) {
        EXIT_FAIL
    } else if blowup {
        EXIT_BLOWUP
    } else {
        EXIT_OK
    }
}

/// Run `cfg`, writing its artifacts and `report.json` into `out`.
pub fn dispatch(cfg: &RunConfig, verbatim: Value, out: &Path) -> Result<RunReport, RunError> {
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let start = Instant::now();
    let part = execute(cfg, out)?;
    let code = exit_code(&part.verdicts, part.blowup);
    let report = RunReport {
        command: cfg.command().name().to_string(),
        seed: cfg.seed(),
        status: match code {
            EXIT_OK => RunStatus::Pass,
            EXIT_BLOWUP => RunStatus::BlowUp,
            _ => RunStatus::Fail,
        },
        exit_code: code,
        verdicts: part.verdicts,
        fits: part.fits,
        flagged: part.flagged,
        details: part.details,
        config: verbatim,
        resolved: cfg.echo(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
    };
    let path = out.join("report.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| io_err(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    Ok(report)
}
