use std::f64::consts::PI;

use ccch_core::dynamics::*;
use ccch_core::norms::{inner, sobolev_norm};
use ccch_core::spectral::{helmholtz, random_smooth_field, Field, GridSpec};
use ccch_core::{Field64, Grid64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid(n: usize) -> Grid64 {
    GridSpec::new(n, 2.0 * PI).unwrap()
}

fn params(p: u32, q: u32, a: f64, b: f64) -> PdeParams<f64> {
    PdeParams::new(p, q, a, b).unwrap()
}

fn random_state(g: &Grid64, pp: PdeParams<f64>, seed: u64, amp: f64) -> FieldState<f64> {
    random_state_modes(g, pp, seed, amp, 8)
}

fn random_state_modes(
    g: &Grid64,
    pp: PdeParams<f64>,
    seed: u64,
    amp: f64,
    modes: usize,
) -> FieldState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_smooth_field(g, modes, amp, &mut rng);
    let v = random_smooth_field(g, modes, amp, &mut rng);
    FieldState::new(u, v, pp).unwrap()
}

fn max_diff(a: &Field64, b: &Field64) -> f64 {
    (a - b).max_abs()
}

#[test]
fn zero_state_has_zero_tendencies() {
    let g = grid(64);
    let st = FieldState::zeros(&g, params(2, 3, 1.5, -0.5)).unwrap();
    let (du, dv) = rhs_velocity(&st);
    let (dm, dn) = rhs_momentum(&st);
    for f in [du, dv, dm, dn] {
        assert_eq!(f.max_abs(), 0.0);
    }
}

#[test]
fn symmetric_state_gives_equal_momentum_tendencies() {
    let g = grid(64);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_smooth_field(&g, 6, 1.0, &mut rng);
    let st = FieldState::new(u.clone(), u, params(2, 2, 1.3, 1.3)).unwrap();
    let (dm, dn) = rhs_momentum(&st);
    assert!(max_diff(&dm, &dn) == 0.0);
}

#[test]
fn velocity_and_momentum_forms_agree() {
    let g = grid(64);
    let st = random_state(&g, params(1, 2, 2.0, 3.0), 11, 1.0);
    let (du, dv) = rhs_velocity(&st);
    let (dm, dn) = rhs_momentum(&st);
    assert!(max_diff(&helmholtz(&du), &dm) < 1e-10, "{}", max_diff(&helmholtz(&du), &dm));
    assert!(max_diff(&helmholtz(&dv), &dn) < 1e-10);
}

#[test]
fn u_equation_vanishes_for_zero_u() {
    let g = grid(64);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = random_smooth_field(&g, 8, 1.0, &mut rng);
    let st = FieldState::new(Field::zeros(&g), v, params(3, 1, 0.7, 2.0)).unwrap();
    let (du, _) = rhs_velocity(&st);
    assert_eq!(du.max_abs(), 0.0);
}

#[test]
fn rate_identity_on_random_states() {
    let g = grid(64);
    for (i, (p, q, a, b)) in [(1, 1, 2.0, 2.0), (2, 3, 0.5, 1.0), (3, 2, -1.0, 4.0), (1, 3, 3.0, 0.0)]
        .into_iter()
        .enumerate()
    {
        let st = random_state(&g, params(p, q, a, b), 40 + i as u64, 1.0);
        let r = conservation_rates(&st);
        let (rm, rn) = r.relative_residuals();
        assert!(rm < 1e-8 && rn < 1e-8, "{rm} {rn}");
    }
}

fn two_mode_state(g: &Grid64, pp: PdeParams<f64>) -> FieldState<f64> {
    let u = Field::from_fn(g, |x| 0.5 * x.sin() + 0.2 * (2.0 * x).cos());
    let v = Field::from_fn(g, |x| 0.4 * x.cos() - 0.1 * (3.0 * x).sin());
    FieldState::new(u, v, pp).unwrap()
}

fn run_to(st: &FieldState<f64>, sp: &SolverParams<f64>, dt: f64, t: f64) -> FieldState<f64> {
    let steps = (t / dt).round() as usize;
    let mut s = st.clone();
    for _ in 0..steps {
        s = step_rk4(&s, dt, sp).unwrap();
    }
    s
}

#[test]
fn rk4_is_fourth_order() {
    let g = grid(32);
    let pp = params(1, 2, 2.0, 1.0);
    let st = two_mode_state(&g, pp);
    let sp = SolverParams::new(pp, 1.0);
    let (dt, t) = (0.1, 0.8);
    let a = run_to(&st, &sp, dt, t);
    let b = run_to(&st, &sp, dt / 2.0, t);
    let c = run_to(&st, &sp, dt / 4.0, t);
    let e1 = max_diff(&a.u, &b.u).max(max_diff(&a.v, &b.v));
    let e2 = max_diff(&b.u, &c.u).max(max_diff(&b.v, &c.v));
    let order = (e1 / e2).log2();
    assert!((order - 4.0).abs() <= 0.2, "observed order {order}");
}

#[test]
fn zero_state_stays_zero_under_rk4() {
    let g = grid(32);
    let pp = params(1, 1, 2.0, 2.0);
    let st = FieldState::zeros(&g, pp).unwrap();
    let out = step_rk4(&st, 0.01, &SolverParams::new(pp, 1.0)).unwrap();
    assert_eq!(out.u.max_abs() + out.v.max_abs(), 0.0);
    assert!((out.time - 0.01).abs() < 1e-15);
}

#[test]
fn tiny_data_is_frozen() {
    let g = grid(64);
    let pp = params(1, 1, 2.0, 2.0);
    let st = random_state(&g, pp, 8, 1e-8);
    let sp = SolverParams::new(pp, 0.1).with_dt(1e-2).with_monitor_every(100);
    let traj = integrate(&st, &sp).unwrap();
    let end = traj.last();
    assert!((end.time - 0.1).abs() < 1e-12);
    assert!(max_diff(&end.u, &st.u) <= 1e-10);
    assert!(max_diff(&end.v, &st.v) <= 1e-10);
}

#[test]
fn zero_data_gives_healthy_zero_trajectory() {
    let g = grid(32);
    let pp = params(2, 2, 1.0, 1.0);
    let st = FieldState::zeros(&g, pp).unwrap();
    let sp = SolverParams::new(pp, 0.05).with_dt(0.01);
    let traj = integrate(&st, &sp).unwrap();
    assert!(traj.verdict.is_healthy());
    assert_eq!(traj.snapshots.len(), 6);
    assert!(traj.snapshots.iter().all(|s| s.u.max_abs() == 0.0 && s.v.max_abs() == 0.0));
    assert!(traj.trace.records.iter().all(|r| r.indicators.thm13_accum == 0.0));
}

#[test]
fn energy_conserved_when_p_is_twice_a() {
    let g = grid(256);
    let pp = params(2, 2, 1.0, 1.0);
    let st = random_state(&g, pp, 21, 1.0);
    let sp = SolverParams::new(pp, 1.0).with_dt(1e-3).with_monitor_every(50);
    let traj = integrate(&st, &sp).unwrap();
    assert!(traj.verdict.is_healthy());
    assert!(traj.trace.drift_l2_m() <= 1e-8, "{}", traj.trace.drift_l2_m());
    assert!(traj.trace.drift_l2_n() <= 1e-8);
    assert!(traj.trace.max_rate_residual() <= 1e-8);
}

#[test]
fn lebesgue_integral_of_momentum_is_conserved() {
    let g = grid(128);
    // p/a = 1/2 and q/b = 3: positive momenta keep |m|^{p/a} smooth.
    let pp = params(1, 3, 2.0, 1.0);
    let m = Field::from_fn(&g, |x| 1.0 + 0.3 * x.cos() + 0.1 * (2.0 * x).sin());
    let n = Field::from_fn(&g, |x| 0.3 * (x - 1.0).sin() + 0.2);
    let st = FieldState::from_momenta(&m, &n, pp).unwrap();
    let sp = SolverParams::new(pp, 0.5).with_dt(1e-3).with_monitor_every(25);
    let traj = integrate(&st, &sp).unwrap();
    assert!(traj.verdict.is_healthy());
    let dm = traj.trace.drift_lpa_m().unwrap();
    let dn = traj.trace.drift_lqb_n().unwrap();
    assert!(dm <= 1e-6, "{dm}");
    assert!(dn <= 1e-6, "{dn}");
}

#[test]
fn symmetric_data_stays_symmetric() {
    let g = grid(64);
    let pp = params(2, 2, 1.5, 1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = random_smooth_field(&g, 6, 0.8, &mut rng);
    let st = FieldState::new(u.clone(), u, pp).unwrap();
    let sp = SolverParams::new(pp, 0.3).with_dt(1e-2);
    let traj = integrate(&st, &sp).unwrap();
    for s in &traj.snapshots {
        let d = &s.u - &s.v;
        assert!(inner(&d, &d).sqrt() <= 1e-12);
    }
}

#[test]
fn momentum_formulation_tracks_velocity_formulation() {
    let g = grid(64);
    let pp = params(1, 2, 2.0, 1.0);
    let st = random_state(&g, pp, 2, 0.5);
    let sp = SolverParams::new(pp, 0.2).with_dt(1e-2);
    let a = integrate(&st, &sp).unwrap();
    let b = integrate(&st, &sp.clone().with_formulation(Formulation::Momentum)).unwrap();
    assert!(max_diff(&a.last().u, &b.last().u) < 1e-10);
}

#[test]
fn thm13_accumulator_is_non_decreasing() {
    let g = grid(64);
    let pp = params(1, 1, 3.0, 3.0);
    let st = random_state(&g, pp, 13, 1.0);
    let sp = SolverParams::new(pp, 0.3).with_dt(1e-2).with_monitor_every(3);
    let traj = integrate(&st, &sp).unwrap();
    let acc: Vec<f64> = traj.trace.records.iter().map(|r| r.indicators.thm13_accum).collect();
    assert!(acc.windows(2).all(|w| w[1] >= w[0]));
    assert!(*acc.last().unwrap() > 0.0);
    assert!(traj.trace.records.iter().all(|r| r.indicators.is_finite()));
}

#[test]
fn ceiling_breach_is_reported_as_blowup() {
    let g = grid(32);
    let pp = params(1, 1, 2.0, 2.0);
    let st = random_state(&g, pp, 1, 1.0);
    let mut sp = SolverParams::new(pp, 0.1).with_dt(1e-2);
    sp.blowup_ceiling = 1e-3;
    let traj = integrate(&st, &sp).unwrap();
    assert!(matches!(traj.verdict, RunVerdict::BlowUp { .. }));
    assert_eq!(traj.steps, 1);
}

#[test]
fn large_steps_trigger_halving() {
    let g = grid(128);
    let pp = params(1, 1, 2.0, 2.0);
    let st = random_state(&g, pp, 4, 1.0);
    let sp = SolverParams::new(pp, 0.2).with_dt(0.1);
    let traj = integrate(&st, &sp).unwrap();
    assert!(traj.halved_steps > 0);
    assert!(traj.verdict.is_healthy());
}

#[test]
fn solver_parameter_validation() {
    let pp = params(2, 3, 1.0, 1.0);
    let mut sp = SolverParams::new(pp, 1.0);
    assert!(sp.validate().is_ok());
    sp.dealias_degree = 3;
    assert!(sp.validate().is_err());
    let mut sp = SolverParams::new(pp, 1.0);
    sp.cfl = 1.5;
    assert!(sp.validate().is_err());
    assert!(PdeParams::new(0, 1, 1.0, 1.0).is_err());
    let g = grid(32);
    let st = FieldState::zeros(&g, params(1, 1, 1.0, 1.0)).unwrap();
    assert!(integrate(&st, &SolverParams::new(pp, 1.0)).is_err());
}

#[test]
fn lifespan_formula() {
    assert!((lifespan_from_norm(1, 1.0f64, 1.0) - 0.25).abs() < 1e-15);
    assert!((lifespan_from_norm(2, 1.0f64, 1.0) - 3.0 / 16.0).abs() < 1e-15);
    for k in 1..5 {
        let a = lifespan_from_norm(k, 0.7, 1.3);
        let b = lifespan_from_norm(k, 0.7, 2.6);
        assert!((a / b - 2f64.powi(k as i32)).abs() < 1e-12);
    }
    let g = grid(32);
    let st = FieldState::zeros(&g, params(1, 1, 1.0, 1.0)).unwrap();
    assert!(lifespan_estimate(&st, 3.0, 1.0).unwrap().is_infinite());
    assert!(lifespan_estimate(&st, 3.0, 0.0).is_err());
}

#[test]
fn calibration_brackets_the_first_violation() {
    // Ratio exceeds 2 from t = 0.5 on; κ = 1, ‖z₀‖ = 1 so T₀ = 1/(4C).
    let samples: Vec<(f64, f64)> = (0..=10).map(|i| (0.1 * i as f64, if i >= 5 { 2.5 } else { 1.5 })).collect();
    let hs = vec![SizeHistory { z0: 1.0, kappa: 1, samples }];
    let c = calibrate_c_s(&hs, 1.0).unwrap();
    let t0 = lifespan_from_norm(1, c, 1.0);
    assert!(t0 < 0.5 && t0 > 0.399, "{t0}");
}

#[test]
fn characteristics_of_constant_velocity() {
    let g = grid(32);
    let pp = params(1, 1, 1.0, 1.0);
    let st = FieldState::new(Field::constant(&g, 0.3), Field::constant(&g, 0.7), pp).unwrap();
    let sp = SolverParams::new(pp, 0.5).with_dt(0.05);
    let traj = integrate(&st, &sp).unwrap();
    let b = evolve_characteristics(&traj, &[0.0, 1.0, 2.5]).unwrap();
    for (ti, t) in b.times.iter().enumerate() {
        for (si, x0) in b.seeds.iter().enumerate() {
            assert!((b.phi[ti][si] - (x0 + 0.7 * t)).abs() < 1e-12);
            assert!((b.psi[ti][si] - (x0 + 0.3 * t)).abs() < 1e-12);
            assert!((b.phi_x[ti][si] - 1.0).abs() < 1e-12);
        }
    }
    assert!(b.jacobians_positive());
}

#[test]
fn characteristics_of_zero_velocity() {
    let g = grid(32);
    let pp = params(2, 2, 1.0, 1.0);
    let st = FieldState::zeros(&g, pp).unwrap();
    let traj = integrate(&st, &SolverParams::new(pp, 0.1).with_dt(0.02)).unwrap();
    let b = evolve_characteristics(&traj, &[0.5, 3.0]).unwrap();
    for ti in 0..b.times.len() {
        assert_eq!(b.phi[ti], vec![0.5, 3.0]);
        assert_eq!(b.phi_x[ti], vec![1.0, 1.0]);
    }
}

#[test]
fn lagrangian_identity_along_characteristics() {
    let g = grid(256);
    let pp = params(2, 2, 1.0, 1.0);
    let st = random_state_modes(&g, pp, 17, 1.0, 4);
    let sp = SolverParams::new(pp, 0.5).with_dt(1e-3);
    let traj = integrate(&st, &sp).unwrap();
    let seeds: Vec<f64> = g.points();
    let b = evolve_characteristics(&traj, &seeds).unwrap();
    assert!(b.jacobians_positive());
    let worst = lagrangian_residual(&traj, &b)
        .into_iter()
        .map(|(_, rm, rn)| rm.max(rn))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-4, "{worst}");
}

fn bump(x: f64, c: f64, w: f64) -> f64 {
    let y = (x - c) / w;
    if y.abs() < 1.0 {
        (-1.0 / (1.0 - y * y)).exp() * std::f64::consts::E
    } else {
        0.0
    }
}

#[test]
fn compact_support_is_carried_by_characteristics() {
    let g = grid(1024);
    let pp = params(1, 1, 2.0, 2.0);
    let m = Field::from_fn(&g, |x| bump(x, PI, 1.6));
    let n = Field::from_fn(&g, |x| 0.5 * bump(x, PI + 0.2, 1.4));
    let st = FieldState::from_momenta(&m, &n, pp).unwrap();
    let sp = SolverParams::new(pp, 0.2).with_dt(1e-3).with_monitor_every(20);
    let traj = integrate(&st, &sp).unwrap();
    let rep = support_diagnostic(&traj, 1e-10).unwrap();
    assert_eq!(rep.verdict(), SupportVerdict::Pass, "{:?} {:?}", rep.m_support, rep.m_envelope);
}

#[test]
fn zero_momentum_has_empty_support() {
    let g = grid(64);
    let pp = params(1, 1, 2.0, 2.0);
    let st = FieldState::zeros(&g, pp).unwrap();
    let traj = integrate(&st, &SolverParams::new(pp, 0.05).with_dt(0.01)).unwrap();
    let rep = support_diagnostic(&traj, 1e-10).unwrap();
    assert!(rep.m_support.iter().all(Option::is_none));
    assert!(rep.n_support.iter().all(Option::is_none));
    assert_eq!(rep.verdict(), SupportVerdict::Pass);
}

#[test]
fn gaussian_momentum_is_not_applicable() {
    let g = grid(128);
    let pp = params(1, 1, 2.0, 2.0);
    let m = Field::from_fn(&g, |x| (-(x - PI).powi(2)).exp());
    let st = FieldState::from_momenta(&m, &m, pp).unwrap();
    let traj = integrate(&st, &SolverParams::new(pp, 0.05).with_dt(0.01)).unwrap();
    let rep = support_diagnostic(&traj, 1e-10).unwrap();
    assert_eq!(rep.verdict(), SupportVerdict::NotApplicable);
    assert!(support_diagnostic(&traj, 0.0).is_err());
}

#[test]
fn f32_state_runs() {
    let g = GridSpec::<f32>::new(32, 2.0 * std::f32::consts::PI).unwrap();
    let pp = PdeParams::new(1, 1, 2.0f32, 2.0).unwrap();
    let u = Field::from_fn(&g, |x| 0.3 * x.sin());
    let st = FieldState::new(u.clone(), u, pp).unwrap();
    let traj = integrate(&st, &SolverParams::new(pp, 0.1f32).with_dt(0.01)).unwrap();
    assert!(traj.verdict.is_healthy());
    assert!(sobolev_norm(&traj.last().u, 1.0f32).is_finite());
}
