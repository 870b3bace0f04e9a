use ccch_core::dynamics::PdeParams;
use ccch_core::experiments::*;
use ccch_core::norms::{sobolev_norm, sup_norm};
use ccch_core::spectral::{Field, GridSpec};
use ccch_core::Error;
use proptest::prelude::*;

fn profile_hr(profile: CutoffProfile, r: f64) -> f64 {
    // wide box, fine grid: spectrally exact for these C² profiles up to r = 3
    let g = GridSpec::new(1 << 14, 32.0).unwrap();
    let f = Field::from_fn(&g, |x| profile.eval(x - 16.0));
    sobolev_norm(&f, r)
}

#[test]
fn region_examples() {
    let (reg, a) = hoelder_region(3.0, 2.0).unwrap();
    assert_eq!((reg, a), (HoelderRegion::A1, 1.0));
    let (reg, a) = hoelder_region(2.75, 0.2).unwrap();
    assert_eq!(reg, HoelderRegion::A2);
    assert!((a - 2.5 / 2.55).abs() < 1e-12);
    let (reg, a) = hoelder_region(3.2, 1.4).unwrap();
    assert_eq!(reg, HoelderRegion::A3);
    assert!((a - 0.9).abs() < 1e-12);
    let (reg, a) = hoelder_region(3.2, 2.5).unwrap();
    assert_eq!(reg, HoelderRegion::A4);
    assert!((a - 0.7).abs() < 1e-12);
    assert_eq!(hoelder_region(4.0, 0.0).unwrap().0, HoelderRegion::A1);
    assert_eq!(hoelder_region(3.5, 1.0).unwrap().0, HoelderRegion::A1);
}

#[test]
fn region_rejects_outside_points() {
    for (s, r) in [(2.0, 1.0), (3.0, -0.5), (3.0, 3.0), (3.0, 3.5)] {
        assert_eq!(
            hoelder_region(s, r),
            Err(Error::NoHoelderRegion { s, r }),
            "({s}, {r})"
        );
    }
}

proptest! {
    #[test]
    fn region_exponent_in_unit_interval(s in 2.5001f64..6.0, frac in 0.0f64..0.999) {
        let r = frac * s;
        if let Ok((_, a)) = hoelder_region(s, r) {
            prop_assert!(a > 0.0 && a <= 1.0 + 1e-12, "alpha {a} at ({s}, {r})");
        }
    }

    #[test]
    fn fit_recovers_exact_lines(m in -5.0f64..5.0, c in -5.0f64..5.0) {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.7 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| m * x + c).collect();
        let f = fit_line("l", &xs, &ys).unwrap();
        prop_assert!((f.slope - m).abs() < 1e-10);
        prop_assert!((f.intercept - c).abs() < 1e-10);
        prop_assert!(f.slope_stderr < 1e-8);
    }
}

#[test]
fn fit_needs_two_distinct_points() {
    assert!(fit_line("l", &[1.0], &[2.0]).is_none());
    assert!(fit_line("l", &[1.0, 1.0], &[2.0, 3.0]).is_none());
    let f = fit_loglog("l", &[1.0, 2.0, 4.0], &[1.0, 0.5, 0.25]).unwrap();
    assert!((f.slope + 1.0).abs() < 1e-12);
}

#[test]
fn bump_profiles_have_exact_plateaus() {
    for x in [-0.999, -0.3, 0.0, 0.5, 0.999] {
        assert_eq!(CutoffProfile::Bump.eval(x), 1.0);
    }
    for x in [-2.0, 2.0, 2.5, -7.0] {
        assert_eq!(CutoffProfile::Bump.eval(x), 0.0);
    }
    for x in [-1.999, 1.5, 0.0] {
        assert_eq!(CutoffProfile::WideBump.eval(x), 1.0);
    }
    assert_eq!(CutoffProfile::WideBump.eval(3.0), 0.0);
    // the wide plateau is longer by 2 and the ramps match
    let b = CutoffProfile::Bump.l2_norm().powi(2);
    let w = CutoffProfile::WideBump.l2_norm().powi(2);
    assert!((w - b - 2.0).abs() < 1e-10);
    let gauss = profile_hr(CutoffProfile::Gaussian, 0.0);
    assert!((gauss - CutoffProfile::Gaussian.l2_norm()).abs() < 1e-12);
}

#[test]
fn high_freq_is_static_for_zero_omega() {
    let g = nonuniform_grid(64.0, 0.5, 1, 1, 3.0).unwrap();
    let bump = CutoffProfile::Bump;
    let a = build_high_freq(&g, 0.0, 64.0, 0.5, 3.0, 1, 1, 0.0, bump, bump).unwrap();
    let b = build_high_freq(&g, 0.0, 64.0, 0.5, 3.0, 1, 1, 7.3, bump, bump).unwrap();
    assert_eq!(a.0.values(), b.0.values());
    assert_eq!(a.1.values(), b.1.values());
}

#[test]
fn high_freq_norms_scale_like_lambda_power() {
    let (delta, s) = (0.5, 3.0);
    let bump = CutoffProfile::Bump;
    for k in 6..=10 {
        let lambda = (1u64 << k) as f64;
        let g = nonuniform_grid(lambda, delta, 1, 1, 2.0).unwrap();
        let (u, _) = build_high_freq(&g, 1.0, lambda, delta, s, 1, 1, 0.3, bump, bump).unwrap();
        for r in [0.0, s] {
            let ratio = sobolev_norm(&u, r) / lambda.powf(r - s);
            assert!((0.3..=3.0).contains(&ratio), "lambda {lambda}, r {r}: {ratio}");
        }
        assert!(sup_norm(&u) <= lambda.powf(-delta / 2.0 - s) * (1.0 + 1e-14));
    }
}

#[test]
fn high_freq_rejects_coarse_grids() {
    let g = GridSpec::new(256, 64.0).unwrap();
    let bump = CutoffProfile::Bump;
    let err = build_high_freq(&g, 1.0, 64.0, 0.5, 3.0, 1, 1, 0.0, bump, bump).unwrap_err();
    assert!(matches!(err, Error::UnderResolved { .. }), "{err:?}");
    let g = GridSpec::new(1024, 8.0).unwrap();
    assert!(build_high_freq(&g, 1.0, 2.0, 0.5, 3.0, 1, 1, 0.0, bump, bump).is_err());
}

#[test]
fn low_freq_data_vanishes_for_zero_omega() {
    let pp = PdeParams::new(1, 1, 2.0, 2.0).unwrap();
    let g = nonuniform_grid(128.0, 0.5, 1, 1, 3.0).unwrap();
    let wide = CutoffProfile::WideBump;
    let st = build_low_freq_data(&g, 0.0, 128.0, 0.5, pp, wide, wide).unwrap();
    assert_eq!(st.u.max_abs() + st.v.max_abs(), 0.0);
}

#[test]
fn low_freq_norm_bound_and_scaling() {
    let pp = PdeParams::new(2, 3, 1.0, 1.0).unwrap();
    let (delta, omega) = (0.5, 1.0);
    let wide = CutoffProfile::WideBump;
    for lambda in [64.0, 256.0] {
        let g = nonuniform_grid(lambda, delta, 2, 3, 3.0).unwrap();
        let st = build_low_freq_data(&g, omega, lambda, delta, pp, wide, wide).unwrap();
        for r in [0.0, 1.0, 3.0] {
            let bound = omega * lambda.powf((delta - 2.0) / 6.0) * profile_hr(wide, r);
            assert!(sobolev_norm(&st.u, r) <= bound * (1.0 + 1e-6), "r {r}");
        }
        // ‖φ̃(x/ρ)‖² = ρ‖φ̃‖² in L²
        let rho = lambda.powf(delta / 3.0);
        let lhs = (sobolev_norm(&st.u, 0.0) / (omega * lambda.powf(-1.0 / 3.0))).powi(2);
        let rhs = rho * wide.l2_norm().powi(2);
        assert!((lhs / rhs - 1.0).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn lemma51_sin_matches_cos_and_zero_profile_vanishes() {
    let lams = [256.0, 1024.0];
    let c = check_lemma51(CutoffProfile::Gaussian, 3.0, 0.5, &lams, Carrier::Cos, 0.0).unwrap();
    let s = check_lemma51(CutoffProfile::Gaussian, 3.0, 0.5, &lams, Carrier::Sin, 0.0).unwrap();
    assert!(c.monotone && s.monotone);
    for (a, b) in c.rows.iter().zip(&s.rows) {
        assert!((a.ratio - b.ratio).abs() < 1e-6, "{} vs {}", a.ratio, b.ratio);
        assert!(a.ratio > 1.0 && a.ratio < 1.1);
    }
    let z = check_lemma51(CutoffProfile::Zero, 3.0, 0.5, &lams, Carrier::Cos, 0.4).unwrap();
    assert_eq!(z.limit, 0.0);
    assert!(z.rows.iter().all(|r| r.scaled_norm == 0.0));
}

#[test]
fn nonuniform_validation() {
    let bad = [
        NonuniformParams { s: 2.5, ..Default::default() },
        NonuniformParams { delta: 1.0, ..Default::default() },
        NonuniformParams { lambdas: vec![64.0, 32.0], ..Default::default() },
        NonuniformParams { lambdas: vec![2.0, 64.0], ..Default::default() },
        NonuniformParams { theta: 1.4, ..Default::default() },
        NonuniformParams { p: 0, ..Default::default() },
    ];
    for b in bad {
        assert!(run_nonuniform(&b).is_err(), "{b:?}");
    }
}

#[test]
fn nonuniform_degenerate_omegas_give_zero_distances() {
    let prm = NonuniformParams {
        lambdas: vec![8.0, 16.0],
        omegas: [0.0, 0.0],
        t_probe: 0.2,
        dt: 0.05,
        ..Default::default()
    };
    let rep = run_nonuniform(&prm).unwrap();
    for col in ["dist_t0_hs", "dist_tprobe_hs", "dist_tprobe_u_hs"] {
        assert!(rep.column(col).unwrap().iter().all(|&d| d == 0.0), "{col}");
    }
    assert_eq!(
        rep.verdict("initial_distance_slope").unwrap().status,
        VerdictStatus::NotApplicable
    );
    assert!(!rep.any_failed());
}

#[test]
fn nonuniform_small_sweep_separates() {
    let prm = NonuniformParams {
        lambdas: vec![16.0, 32.0, 64.0],
        ..Default::default()
    };
    let rep = run_nonuniform(&prm).unwrap();
    assert!(rep.flagged.is_empty(), "{:?}", rep.flagged);
    let d0 = rep.column("dist_t0_hs").unwrap();
    assert!(d0.windows(2).all(|w| w[1] < w[0]), "{d0:?}");
    assert!(rep.verdict("separation_at_t_probe").unwrap().passed());
    assert!(rep.verdict("uniform_initial_bound").unwrap().passed());
    assert!(rep.verdict("residual_decay").unwrap().passed(), "{:?}", rep.verdict("residual_decay"));
    // the report echoes its configuration
    let back: NonuniformParams = serde_json::from_value(rep.config.clone()).unwrap();
    assert_eq!(back, prm);
}

#[test]
fn hoelder_zero_direction_gives_identical_runs() {
    let prm = HoelderParams {
        direction_scale: 0.0,
        t_final: 0.05,
        n: 64,
        ..Default::default()
    };
    let rep = run_hoelder(&prm).unwrap();
    assert!(rep.column("dist_t_hr").unwrap().iter().all(|&d| d == 0.0));
    assert!(rep.column("dist_t0_hr").unwrap().iter().all(|&d| d == 0.0));
    assert_eq!(rep.verdicts[0].status, VerdictStatus::NotApplicable);
}

#[test]
fn hoelder_rejects_bad_configs() {
    let outside = HoelderParams { s: 2.0, r: 1.0, ..Default::default() };
    assert!(matches!(run_hoelder(&outside), Err(Error::NoHoelderRegion { .. })));
    let few = HoelderParams { epsilons: vec![1e-3, 1e-4], ..Default::default() };
    assert!(run_hoelder(&few).is_err());
}

#[test]
fn conservation_suite_short_run() {
    let prm = ConservationParams { t_final: 0.2, ..Default::default() };
    let (rep, traj) = run_conservation(&prm).unwrap();
    assert!(rep.all_passed(), "{:#?}", rep.verdicts);
    assert_eq!(rep.rows.len(), traj.trace.records.len());
    let off = ConservationParams { p: 1, a: 2.0, t_final: 0.1, ..Default::default() };
    let (rep, _) = run_conservation(&off).unwrap();
    assert_eq!(rep.verdict("l2_drift").unwrap().status, VerdictStatus::NotApplicable);
    assert!(rep.verdict("rate_identity").unwrap().passed());
}

#[test]
fn reports_are_deterministic() {
    let prm = HoelderParams { t_final: 0.05, n: 64, ..Default::default() };
    let a = run_hoelder(&prm).unwrap();
    let b = run_hoelder(&prm).unwrap();
    assert_eq!(a.rows, b.rows);
}

#[test]
fn calibration_states_are_seeded() {
    let a = calibration_state(3).unwrap();
    let b = calibration_state(3).unwrap();
    let c = calibration_state(4).unwrap();
    assert_eq!(a.u.values(), b.u.values());
    assert_ne!(a.u.values(), c.u.values());
    assert_eq!(a.params.kappa(), 1);
}
