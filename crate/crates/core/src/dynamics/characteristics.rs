use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::integrate::Trajectory;
use crate::error::{invalid, Result};
use crate::scalar::{ipow, Real};
use crate::spectral::{deriv_symbol, eval_spectrum, GridSpec};

/// Characteristic paths of the two transport fields. `phi` follows `v^p`,
/// `psi` follows `u^q`; all arrays are indexed `[time][seed]`.
#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicBundle<T> {
    pub seeds: Vec<T>,
    pub times: Vec<T>,
    pub phi: Vec<Vec<T>>,
    pub phi_x: Vec<Vec<T>>,
    pub psi: Vec<Vec<T>>,
    pub psi_x: Vec<Vec<T>>,
    /// Non-positive or non-finite Jacobians, one message each.
    pub violations: Vec<String>,
}

impl<T: Real> CharacteristicBundle<T> {
    pub fn jacobians_positive(&self) -> bool {
        self.violations.is_empty()
    }
}

struct SnapshotSpectra<T> {
    v: Vec<Complex<T>>,
    vx: Vec<Complex<T>>,
    u: Vec<Complex<T>>,
    ux: Vec<Complex<T>>,
}

fn with_derivative<T: Real>(grid: &GridSpec<T>, c: Vec<Complex<T>>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let d = c
        .iter()
        .enumerate()
        .map(|(j, &cj)| cj * deriv_symbol(grid, j, 1))
        .collect();
    (c, d)
}

/// `(w^p, (w^p)_x)` at `x`, with `w` interpolated linearly in time between
/// two snapshots.
fn transport<T: Real>(
    grid: &GridSpec<T>,
    w0: (&[Complex<T>], &[Complex<T>]),
    w1: (&[Complex<T>], &[Complex<T>]),
    theta: T,
    p: u32,
    x: T,
) -> (T, T) {
    let lerp = |a: T, b: T| a + theta * (b - a);
    let w = lerp(eval_spectrum(grid, w0.0, x), eval_spectrum(grid, w1.0, x));
    let wx = lerp(eval_spectrum(grid, w0.1, x), eval_spectrum(grid, w1.1, x));
    let wp1 = ipow(w, p - 1);
    (wp1 * w, T::from_usize_lossy(p as usize) * wp1 * wx)
}

/// Integrate `x' = w^p(t, x)` together with `(ln x_x)' = (w^p)_x(t, x)` by
/// one RK4 step per snapshot interval.
fn follow<T: Real>(
    grid: &GridSpec<T>,
    times: &[T],
    spectra: &[(Vec<Complex<T>>, Vec<Complex<T>>)],
    p: u32,
    x0: T,
) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(times.len());
    let (mut x, mut lj) = (x0, T::zero());
    out.push((x, T::one()));
    let half = T::lit(0.5);
    for i in 0..times.len() - 1 {
        let h = times[i + 1] - times[i];
        let a = (spectra[i].0.as_slice(), spectra[i].1.as_slice());
        let b = (spectra[i + 1].0.as_slice(), spectra[i + 1].1.as_slice());
        let f = |theta: T, x: T| transport(grid, a, b, theta, p, x);
        let k1 = f(T::zero(), x);
        let k2 = f(half, x + half * h * k1.0);
        let k3 = f(half, x + half * h * k2.0);
        let k4 = f(T::one(), x + h * k3.0);
        let w = h / T::lit(6.0);
        let two = T::lit(2.0);
        x += w * (k1.0 + two * k2.0 + two * k3.0 + k4.0);
        lj += w * (k1.1 + two * k2.1 + two * k3.1 + k4.1);
        out.push((x, lj.exp()));
    }
    out
}

/// Characteristics `φ_t = v^p(t, φ)`, `ψ_t = u^q(t, ψ)` from the seeds,
/// using trigonometric interpolation in space and linear interpolation
/// between the stored snapshots; Jacobians from
/// `φ_x = exp ∫ (v^p)_x(s, φ) ds`.
pub fn evolve_characteristics<T: Real>(
    traj: &Trajectory<T>,
    seeds: &[T],
) -> Result<CharacteristicBundle<T>> {
    let times = traj.times();
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("snapshot times must be strictly increasing"));
    }
    let grid = traj.initial().grid().clone();
    let pp = traj.initial().params;
    let spectra: Vec<SnapshotSpectra<T>> = traj
        .snapshots
        .par_iter()
        .map(|st| {
            let (v, vx) = with_derivative(&grid, st.v.spectrum());
            let (u, ux) = with_derivative(&grid, st.u.spectrum());
            SnapshotSpectra { v, vx, u, ux }
        })
        .collect();
    let v_spec: Vec<_> = spectra.iter().map(|s| (s.v.clone(), s.vx.clone())).collect();
    let u_spec: Vec<_> = spectra.iter().map(|s| (s.u.clone(), s.ux.clone())).collect();

    let paths: Vec<(Vec<(T, T)>, Vec<(T, T)>)> = seeds
        .par_iter()
        .map(|&x0| {
            (
                follow(&grid, &times, &v_spec, pp.p, x0),
                follow(&grid, &times, &u_spec, pp.q, x0),
            )
        })
        .collect();

    let nt = times.len();
    let mut bundle = CharacteristicBundle {
        seeds: seeds.to_vec(),
        times: times.clone(),
        phi: vec![Vec::with_capacity(seeds.len()); nt],
        phi_x: vec![Vec::with_capacity(seeds.len()); nt],
        psi: vec![Vec::with_capacity(seeds.len()); nt],
        psi_x: vec![Vec::with_capacity(seeds.len()); nt],
        violations: Vec::new(),
    };
    for (si, (ph, ps)) in paths.iter().enumerate() {
        for ti in 0..nt {
            bundle.phi[ti].push(ph[ti].0);
            bundle.phi_x[ti].push(ph[ti].1);
            bundle.psi[ti].push(ps[ti].0);
            bundle.psi_x[ti].push(ps[ti].1);
            for (name, j) in [("phi_x", ph[ti].1), ("psi_x", ps[ti].1)] {
                if !(j > T::zero() && j.is_finite()) {
                    bundle.violations.push(format!(
                        "{name} = {j:e} at t = {}, seed {}",
                        times[ti], seeds[si]
                    ));
                }
            }
        }
    }
    Ok(bundle)
}

/// Sup over seeds of `|m(t, φ) φ_x^{a/p} - m₀|` and
/// `|n(t, ψ) ψ_x^{b/q} - n₀|`, per stored time.
pub fn lagrangian_residual<T: Real>(
    traj: &Trajectory<T>,
    bundle: &CharacteristicBundle<T>,
) -> Vec<(T, T, T)> {
    let pp = traj.initial().params;
    let grid = traj.initial().grid().clone();
    let ea = pp.a / T::from_usize_lossy(pp.p as usize);
    let eb = pp.b / T::from_usize_lossy(pp.q as usize);
    let m0 = traj.initial().m().spectrum();
    let n0 = traj.initial().n().spectrum();
    let m0s: Vec<T> = bundle.seeds.iter().map(|&x| eval_spectrum(&grid, &m0, x)).collect();
    let n0s: Vec<T> = bundle.seeds.iter().map(|&x| eval_spectrum(&grid, &n0, x)).collect();
    traj.snapshots
        .par_iter()
        .enumerate()
        .map(|(ti, st)| {
            let mc = st.m().spectrum();
            let nc = st.n().spectrum();
            let mut rm = T::zero();
            let mut rn = T::zero();
            for si in 0..bundle.seeds.len() {
                let m = eval_spectrum(&grid, &mc, bundle.phi[ti][si]);
                let n = eval_spectrum(&grid, &nc, bundle.psi[ti][si]);
                rm = rm.max((m * bundle.phi_x[ti][si].powf(ea) - m0s[si]).abs());
                rn = rn.max((n * bundle.psi_x[ti][si].powf(eb) - n0s[si]).abs());
            }
            (st.time, rm, rn)
        })
        .collect()
}
