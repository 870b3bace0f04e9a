use serde::Serialize;

use super::config::{wrap, Domain, PeakonConfiguration};
use crate::error::{invalid, Result};
use crate::scalar::{ipow, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakonRates<T> {
    pub df: Vec<T>,
    pub dg: Vec<T>,
    pub dh: Vec<T>,
    pub dk: Vec<T>,
}

/// Right-hand side of the peakon system, evaluated exactly from the kernel
/// superposition.
pub fn peakon_rhs<T: Real>(cfg: &PeakonConfiguration<T>) -> PeakonRates<T> {
    let pp = cfg.params;
    let pr = T::from_usize_lossy(pp.p as usize);
    let qr = T::from_usize_lossy(pp.q as usize);
    let mut rates = PeakonRates {
        df: Vec::with_capacity(cfg.m_count()),
        dg: Vec::with_capacity(cfg.m_count()),
        dh: Vec::with_capacity(cfg.n_count()),
        dk: Vec::with_capacity(cfg.n_count()),
    };
    for (&fi, &gi) in cfg.f.iter().zip(&cfg.g) {
        let v = cfg.v_at(gi);
        let vp1 = ipow(v, pp.p - 1);
        rates.dg.push(vp1 * v);
        rates.df.push((pr - pp.a) * vp1 * cfg.vx_at(gi) * fi);
    }
    for (&hj, &kj) in cfg.h.iter().zip(&cfg.k) {
        let u = cfg.u_at(kj);
        let uq1 = ipow(u, pp.q - 1);
        rates.dk.push(uq1 * u);
        rates.dh.push((qr - pp.b) * uq1 * cfg.ux_at(kj) * hj);
    }
    rates
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PeakonOutcome<T> {
    Completed,
    /// Two peaks of one family (`'u'` or `'v'`) came within the guard
    /// distance.
    Collision {
        time: T,
        family: char,
        i: usize,
        j: usize,
        distance: T,
    },
    NonFinite { time: T },
}

#[derive(Clone, Debug)]
pub struct PeakonTrajectory<T> {
    pub configs: Vec<PeakonConfiguration<T>>,
    pub outcome: PeakonOutcome<T>,
}

impl<T: Real> PeakonTrajectory<T> {
    pub fn last(&self) -> &PeakonConfiguration<T> {
        self.configs.last().expect("trajectory holds the initial configuration")
    }
}

pub const COLLISION_DISTANCE: f64 = 1e-8;

fn distance<T: Real>(domain: Domain, x: T, y: T) -> T {
    match domain {
        Domain::Line => (x - y).abs(),
        Domain::Circle => {
            let d = wrap(x - y);
            d.min(T::TAU() - d)
        }
    }
}

fn collision<T: Real>(cfg: &PeakonConfiguration<T>) -> Option<PeakonOutcome<T>> {
    let guard = T::lit(COLLISION_DISTANCE);
    for (family, pos) in [('u', &cfg.g), ('v', &cfg.k)] {
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                let d = distance(cfg.domain, pos[i], pos[j]);
                if d < guard {
                    return Some(PeakonOutcome::Collision {
                        time: cfg.time,
                        family,
                        i,
                        j,
                        distance: d,
                    });
                }
            }
        }
    }
    None
}

fn advanced<T: Real>(cfg: &PeakonConfiguration<T>, h: T, r: &PeakonRates<T>) -> PeakonConfiguration<T> {
    let add = |x: &[T], dx: &[T]| x.iter().zip(dx).map(|(&a, &b)| a + h * b).collect();
    PeakonConfiguration {
        domain: cfg.domain,
        f: add(&cfg.f, &r.df),
        g: add(&cfg.g, &r.dg),
        h: add(&cfg.h, &r.dh),
        k: add(&cfg.k, &r.dk),
        params: cfg.params,
        time: cfg.time + h,
    }
}

fn rk4<T: Real>(cfg: &PeakonConfiguration<T>, h: T) -> PeakonConfiguration<T> {
    let half = h / T::lit(2.0);
    let k1 = peakon_rhs(cfg);
    let k2 = peakon_rhs(&advanced(cfg, half, &k1));
    let k3 = peakon_rhs(&advanced(cfg, half, &k2));
    let k4 = peakon_rhs(&advanced(cfg, h, &k3));
    let two = T::lit(2.0);
    let comb = |a: &[T], b: &[T], c: &[T], d: &[T]| -> Vec<T> {
        (0..a.len())
            .map(|i| (a[i] + two * b[i] + two * c[i] + d[i]) / T::lit(6.0))
            .collect()
    };
    let avg = PeakonRates {
        df: comb(&k1.df, &k2.df, &k3.df, &k4.df),
        dg: comb(&k1.dg, &k2.dg, &k3.dg, &k4.dg),
        dh: comb(&k1.dh, &k2.dh, &k3.dh, &k4.dh),
        dk: comb(&k1.dk, &k2.dk, &k3.dk, &k4.dk),
    };
    let mut out = advanced(cfg, h, &avg);
    out.normalize_positions();
    out
}

/// RK4 march of the peakon system. Stops early when two peaks of one family
/// come closer than 1e-8 or a value turns non-finite; the reason is kept in
/// the outcome.
pub fn integrate_peakons<T: Real>(
    cfg: &PeakonConfiguration<T>,
    t_final: T,
    dt: T,
) -> Result<PeakonTrajectory<T>> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    if !(t_final >= T::zero() && t_final.is_finite()) {
        return Err(invalid(format!("t_final must be non-negative, got {t_final}")));
    }
    let mut traj = PeakonTrajectory {
        configs: vec![cfg.clone()],
        outcome: PeakonOutcome::Completed,
    };
    if let Some(c) = collision(cfg) {
        traj.outcome = c;
        return Ok(traj);
    }
    let t0 = cfg.time;
    let steps = (t_final / dt - T::lit(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
    let mut cur = cfg.clone();
    for step in 1..=steps {
        let target = if step == steps {
            t0 + t_final
        } else {
            t0 + dt * T::from_usize_lossy(step)
        };
        let mut next = rk4(&cur, target - cur.time);
        next.time = target;
        let finite = next.csv_row().iter().all(|x| x.is_finite());
        if !finite {
            traj.outcome = PeakonOutcome::NonFinite { time: target };
            break;
        }
        let hit = collision(&next);
        traj.configs.push(next.clone());
        if let Some(c) = hit {
            traj.outcome = c;
            break;
        }
        cur = next;
    }
    Ok(traj)
}
