use serde::{Deserialize, Serialize};

use crate::dynamics::{FieldState, PdeParams};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::spectral::{Field, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Line,
    /// The circle of length 2π.
    Circle,
}

/// `[y]_π = y - 2π⌊y/2π⌋ ∈ [0, 2π)`.
pub fn wrap<T: Real>(y: T) -> T {
    let two_pi = T::TAU();
    let r = y - two_pi * (y / two_pi).floor();
    // Rounding can land exactly on 2π for tiny negative inputs.
    if r >= two_pi {
        T::zero()
    } else {
        r
    }
}

pub fn kernel<T: Real>(domain: Domain, x: T) -> T {
    match domain {
        Domain::Line => (-x.abs()).exp(),
        Domain::Circle => (wrap(x) - T::PI()).cosh(),
    }
}

/// Separations below this count as a peak sitting on the evaluation point.
/// Two peaks that should move together drift apart by rounding error only,
/// and the kink would otherwise turn that drift into an O(1) slope.
pub const PEAK_MERGE: f64 = 1e-12;

/// Kernel derivative with the value at the peak set to the average of the
/// one-sided limits, i.e. zero.
pub fn kernel_deriv<T: Real>(domain: Domain, x: T) -> T {
    let tol = T::lit(PEAK_MERGE);
    match domain {
        Domain::Line => {
            if x.abs() <= tol {
                T::zero()
            } else {
                -x.sgn0() * (-x.abs()).exp()
            }
        }
        Domain::Circle => {
            let y = wrap(x);
            if y <= tol || T::TAU() - y <= tol {
                T::zero()
            } else {
                (y - T::PI()).sinh()
            }
        }
    }
}

/// Amplitudes `f, h` and positions `g, k` of the two peakon families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakonConfiguration<T> {
    pub domain: Domain,
    pub f: Vec<T>,
    pub g: Vec<T>,
    pub h: Vec<T>,
    pub k: Vec<T>,
    pub params: PdeParams<T>,
    pub time: T,
}

impl<T: Real> PeakonConfiguration<T> {
    pub fn new(
        domain: Domain,
        f: Vec<T>,
        g: Vec<T>,
        h: Vec<T>,
        k: Vec<T>,
        params: PdeParams<T>,
    ) -> Result<Self> {
        params.validate()?;
        if f.is_empty() || h.is_empty() {
            return Err(invalid("each peakon family needs at least one peak"));
        }
        if f.len() != g.len() || h.len() != k.len() {
            return Err(invalid("amplitude and position arrays differ in length"));
        }
        if f.iter().chain(&g).chain(&h).chain(&k).any(|x| !x.is_finite()) {
            return Err(invalid("peakon amplitudes and positions must be finite"));
        }
        let mut cfg = Self {
            domain,
            f,
            g,
            h,
            k,
            params,
            time: T::zero(),
        };
        cfg.normalize_positions();
        Ok(cfg)
    }

    pub(crate) fn normalize_positions(&mut self) {
        if self.domain == Domain::Circle {
            for x in self.g.iter_mut().chain(self.k.iter_mut()) {
                *x = wrap(*x);
            }
        }
    }

    pub fn m_count(&self) -> usize {
        self.f.len()
    }

    pub fn n_count(&self) -> usize {
        self.h.len()
    }

    /// `u(x)`.
    pub fn u_at(&self, x: T) -> T {
        superpose(self.domain, &self.f, &self.g, x, kernel)
    }

    /// `v(x)`.
    pub fn v_at(&self, x: T) -> T {
        superpose(self.domain, &self.h, &self.k, x, kernel)
    }

    /// `<u_x>(x)`.
    pub fn ux_at(&self, x: T) -> T {
        superpose(self.domain, &self.f, &self.g, x, kernel_deriv)
    }

    /// `<v_x>(x)`.
    pub fn vx_at(&self, x: T) -> T {
        superpose(self.domain, &self.h, &self.k, x, kernel_deriv)
    }

    /// Exchange the two families together with `(p, a) ↔ (q, b)`.
    pub fn swapped(&self) -> Self {
        Self {
            domain: self.domain,
            f: self.h.clone(),
            g: self.k.clone(),
            h: self.f.clone(),
            k: self.g.clone(),
            params: self.params.swapped(),
            time: self.time,
        }
    }

    /// CSV header `t, g_1.., f_1.., k_1.., h_1..`.
    pub fn csv_header(&self) -> Vec<String> {
        let mut out = vec!["t".to_string()];
        for (name, count) in [
            ("g", self.m_count()),
            ("f", self.m_count()),
            ("k", self.n_count()),
            ("h", self.n_count()),
        ] {
            out.extend((1..=count).map(|i| format!("{name}_{i}")));
        }
        out
    }

    pub fn csv_row(&self) -> Vec<T> {
        let mut out = vec![self.time];
        out.extend(&self.g);
        out.extend(&self.f);
        out.extend(&self.k);
        out.extend(&self.h);
        out
    }
}

fn superpose<T: Real>(domain: Domain, amp: &[T], pos: &[T], x: T, k: fn(Domain, T) -> T) -> T {
    amp.iter()
        .zip(pos)
        .map(|(&a, &g)| a * k(domain, x - g))
        .fold(T::zero(), |s, t| s + t)
}

/// Single travelling peakon pair of speed `c` at `x0`: amplitudes
/// `(c^{1/q}, c^{1/p})` on the line, divided by `cosh π` on the circle.
pub fn exact_traveling_peakon<T: Real>(
    c: T,
    params: PdeParams<T>,
    domain: Domain,
    x0: T,
) -> Result<PeakonConfiguration<T>> {
    if !(c > T::zero() && c.is_finite()) {
        return Err(invalid(format!("peakon speed must be positive, got {c}")));
    }
    let norm = match domain {
        Domain::Line => T::one(),
        Domain::Circle => T::PI().cosh(),
    };
    let alpha = c.powf(T::one() / T::from_usize_lossy(params.q as usize)) / norm;
    let beta = c.powf(T::one() / T::from_usize_lossy(params.p as usize)) / norm;
    PeakonConfiguration::new(domain, vec![alpha], vec![x0], vec![beta], vec![x0], params)
}

/// Sample `u` and `v` on the grid. The circle needs a grid of length 2π;
/// on the line the peaks must sit inside the box `[0, L)`.
pub fn eval_peakon_fields<T: Real>(
    cfg: &PeakonConfiguration<T>,
    grid: &GridSpec<T>,
) -> Result<FieldState<T>> {
    match cfg.domain {
        Domain::Circle => {
            if (grid.length() - T::TAU()).abs() > T::lit(1e-12) * T::TAU() {
                return Err(Error::DomainMismatch(format!(
                    "circle peakons need a grid of length 2π, got {}",
                    grid.length()
                )));
            }
        }
        Domain::Line => {
            let l = grid.length();
            if let Some(x) = cfg.g.iter().chain(&cfg.k).find(|&&x| x < T::zero() || x >= l) {
                return Err(Error::DomainMismatch(format!(
                    "line peak at {x} lies outside the box [0, {l})"
                )));
            }
        }
    }
    let u = Field::from_fn(grid, |x| cfg.u_at(x));
    let v = Field::from_fn(grid, |x| cfg.v_at(x));
    let mut st = FieldState::new(u, v, cfg.params)?;
    st.time = cfg.time;
    Ok(st)
}
