use num_complex::Complex;

use super::state::FieldState;
use crate::norms::inner;
use crate::scalar::{ipow, Real};
use crate::spectral::{deriv_symbol, Dealiaser, Field, GridSpec};

type Spectrum<T> = Vec<Complex<T>>;

/// Half spectrum of `f` with the Nyquist entry removed; the Nyquist mode
/// carries no dynamics in either formulation.
fn band_limited<T: Real>(f: &Field<T>) -> Spectrum<T> {
    let mut c = f.spectrum();
    if let Some(last) = c.last_mut() {
        *last = Complex::new(T::zero(), T::zero());
    }
    c
}

fn with_symbol<T: Real>(
    grid: &GridSpec<T>,
    c: &[Complex<T>],
    symbol: impl Fn(usize) -> Complex<T>,
) -> Spectrum<T> {
    let _ = grid;
    c.iter().enumerate().map(|(j, &cj)| cj * symbol(j)).collect()
}

fn derivative<T: Real>(grid: &GridSpec<T>, c: &[Complex<T>], order: u32) -> Spectrum<T> {
    with_symbol(grid, c, |j| deriv_symbol(grid, j, order))
}

fn helmholtz_symbol<T: Real>(grid: &GridSpec<T>, j: usize) -> T {
    let k = grid.wavenumber(j);
    T::one() + k * k
}

/// Physical values of `u`, `u_x`, `u_xx` on the padded grid.
struct Lifted<T> {
    f: Vec<T>,
    fx: Vec<T>,
    fxx: Vec<T>,
}

fn lift_all<T: Real>(d: &Dealiaser<T>, c: &[Complex<T>]) -> Lifted<T> {
    let grid = d.grid();
    Lifted {
        f: d.lift(c),
        fx: d.lift(&derivative(grid, c, 1)),
        fxx: d.lift(&derivative(grid, c, 2)),
    }
}

/// `∂_t u = -w^p u_x - G[a w^{p-1} w_x u + (p-a) w^{p-1} w_x u_xx] - p G∂_x(w^{p-1} w_x u_x)`
/// for the component `u` carried by `w`.
fn velocity_half<T: Real>(
    d: &Dealiaser<T>,
    target: &Lifted<T>,
    carrier: &Lifted<T>,
    p: u32,
    a: T,
) -> Spectrum<T> {
    let len = d.padded_len();
    let pr = T::from_usize_lossy(p as usize);
    let mut adv = vec![T::zero(); len];
    let mut src = vec![T::zero(); len];
    let mut flux = vec![T::zero(); len];
    for i in 0..len {
        let w = carrier.f[i];
        let wp1 = ipow(w, p - 1);
        let g = wp1 * carrier.fx[i];
        adv[i] = wp1 * w * target.fx[i];
        src[i] = g * (a * target.f[i] + (pr - a) * target.fxx[i]);
        flux[i] = pr * g * target.fx[i];
    }
    let grid = d.grid();
    let adv = d.project(&adv);
    let src = d.project(&src);
    let flux = d.project(&flux);
    (0..adv.len())
        .map(|j| {
            let nonlocal = (src[j] + deriv_symbol(grid, j, 1) * flux[j]) / helmholtz_symbol(grid, j);
            -adv[j] - nonlocal
        })
        .collect()
}

/// `∂_t m = -w^p m_x - a w^{p-1} w_x m`.
fn momentum_half<T: Real>(
    d: &Dealiaser<T>,
    m: &[T],
    mx: &[T],
    carrier: &Lifted<T>,
    p: u32,
    a: T,
) -> Spectrum<T> {
    let len = d.padded_len();
    let mut adv = vec![T::zero(); len];
    let mut src = vec![T::zero(); len];
    for i in 0..len {
        let w = carrier.f[i];
        let wp1 = ipow(w, p - 1);
        adv[i] = wp1 * w * mx[i];
        src[i] = a * wp1 * carrier.fx[i] * m[i];
    }
    let adv = d.project(&adv);
    let src = d.project(&src);
    adv.iter().zip(&src).map(|(&x, &y)| -x - y).collect()
}

fn degree_for<T: Real>(state: &FieldState<T>, degree: usize) -> usize {
    degree.max(state.params.kappa() as usize + 1)
}

/// Velocity-form tendencies `(∂_t u, ∂_t v)` with products dealiased for
/// degree `max(degree, κ + 1)`.
pub fn rhs_velocity_with<T: Real>(state: &FieldState<T>, degree: usize) -> (Field<T>, Field<T>) {
    let grid = state.grid();
    let d = Dealiaser::new(grid, degree_for(state, degree));
    let (lu, lv) = rayon::join(
        || lift_all(&d, &band_limited(&state.u)),
        || lift_all(&d, &band_limited(&state.v)),
    );
    let pp = state.params;
    let (du, dv) = rayon::join(
        || velocity_half(&d, &lu, &lv, pp.p, pp.a),
        || velocity_half(&d, &lv, &lu, pp.q, pp.b),
    );
    (Field::from_spectrum(grid, &du), Field::from_spectrum(grid, &dv))
}

pub fn rhs_velocity<T: Real>(state: &FieldState<T>) -> (Field<T>, Field<T>) {
    rhs_velocity_with(state, 0)
}

/// Momentum-form tendencies `(∂_t m, ∂_t n)`.
pub fn rhs_momentum_with<T: Real>(state: &FieldState<T>, degree: usize) -> (Field<T>, Field<T>) {
    let grid = state.grid();
    let d = Dealiaser::new(grid, degree_for(state, degree));
    let one = |c: Spectrum<T>| {
        let carrier = Lifted {
            f: d.lift(&c),
            fx: d.lift(&derivative(grid, &c, 1)),
            fxx: Vec::new(),
        };
        let mc = with_symbol(grid, &c, |j| {
            Complex::new(helmholtz_symbol(grid, j), T::zero())
        });
        let m = d.lift(&mc);
        let mx = d.lift(&derivative(grid, &mc, 1));
        (carrier, m, mx)
    };
    let ((lu, m, mx), (lv, n, nx)) = rayon::join(
        || one(band_limited(&state.u)),
        || one(band_limited(&state.v)),
    );
    let pp = state.params;
    let (dm, dn) = rayon::join(
        || momentum_half(&d, &m, &mx, &lv, pp.p, pp.a),
        || momentum_half(&d, &n, &nx, &lu, pp.q, pp.b),
    );
    (Field::from_spectrum(grid, &dm), Field::from_spectrum(grid, &dn))
}

pub fn rhs_momentum<T: Real>(state: &FieldState<T>) -> (Field<T>, Field<T>) {
    rhs_momentum_with(state, 0)
}

/// Both sides of the energy-rate identity
/// `d/dt ∫m² = ((p - 2a)/p) ∫ m² (v^p)_x` and its partner for `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationRates<T> {
    pub dm2_dt: T,
    pub predicted_m: T,
    pub scale_m: T,
    pub dn2_dt: T,
    pub predicted_n: T,
    pub scale_n: T,
}

impl<T: Real> ConservationRates<T> {
    /// Mismatch relative to `∫m² · max|(v^p)_x|` (resp. the `n` analogue).
    pub fn relative_residuals(&self) -> (T, T) {
        let tiny = T::min_positive_value();
        (
            (self.dm2_dt - self.predicted_m).abs() / self.scale_m.max(tiny),
            (self.dn2_dt - self.predicted_n).abs() / self.scale_n.max(tiny),
        )
    }
}

/// `(∫ m² (w^p)_x, ∫m² · max|(w^p)_x|)`, the integral evaluated exactly for
/// band-limited data.
fn weighted_slope_integral<T: Real>(
    d: &Dealiaser<T>,
    m: &Field<T>,
    w: &Field<T>,
    p: u32,
) -> (T, T) {
    let grid = d.grid();
    let mc = band_limited(m);
    let wc = band_limited(w);
    let ml = d.lift(&mc);
    let wl = d.lift(&wc);
    let wxl = d.lift(&derivative(grid, &wc, 1));
    let pr = T::from_usize_lossy(p as usize);
    let mut slope_max = T::zero();
    let prod: Vec<T> = (0..d.padded_len())
        .map(|i| {
            let slope = pr * ipow(wl[i], p - 1) * wxl[i];
            slope_max = slope_max.max(slope.abs());
            ml[i] * slope
        })
        .collect();
    let proj = Field::from_spectrum(grid, &d.project(&prod));
    let m_bl = Field::from_spectrum(grid, &mc);
    (inner(&m_bl, &proj), inner(&m_bl, &m_bl) * slope_max)
}

pub fn conservation_rates<T: Real>(state: &FieldState<T>) -> ConservationRates<T> {
    let pp = state.params;
    let d = Dealiaser::new(state.grid(), pp.kappa() as usize + 1);
    let m = state.m();
    let n = state.n();
    let (dm, dn) = rhs_momentum(state);
    let two = T::lit(2.0);
    let (im, sm) = weighted_slope_integral(&d, &m, &state.v, pp.p);
    let (in_, sn) = weighted_slope_integral(&d, &n, &state.u, pp.q);
    let pr = T::from_usize_lossy(pp.p as usize);
    let qr = T::from_usize_lossy(pp.q as usize);
    ConservationRates {
        dm2_dt: two * inner(&m, &dm),
        predicted_m: (pr - two * pp.a) / pr * im,
        scale_m: sm,
        dn2_dt: two * inner(&n, &dn),
        predicted_n: (qr - two * pp.b) / qr * in_,
        scale_n: sn,
    }
}
