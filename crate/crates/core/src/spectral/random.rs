use num_complex::Complex;
use rand::{Rng, RngExt};

use super::{Field, GridSpec};
use crate::scalar::Real;

/// Smooth random field: modes `1 ..= max_mode` with uniformly random
/// coefficients damped by `exp(-j/decay)`, plus a random mean, rescaled so
/// that the sup norm equals `amplitude`.
pub fn random_smooth_field<T: Real, R: Rng + ?Sized>(
    grid: &GridSpec<T>,
    max_mode: usize,
    amplitude: T,
    rng: &mut R,
) -> Field<T> {
    let max_mode = max_mode.min(grid.n() / 2 - 1);
    let decay = (max_mode as f64 / 3.0).max(1.0);
    let mut c = vec![Complex::new(T::zero(), T::zero()); grid.spectrum_len()];
    c[0] = Complex::new(T::lit(rng.random_range(-0.5..0.5)), T::zero());
    for (j, cj) in c.iter_mut().enumerate().take(max_mode + 1).skip(1) {
        let damp = (-(j as f64) / decay).exp();
        *cj = Complex::new(
            T::lit(damp * rng.random_range(-1.0..1.0)),
            T::lit(damp * rng.random_range(-1.0..1.0)),
        );
    }
    let f = Field::from_spectrum(grid, &c);
    let scale = amplitude / f.max_abs().max(T::min_positive_value());
    &f * scale
}
