use num_complex::Complex;

use super::field::Field;
use super::grid::GridSpec;
use crate::error::{invalid, Error, Result};
use crate::scalar::{ipow, Real};

/// Apply a Fourier multiplier given per half-spectrum index and wavenumber.
pub fn apply_multiplier<T: Real>(
    f: &Field<T>,
    mult: impl Fn(usize, T) -> Complex<T>,
) -> Field<T> {
    let grid = f.grid();
    let mut c = f.spectrum();
    for (j, cj) in c.iter_mut().enumerate() {
        *cj = *cj * mult(j, grid.wavenumber(j));
    }
    Field::from_spectrum(grid, &c)
}

/// Multiplier `(ik)^order`, Nyquist mode zeroed for odd orders.
pub(crate) fn deriv_symbol<T: Real>(grid: &GridSpec<T>, j: usize, order: u32) -> Complex<T> {
    if order == 0 {
        return Complex::new(T::one(), T::zero());
    }
    if order % 2 == 1 && j == grid.n() / 2 {
        return Complex::new(T::zero(), T::zero());
    }
    let k = grid.wavenumber(j);
    let mag = ipow(k, order);
    match order % 4 {
        0 => Complex::new(mag, T::zero()),
        1 => Complex::new(T::zero(), mag),
        2 => Complex::new(-mag, T::zero()),
        _ => Complex::new(T::zero(), -mag),
    }
}

/// Spectral derivative of the given order.
pub fn deriv<T: Real>(f: &Field<T>, order: u32) -> Field<T> {
    if order == 0 {
        return f.clone();
    }
    let grid = f.grid().clone();
    apply_multiplier(f, |j, _| deriv_symbol(&grid, j, order))
}

/// `(1 - ∂²)`.
pub fn helmholtz<T: Real>(f: &Field<T>) -> Field<T> {
    apply_multiplier(f, |_, k| Complex::new(T::one() + k * k, T::zero()))
}

/// `(1 - ∂²)^{-1}`, convolution with the periodised Green kernel.
pub fn helmholtz_inv<T: Real>(f: &Field<T>) -> Field<T> {
    apply_multiplier(f, |_, k| Complex::new(T::one() / (T::one() + k * k), T::zero()))
}

/// Fourier symbol of the mollifier bump, `ĵ(ξ) = exp(-ξ²)`.
pub fn mollifier_symbol<T: Real>(xi: T) -> T {
    (-xi * xi).exp()
}

/// Friedrichs mollifier `J_ε` as the multiplier `ĵ(εk)`.
pub fn mollify<T: Real>(f: &Field<T>, eps: T) -> Result<Field<T>> {
    if !(eps > T::zero() && eps <= T::one()) {
        return Err(invalid(format!(
            "mollifier parameter must lie in (0, 1], got {}",
            eps
        )));
    }
    Ok(apply_multiplier(f, |_, k| {
        Complex::new(mollifier_symbol(eps * k), T::zero())
    }))
}

/// Padded-grid machinery for alias-free products of a fixed polynomial
/// degree. Factors are lifted to `padded_len` points, multiplied pointwise
/// and projected back onto the modes `|k| < n/2`.
#[derive(Clone, Debug)]
pub struct Dealiaser<T: Real> {
    grid: GridSpec<T>,
    degree: usize,
    padded_len: usize,
}

impl<T: Real> Dealiaser<T> {
    pub fn new(grid: &GridSpec<T>, degree: usize) -> Self {
        let degree = degree.max(1);
        Self {
            grid: grid.clone(),
            degree,
            padded_len: padded_len(grid.n(), degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn padded_len(&self) -> usize {
        self.padded_len
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// Physical values on the padded grid of a half spectrum living on `grid`.
    pub fn lift(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        self.grid.inverse_len(coeffs, self.padded_len)
    }

    /// Project padded physical values back to a half spectrum on `grid`,
    /// keeping `|k| < n/2` and zeroing the Nyquist entry.
    pub fn project(&self, values: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(values.len(), self.padded_len);
        let full = self.grid.forward_len(values);
        let half = self.grid.n() / 2;
        let mut out = vec![Complex::new(T::zero(), T::zero()); half + 1];
        out[..half].copy_from_slice(&full[..half]);
        out
    }
}

/// Padded point count `ceil((degree + 1) / 2) · n`.
pub fn padded_len(n: usize, degree: usize) -> usize {
    (degree.max(1) + 2) / 2 * n
}

/// Alias-free pointwise product of the given fields.
pub fn dealiased_product<T: Real>(fs: &[Field<T>]) -> Result<Field<T>> {
    let first = fs.first().ok_or_else(|| invalid("empty product"))?;
    for f in &fs[1..] {
        if f.grid() != first.grid() {
            return Err(Error::GridMismatch);
        }
    }
    let grid = first.grid();
    let d = Dealiaser::new(grid, fs.len());
    let mut acc = d.lift(&first.spectrum());
    for f in &fs[1..] {
        let lifted = d.lift(&f.spectrum());
        for (a, b) in acc.iter_mut().zip(lifted) {
            *a *= b;
        }
    }
    Ok(Field::from_spectrum(grid, &d.project(&acc)))
}
