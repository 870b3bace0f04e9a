use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real grid function attached to one [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Real> {
    grid: GridSpec<T>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: &GridSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &GridSpec<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: &GridSpec<T>, c: T) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.n()],
        }
    }

    pub fn from_fn(grid: &GridSpec<T>, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.points().into_iter().map(f).collect(),
        }
    }

    /// Build from a half spectrum of normalised coefficients.
    pub fn from_spectrum(grid: &GridSpec<T>, coeffs: &[Complex<T>]) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.inverse(coeffs),
        }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Normalised half spectrum, `c_j` for `j = 0 ..= n/2`.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        self.grid.forward(&self.values)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        assert!(self.grid == other.grid, "axpy on mismatched grids");
        Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + alpha * b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Trigonometric interpolant evaluated at an arbitrary point.
    pub fn eval_at(&self, x: T) -> T {
        eval_spectrum(&self.grid, &self.spectrum(), x)
    }
}

/// Evaluate `Σ c_j e^{i k_j x}` (real part convention of a half spectrum).
/// The Nyquist coefficient enters as `Re(c) cos(k x)`.
pub fn eval_spectrum<T: Real>(grid: &GridSpec<T>, coeffs: &[Complex<T>], x: T) -> T {
    let half = grid.n() / 2;
    let theta = grid.k0() * x;
    let step = Complex::new(theta.cos(), theta.sin());
    let mut rot = step;
    let mut acc = coeffs[0].re;
    let two = T::lit(2.0);
    for (j, c) in coeffs.iter().enumerate().take(half).skip(1) {
        // Re-anchor the recurrence periodically to keep drift at roundoff.
        if j % 64 == 0 {
            let t = grid.k0() * T::from_usize_lossy(j) * x;
            rot = Complex::new(t.cos(), t.sin());
        }
        acc += two * (c * rot).re;
        rot = rot * step;
    }
    if coeffs.len() > half {
        let t = grid.k_max() * x;
        acc += coeffs[half].re * t.cos();
    }
    acc
}

impl<T: Real> Add for &Field<T> {
    type Output = Field<T>;
    fn add(self, rhs: &Field<T>) -> Field<T> {
        self.axpy(T::one(), rhs)
    }
}

impl<T: Real> Sub for &Field<T> {
    type Output = Field<T>;
    fn sub(self, rhs: &Field<T>) -> Field<T> {
        self.axpy(-T::one(), rhs)
    }
}

impl<T: Real> Mul<T> for &Field<T> {
    type Output = Field<T>;
    fn mul(self, rhs: T) -> Field<T> {
        self.map(|v| v * rhs)
    }
}

impl<T: Real> Neg for &Field<T> {
    type Output = Field<T>;
    fn neg(self) -> Field<T> {
        self.map(|v| -v)
    }
}
