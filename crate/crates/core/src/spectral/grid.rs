use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};
use crate::scalar::Real;

type Plans<T> = (Arc<dyn RealToComplex<T>>, Arc<dyn ComplexToReal<T>>);

/// Shared FFT plan cache. One per grid family; padded sizes live here too.
struct PlanCache<T: Real> {
    planner: Mutex<RealFftPlanner<T>>,
    plans: Mutex<HashMap<usize, Plans<T>>>,
}

impl<T: Real> PlanCache<T> {
    fn new() -> Self {
        Self {
            planner: Mutex::new(RealFftPlanner::new()),
            plans: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, len: usize) -> Plans<T> {
        if let Some(p) = self.plans.lock().unwrap().get(&len) {
            return p.clone();
        }
        let p = {
            let mut planner = self.planner.lock().unwrap();
            (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
        };
        self.plans.lock().unwrap().entry(len).or_insert(p).clone()
    }
}

/// Uniform periodic collocation grid on `[0, length)`.
#[derive(Clone)]
pub struct GridSpec<T: Real> {
    n: usize,
    length: T,
    cache: Arc<PlanCache<T>>,
}

impl<T: Real> fmt::Debug for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl<T: Real> PartialEq for GridSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl<T: Real> GridSpec<T> {
    pub fn new(n: usize, length: T) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadPointCount(n));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::BadLength(length.to_f64_lossy()));
        }
        Ok(Self {
            n,
            length,
            cache: Arc::new(PlanCache::new()),
        })
    }

    /// `n` points on `[0, 2π)`.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, T::TAU())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn dx(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    pub fn point(&self, j: usize) -> T {
        T::from_usize_lossy(j) * self.dx()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Fundamental wavenumber `2π / L`.
    pub fn k0(&self) -> T {
        T::TAU() / self.length
    }

    /// Wavenumber of half-spectrum index `j` (`0 ..= n/2`).
    #[inline]
    pub fn wavenumber(&self, j: usize) -> T {
        T::from_usize_lossy(j) * self.k0()
    }

    /// Largest resolved wavenumber (the Nyquist mode).
    pub fn k_max(&self) -> T {
        self.wavenumber(self.n / 2)
    }

    /// Full wavenumber set in FFT order: `0, 1, …, n/2-1, n/2, -(n/2-1), …, -1`
    /// times `2π/L`. The Nyquist entry is reported as positive.
    pub fn wavenumbers(&self) -> Vec<T> {
        let n = self.n as isize;
        (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j } else { j - n };
                T::from_isize(m).unwrap() * self.k0()
            })
            .collect()
    }

    /// Number of half-spectrum coefficients, `n/2 + 1`.
    pub fn spectrum_len(&self) -> usize {
        self.n / 2 + 1
    }

    pub(crate) fn plans(&self, len: usize) -> Plans<T> {
        self.cache.get(len)
    }

    /// Forward transform of `len` real samples into normalised coefficients
    /// `c_j` such that `f(x) = Σ c_j e^{i k_j x}` (half spectrum).
    pub(crate) fn forward_len(&self, values: &[T]) -> Vec<Complex<T>> {
        let len = values.len();
        let (r2c, _) = self.plans(len);
        let mut input = values.to_vec();
        let mut out = r2c.make_output_vec();
        r2c.process(&mut input, &mut out)
            .expect("forward transform buffer sizes");
        let scale = T::one() / T::from_usize_lossy(len);
        for c in &mut out {
            *c = *c * scale;
        }
        out
    }

    /// Inverse of [`forward_len`](Self::forward_len) for an output of `len`
    /// points. `coeffs` may be shorter than `len/2 + 1`; missing modes are 0.
    pub(crate) fn inverse_len(&self, coeffs: &[Complex<T>], len: usize) -> Vec<T> {
        let (_, c2r) = self.plans(len);
        let mut input = c2r.make_input_vec();
        let m = coeffs.len().min(input.len());
        input[..m].copy_from_slice(&coeffs[..m]);
        input[0].im = T::zero();
        let last = input.len() - 1;
        input[last].im = T::zero();
        let mut out = c2r.make_output_vec();
        c2r.process(&mut input, &mut out)
            .expect("inverse transform buffer sizes");
        out
    }

    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(values.len(), self.n);
        self.forward_len(values)
    }

    pub fn inverse(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        self.inverse_len(coeffs, self.n)
    }
}
