//! Sobolev, Besov and Lebesgue norms of grid functions.
//!
//! Fourier coefficients are normalised so that `s = 0` reproduces `∫|f|²`
//! over the box: `‖f‖²_{H^s} = L Σ_k (1 + k²)^s |c_k|²`. Under this
//! convention `‖u‖_{H^s} = ‖(1-∂²)u‖_{H^{s-2}}` holds exactly.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::spectral::{Field, GridSpec};

/// Which norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormRequest {
    Sobolev { s: f64 },
    /// `B^s_{2,r}`; `r = None` means `r = ∞`.
    Besov { s: f64, r: Option<f64> },
    Lebesgue { p: f64 },
    Sup,
}

impl NormRequest {
    pub fn evaluate<T: Real>(&self, f: &Field<T>) -> Result<T> {
        match *self {
            NormRequest::Sobolev { s } => Ok(sobolev_norm(f, T::lit(s))),
            NormRequest::Besov { s, r } => {
                besov_norm(f, T::lit(s), r.map(T::lit).unwrap_or_else(T::infinity))
            }
            NormRequest::Lebesgue { p } => lp_norm(f, T::lit(p)),
            NormRequest::Sup => Ok(sup_norm(f)),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            NormRequest::Sobolev { s } => format!("H^{s}"),
            NormRequest::Besov { s, r: Some(r) } => format!("B^{s}_{{2,{r}}}"),
            NormRequest::Besov { s, r: None } => format!("B^{s}_{{2,inf}}"),
            NormRequest::Lebesgue { p } => format!("L^{p}"),
            NormRequest::Sup => "L^inf".to_string(),
        }
    }
}

/// Multiplicity of half-spectrum index `j` in the full spectrum.
#[inline]
fn multiplicity<T: Real>(grid: &GridSpec<T>, j: usize) -> T {
    if j == 0 || j == grid.n() / 2 {
        T::one()
    } else {
        T::lit(2.0)
    }
}

/// `L Σ_k w(k) |c_k|²` over the full spectrum.
pub(crate) fn weighted_energy<T: Real>(
    grid: &GridSpec<T>,
    coeffs: &[Complex<T>],
    weight: impl Fn(T) -> T,
) -> T {
    let sum: T = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| multiplicity(grid, j) * weight(grid.wavenumber(j)) * c.norm_sqr())
        .sum();
    grid.length() * sum
}

pub fn sobolev_norm<T: Real>(f: &Field<T>, s: T) -> T {
    sobolev_norm_of_spectrum(f.grid(), &f.spectrum(), s)
}

pub fn sobolev_norm_of_spectrum<T: Real>(grid: &GridSpec<T>, coeffs: &[Complex<T>], s: T) -> T {
    weighted_energy(grid, coeffs, |k| (T::one() + k * k).powf(s)).sqrt()
}

/// `L²` inner product `∫ f g dx`, exact for band-limited data.
pub fn inner<T: Real>(f: &Field<T>, g: &Field<T>) -> T {
    let grid = f.grid();
    let (cf, cg) = (f.spectrum(), g.spectrum());
    let sum: T = cf
        .iter()
        .zip(&cg)
        .enumerate()
        .map(|(j, (a, b))| multiplicity(grid, j) * (a * b.conj()).re)
        .sum();
    grid.length() * sum
}

/// Dyadic block index: `-1` for `|k| < 1/2`, otherwise the `j ≥ 0` with
/// `2^{j-1} ≤ |k| < 2^j`.
pub fn dyadic_block<T: Real>(k: T) -> i32 {
    let k = k.abs();
    let half = T::lit(0.5);
    if k < half {
        return -1;
    }
    let mut j = 0;
    let mut upper = T::one();
    while k >= upper {
        upper = upper * T::lit(2.0);
        j += 1;
    }
    j
}

/// `L²` norms of the dyadic blocks, indexed from `j = -1`.
pub fn dyadic_block_norms<T: Real>(f: &Field<T>) -> Vec<(i32, T)> {
    let grid = f.grid();
    let c = f.spectrum();
    let mut blocks: Vec<(i32, T)> = Vec::new();
    for (j, cj) in c.iter().enumerate() {
        let b = dyadic_block(grid.wavenumber(j));
        let e = grid.length() * multiplicity(grid, j) * cj.norm_sqr();
        match blocks.iter_mut().find(|(idx, _)| *idx == b) {
            Some((_, acc)) => *acc += e,
            None => blocks.push((b, e)),
        }
    }
    blocks.sort_by_key(|(j, _)| *j);
    blocks.into_iter().map(|(j, e)| (j, e.sqrt())).collect()
}

/// `‖f‖_{B^s_{2,r}} = ‖(2^{js} ‖Δ_j f‖_{L²})_j‖_{ℓ^r}`, sharp annuli.
pub fn besov_norm<T: Real>(f: &Field<T>, s: T, r: T) -> Result<T> {
    if !(r >= T::one()) {
        return Err(invalid(format!("Besov summation index must be in [1, ∞], got {r}")));
    }
    let terms = dyadic_block_norms(f)
        .into_iter()
        .map(|(j, b)| T::lit(2.0).powf(T::from_i32(j).unwrap() * s) * b);
    if r.is_infinite() {
        return Ok(terms.fold(T::zero(), |m, t| if t > m { t } else { m }));
    }
    let sum: T = terms.map(|t| t.powf(r)).sum();
    Ok(sum.powf(T::one() / r))
}

/// Periodic trapezoidal rule for `(∫|f|^p)^{1/p}`.
pub fn lp_norm<T: Real>(f: &Field<T>, p: T) -> Result<T> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(invalid(format!("Lebesgue exponent must be ≥ 1, got {p}")));
    }
    Ok(lp_integral(f, p).powf(T::one() / p))
}

/// `∫|f|^p dx` by the periodic trapezoidal rule (no `p ≥ 1` restriction).
pub fn lp_integral<T: Real>(f: &Field<T>, p: T) -> T {
    let h = f.grid().dx();
    h * f.values().iter().map(|v| v.abs().powf(p)).sum::<T>()
}

pub fn sup_norm<T: Real>(f: &Field<T>) -> T {
    f.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::helmholtz;
    use std::f64::consts::PI;

    #[test]
    fn sine_norms() {
        let g = GridSpec::<f64>::periodic(64).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        assert!((sobolev_norm(&f, 0.0) - PI.sqrt()).abs() < 1e-13);
        assert!((sobolev_norm(&f, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn block_indices() {
        assert_eq!(dyadic_block(0.0), -1);
        assert_eq!(dyadic_block(0.49), -1);
        assert_eq!(dyadic_block(0.5), 0);
        assert_eq!(dyadic_block(1.0), 1);
        assert_eq!(dyadic_block(3.0), 2);
        assert_eq!(dyadic_block(4.0), 3);
        assert_eq!(dyadic_block(7.9), 3);
        assert_eq!(dyadic_block(-8.0), 4);
    }

    #[test]
    fn single_mode_besov() {
        let g = GridSpec::<f64>::periodic(64).unwrap();
        let f = Field::from_fn(&g, |x| (4.0 * x).cos());
        let blocks: Vec<_> = dyadic_block_norms(&f)
            .into_iter()
            .filter(|(_, b)| *b > 1e-12)
            .collect();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].0, 3);
        let l2 = PI.sqrt();
        for s in [0.0, 1.0, 2.5] {
            for r in [1.0, 2.0, f64::INFINITY] {
                let b = besov_norm(&f, s, r).unwrap();
                assert!((b - 2f64.powf(3.0 * s) * l2).abs() < 1e-10 * b.max(1.0));
            }
        }
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = GridSpec::<f64>::periodic(32).unwrap();
        let z = Field::zeros(&g);
        for s in [-1.0, 0.0, 2.5] {
            for r in [1.0, 3.0, f64::INFINITY] {
                assert_eq!(besov_norm(&z, s, r).unwrap(), 0.0);
            }
        }
        assert_eq!(sobolev_norm(&z, 3.0), 0.0);
        assert_eq!(lp_norm(&z, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn besov_rejects_small_r() {
        let g = GridSpec::<f64>::periodic(32).unwrap();
        assert!(besov_norm(&Field::zeros(&g), 1.0, 0.5).is_err());
    }

    #[test]
    fn constant_l2() {
        let g = GridSpec::<f64>::periodic(32).unwrap();
        let f = Field::constant(&g, 2.0);
        assert!((lp_norm(&f, 2.0).unwrap() - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn sup_of_sine_within_sampling_error() {
        for n in [16usize, 64, 256] {
            let g = GridSpec::<f64>::periodic(n).unwrap();
            let f = Field::from_fn(&g, |x| x.sin());
            let tol = (PI / n as f64).powi(2);
            assert!((sup_norm(&f) - 1.0).abs() <= tol);
        }
    }

    #[test]
    fn helmholtz_norm_identity_on_mode() {
        let g = GridSpec::<f64>::periodic(32).unwrap();
        let u = Field::from_fn(&g, |x| (3.0 * x).sin() + 0.2);
        let m = helmholtz(&u);
        let a = sobolev_norm(&u, 2.5);
        let b = sobolev_norm(&m, 0.5);
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn request_dispatch() {
        let g = GridSpec::<f64>::periodic(32).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        let v = NormRequest::Sobolev { s: 0.0 }.evaluate(&f).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-13);
        assert_eq!(NormRequest::Sup.label(), "L^inf");
    }
}
