//! Periodic Fourier collocation: grids, transforms, derivatives, the
//! Helmholtz operator, dealiased products and the Friedrichs mollifier.

mod field;
mod grid;
mod ops;
mod random;

pub use field::{eval_spectrum, Field};
pub use grid::GridSpec;
pub use ops::{
    apply_multiplier, dealiased_product, deriv, helmholtz, helmholtz_inv, mollifier_symbol,
    mollify, padded_len, Dealiaser,
};
pub(crate) use ops::deriv_symbol;
pub use random::random_smooth_field;

/// Convenience constructor mirroring [`GridSpec::new`].
pub fn make_grid<T: crate::Real>(n: usize, length: T) -> crate::Result<GridSpec<T>> {
    GridSpec::new(n, length)
}
