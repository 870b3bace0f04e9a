use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid point count {0} must be a power of two and at least 8")]
    BadPointCount(usize),
    #[error("box length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("frequency {lambda} is under-resolved: {points_per_wavelength:.2} points per wavelength (need at least 8)")]
    UnderResolved {
        lambda: f64,
        points_per_wavelength: f64,
    },
    #[error("peakon domain does not match the grid: {0}")]
    DomainMismatch(String),
    #[error("(s, r) = ({s}, {r}) lies outside every Hoelder region")]
    NoHoelderRegion { s: f64, r: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
