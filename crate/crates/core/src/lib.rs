pub mod basis;
pub mod cache;
pub mod convergence;
pub mod error;
pub mod export;
pub mod extrapolate;
pub mod fmatrix;
pub mod inverse;
pub mod modes;
pub mod oracle;
pub mod sums;
pub mod vertex;

pub use error::{Error, Result};

/// Complex scalar used for `F` and the `Z_3` transform.
pub type Complex = nalgebra::Complex<f64>;
