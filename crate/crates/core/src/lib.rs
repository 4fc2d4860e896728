pub mod error;
pub mod functionals;
pub mod hypersurface;
pub mod median;
pub mod minkowski;
pub mod profiles;
pub mod quadrature;
pub mod scalar;
pub mod sharpness;
pub mod simplex;

pub use error::{Error, Result};
