//! Heat kernels, resolvents and spectral measures on real hyperbolic
//! spaces H^{n+1}, with desk-scale verification of two-sided Gaussian
//! bounds, gradient estimates, a Li-Yau inequality and Riesz-transform
//! admissible ranges.
//!
//! Even boundary dimension n (odd space dimension) is handled exactly by
//! an interdimensional-descent term algebra ([`kernel_algebra`]); odd n
//! goes through shifted-contour quadrature and numeric descent
//! ([`contour_quadrature`], [`model_kernels`]). Verification drivers live
//! in [`bounds_verifier`] and [`gradient_riesz`].

pub mod acceptance;
pub mod bounds_verifier;
pub mod contour_quadrature;
pub mod dd;
pub mod dimension;
pub mod error;
pub mod gradient_riesz;
pub mod kernel_algebra;
pub mod logval;
pub mod model_kernels;
pub mod report;

pub use dimension::Dimension;
pub use error::{HyperheatError, Result};
pub use logval::LogValue;
