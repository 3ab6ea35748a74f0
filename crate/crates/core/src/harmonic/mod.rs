//! Explicit low-distortion constructions: Fourier deconvolution on the
//! circle, Funk–Hecke coefficients on spheres, Riemann-sum banks and
//! Lipschitz norm estimates.

pub mod fourier;
pub mod gegenbauer;
pub mod partition;
pub mod phase;
pub mod riemann;

pub use fourier::{deconvolve, kernel_fourier, verify_integral_identity, TrigPolynomial};
pub use gegenbauer::GegenbauerTable;
pub use partition::{make_partition, SpherePartition};
pub use phase::{pr_coefficient_q, HomogeneousPolynomial};
pub use riemann::{lip_norm_estimate, riemann_bank};
