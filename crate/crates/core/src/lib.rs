//! Low-distortion Euclidean embeddings of orbit spaces `V/G`.
//!
//! Geometry is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! `f64`, which every experiment uses.

pub mod distortion;
pub mod embeddings;
pub mod error;
pub mod filters;
pub mod groups;
pub mod harmonic;
pub mod linalg;
pub mod metrics;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod shapes;
pub mod training;

pub use distortion::{empirical_distortion, DistortionReport, CSV_HEADER};
pub use embeddings::{Embedding, EmbeddingModel, PolyRow};
pub use error::{Error, Result};
pub use filters::{FilterBank, LinearMap};
pub use groups::{GroupKind, GroupSpec};
pub use metrics::quotient_dist;
pub use scalar::Real;
pub use training::{Arch, TrainConfig};

pub type Group = groups::GroupSpec<f64>;
pub type Bank = filters::FilterBank<f64>;
pub type Linear = filters::LinearMap<f64>;
pub type Model = embeddings::EmbeddingModel<f64>;
pub type Report = distortion::DistortionReport<f64>;
pub type Mat = linalg::Matrix<f64>;
