//! Diffusion-maps based fusion of aligned multimodal sensor data.
//!
//! The pipeline builds one Markov operator per sensor, combines sensor pairs
//! by alternating diffusion, and merges all pairs into a single common graph
//! whose embedding keeps the hidden variables seen by two or more sensors.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the tolerances in the test suite
//! assume.

// `!(x > 0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alternating;
pub mod cli;
pub mod diffusion;
pub mod error;
pub mod evaluation;
pub mod fusion;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SampleMatrix = kernels::SampleMatrix<f64>;
pub type DistanceMatrix = kernels::DistanceMatrix<f64>;
pub type AffinityMatrix = kernels::AffinityMatrix<f64>;
pub type DiffusionOperator = kernels::DiffusionOperator<f64>;
pub type LocalCovarianceSet = kernels::LocalCovarianceSet<f64>;
pub type StationaryDistribution = diffusion::StationaryDistribution<f64>;
pub type Eigensystem = diffusion::Eigensystem<f64>;
pub type Embedding = diffusion::Embedding<f64>;
pub type AdOperator = alternating::AdOperator<f64>;
pub type MultimodalDataset = fusion::MultimodalDataset<f64>;

pub type SampleMatrixF32 = kernels::SampleMatrix<f32>;
pub type DiffusionOperatorF32 = kernels::DiffusionOperator<f32>;
pub type EmbeddingF32 = diffusion::Embedding<f32>;
