//! Offline signature verification.
//!
//! The pipeline runs a scanned signature through binarization, denoising,
//! thinning, skew removal, cropping and resizing, cuts the result into a
//! 10×10 grid, and describes each tile by its ink count and a folded
//! chain-code direction histogram. A small tansig network trained with
//! adaptive-rate momentum gradient descent decides genuine vs forgery.
//!
//! The numeric core ([`features`], [`mlp`], [`eval`]) is generic over the
//! floating point type through [`Scalar`]; the aliases below pick `f64`
//! unless stated otherwise.

pub mod error;
pub mod eval;
pub mod features;
pub mod label;
pub mod mlp;
pub mod preprocess;
pub mod raster;
pub mod scalar;
pub mod seed;
pub mod syndata;

pub use error::{Error, Result};
pub use features::{FeatureVector, Layout};
pub use label::Label;
pub use raster::{BinaryRaster, GrayRaster};
pub use scalar::Scalar;

pub type Features = features::FeatureVector<f64>;
pub type Features32 = features::FeatureVector<f32>;
pub type Model = mlp::MlpModel<f64>;
pub type Model32 = mlp::MlpModel<f32>;
pub type TrainConfig = mlp::TrainConfig<f64>;
pub type TrainHistory = mlp::TrainHistory<f64>;
