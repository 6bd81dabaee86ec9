// Domain guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod process_lab;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod sample;
pub mod special;
pub mod statistics;
pub mod transforms;

pub use distributions::{Family, FamilySpec, ParamVector};
pub use error::{Error, Result};
pub use estimators::{estimate, Estimate};
pub use rng::RngStream;
pub use sample::CensoredSample;
pub use statistics::{CfWeight, GofResult, StatKind};
pub use transforms::{transformation7, TransformKind, UniformOrderStats, ZScores};
