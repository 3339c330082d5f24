//! Country-level co-authorship networks built from publication records.
//!
//! The pipeline runs ingest, graph construction, indicators, clustering,
//! layout and rendering. Numeric stages are generic over [`Scalar`], which
//! is implemented for `f32`, `f64` and the exact [`Rational`].

pub mod cli;
pub mod clustering;
pub mod collabgraph;
pub mod error;
pub mod fixtures;
pub mod indicators;
pub mod ingest;
pub mod layout;
pub mod render;
pub mod scalar;
pub mod weighted;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Default floating-point scalar.
pub type Real = f64;

pub type ExactClustering = clustering::Clustering<Rational>;
pub type RealClustering = clustering::Clustering<Real>;
pub type ExactNormalizedGraph = clustering::NormalizedGraph<Rational>;
pub type RealNormalizedGraph = clustering::NormalizedGraph<Real>;
pub type ExactCircularOrder = layout::CircularOrder<Rational>;
pub type RealCircularOrder = layout::CircularOrder<Real>;
pub type RealMap = layout::MapCoordinates<Real>;
pub type SingleMap = layout::MapCoordinates<f32>;
pub type ExactCentrality = indicators::CentralityMap<Rational>;
pub type RealCentrality = indicators::CentralityMap<Real>;
pub type RealWeightedGraph = weighted::WeightedGraph<Real>;
