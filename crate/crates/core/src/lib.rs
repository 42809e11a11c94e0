//! Exact rainbow subgraph counting in edge-colored complete graphs, rainbow
//! homomorphism densities of step coloring graphons, perturbation
//! certificates of rainbow uncommonness, and iterated blowups.
//!
//! Graphon code is generic over [`Scalar`]; the aliases below fix the usual
//! choices.

pub mod blowup;
pub mod coloring;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod scalar;
pub mod stochastic;
pub mod witness;

pub use coloring::{EdgeColoring, RainbowCount};
pub use error::{Error, Result};
pub use graph::{Graph, VertexMap};
pub use graphon::{DensityResult, StepColoringGraphon};
pub use scalar::{Rational, Scalar};
pub use witness::{Sigma, WitnessCertificate};

/// Graphon with exact rational cells.
pub type ExactGraphon = StepColoringGraphon<Rational>;
/// Graphon with `f64` cells, for sampling and quick estimates.
pub type FloatGraphon = StepColoringGraphon<f64>;
pub type ExactDensity = DensityResult<Rational>;
pub type FloatDensity = DensityResult<f64>;
