//! Geometry of real coincidence regions in two-dimensional Minkowski space
//! and the holomorphy envelopes of their tube-domain neighbourhoods.

pub mod admissible;
pub mod continuation;
pub mod envelopes;
pub mod error;
pub mod minkowski;
pub mod oracle;
pub mod regions;
pub mod sampling;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use minkowski::{classify, hat_dual, CausalClass, ComplexPoint2, RealPoint2, RealPoint4, TAU_CLASS};
pub use regions::{boundary_distance, contains, edge_neighborhood_contains, pflug_growth, GrowthEval, Region};
pub use sampling::SampleConfig;
