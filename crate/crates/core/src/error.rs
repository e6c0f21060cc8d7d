use thiserror::Error;

/// Errors raised by the geometry, envelope and continuation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("vector is not spacelike (square {square:.3e} >= -{tol:.0e})")]
    NotSpacelike { square: f64, tol: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("point lies on the singular quadric (|square| = {0:.3e})")]
    SingularPoint(f64),

    #[error("line slope {0} is lightlike")]
    LightlikeSlope(f64),

    #[error("no tangent to the mass cone through vertex ({0}, {1})")]
    NoTangent(f64, f64),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("contour target too close to the nodes (distance {distance:.3e}, spacing {spacing:.3e})")]
    TargetTooClose { distance: f64, spacing: f64 },

    #[error("bad curve geometry: {0}")]
    BadGeometry(String),

    #[error("invalid support set: {0}")]
    InvalidSupport(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
