use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tangent vectors are based at different points")]
    BasePointMismatch,

    #[error("vectors do not span a 2-plane (|v1 x v2| = {0:e})")]
    DegenerateSpan(f64),

    #[error("induced metric is singular (det g = {0:e})")]
    SingularMetric(f64),

    #[error("y = {y} lies outside the open slab ({a}, {b})")]
    OutsideSlab { y: f64, a: f64, b: f64 },

    #[error("right-hand side is not finite at t = {0}")]
    NonFiniteRhs(f64),

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("catenoid profile reached the axis (f = {f:e} at z = {z})")]
    ReachedAxis { f: f64, z: f64 },

    #[error("asymptotic fit needs samples up to r = {needed}, arm ends at r = {available}")]
    InsufficientTail { needed: f64, available: f64 },

    #[error("profile family {found} cannot be swept by the {group} group")]
    FamilyMismatch { found: String, group: String },

    #[error("{0}")]
    Fit(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
