//! Translating solitons of mean curvature flow in the Heisenberg group `Nil3`
//! with the left-invariant metric family `g_λ`.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod families;
pub mod geometry;
pub mod io;
pub mod ode;
pub mod report;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
