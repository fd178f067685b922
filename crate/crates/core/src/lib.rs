//! Analysis toolkit for the symmetric three-species Lotka-Volterra flow
//!
//! ```text
//! x' = -x(x - y - z),   y' = -y(-x + y - z),   z' = -z(-x - y + z)
//! ```
//!
//! The flow conserves H = xy - xz and C = -xy + yz, and C generates a
//! Poisson structure realizing the field as a Hamilton-Poisson system.
//! The modules here build that bracket machinery, integrate the flow with
//! invariant-drift monitoring, classify the equilibrium families, push the
//! dynamics to infinity through projective charts, stratify the
//! energy-Casimir image, count connected components of its fibers, and
//! check an isospectral matrix formulation.

pub mod compactification;
pub mod ec;
pub mod equilibria;
mod error;
pub mod fibers;
pub mod integrator;
pub mod lax;
pub mod linalg;
pub mod model;
pub mod poisson;
pub mod sampling;

pub use error::Error;
pub use linalg::{Mat3, Vec3};
pub use poisson::State;

pub type Result<T> = std::result::Result<T, Error>;
