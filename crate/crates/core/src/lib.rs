//! Metric and generalized projections in `l^p` spaces, the Lyapunov
//! functionals that control them, and iterative schemes built on top.

pub mod convex_sets;
pub mod error;
pub mod harness;
pub mod lp_geometry;
pub mod lyapunov;
pub mod projections;
mod roots;
pub mod solvers;

pub use error::{Error, Result};
pub use lp_geometry::{DualVec, GeometryConstants, LpSpace, PrimalVec};
