//! Desk-scale machinery for weighted spaces of infinitely differentiable
//! functions: log-convex sequence classes, associated weight functions,
//! Legendre-Fenchel conjugation, the h/l regularity indicators, canonical
//! products over prescribed radii, and a nonharmonic exponential-sum
//! fitting harness.
//!
//! Statements that quantify over unbounded domains (suprema, lim-infs) are
//! verified by finite proxies that carry explicit stabilization evidence;
//! see [`grid::sup_with_stabilization`]. All computations are deterministic.

pub mod conjugates;
pub mod entire;
pub mod error;
pub mod grid;
pub mod hfun;
pub mod oracles;
pub mod weights;
pub mod report;
pub mod represent;
pub mod sequences;

pub use error::{Error, Result};
pub use report::Status;
