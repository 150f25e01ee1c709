//! Anisotropic least gradient problems with Dirichlet data on part of the
//! boundary: a primal–dual solver for the relaxed functional, a verifier for
//! calibration fields, level-set and continuity diagnostics, and a registry of
//! worked scenarios with closed-form solutions.

pub mod anisotropy;
pub mod certify;
pub mod cli;
pub mod config;
pub mod error;
pub(crate) mod exec;
pub mod grid;
pub mod io;
pub mod levelset;
pub mod operators;
pub mod scenarios;
pub mod solver;

pub use error::{Error, Result};
pub use exec::PARALLEL_AVAILABLE;
