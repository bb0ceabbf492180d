//! Harness for the symmflow integrators: built-in problems, trajectory runs,
//! convergence studies, self-checks and CSV output.

pub mod check;
pub mod config;
pub mod converge;
pub mod csv;
pub mod error;
pub mod problem;
pub mod rng;
pub mod run;

pub use error::{HarnessError, Result};
