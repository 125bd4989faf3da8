//! Core library for the sigma_k geodesic-equation toolkit: symmetric
//! function algebra, hyperbolic-polynomial certificates, the space-time
//! grid operator, the damped-Newton continuity solver, and the a priori
//! bound verifier.

pub mod analytic;
pub mod campaign;
pub mod error;
pub mod estimates;
pub mod grid;
pub mod hyperbolic;
pub mod io;
pub mod linsolve;
pub mod operator;
pub mod poly;
pub mod problem;
pub mod sample;
pub mod solver;
pub mod symk;

pub use error::{GsError, Result};
