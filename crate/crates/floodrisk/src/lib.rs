//! Flood catastrophe risk toolkit.
//!
//! Pipeline: load and CPI-normalize loss/precipitation data, fit
//! peaks-over-threshold models (generalized Pareto, exponential, point
//! process), derive tail risk measures and a layered compensation scheme,
//! rank regional vulnerability by grey relational analysis and
//! entropy-weighted TOPSIS, and price a layered parametric CAT bond by
//! Monte Carlo with closed-form discount expectations under a two-factor
//! Vasicek model.

pub mod catbond;
pub mod config;
pub mod data;
pub mod error;
pub mod evt;
pub mod mcdm;
pub mod risk;

pub use error::Error;

/// Version tag embedded in every JSON report.
pub const SCHEMA_VERSION: &str = "1.0";

pub type Result<T> = std::result::Result<T, Error>;
