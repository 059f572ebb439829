//! Power series whose coefficients obey a three-term recurrence with
//! rational-function coefficients: classification, disc of convergence,
//! evaluation, and boundary-divergence diagnostics.

pub mod boundary;
pub mod classify;
pub mod decomposition;
pub mod error;
pub mod heun;
pub mod number;
pub mod recurrence;
pub mod series;

pub use boundary::{find_witness, GrowthScan, Side, WitnessParams};
pub use classify::{classify, BoundaryVerdict, DiscRadius, Kind, RecurrenceClass, Subcase};
pub use error::{Error, Result};
pub use decomposition::{decomposition_check, Decomposition, DecompositionReport, GroupMode};
pub use heun::{heun_family, HeunParams, IndicialRoot};
pub use number::{Exact, ScaledComplex, C64};
pub use recurrence::{normalize, CoefficientFamily, NormalizedFamily, PolyN, Shape};
pub use series::{eval_series, generate_coeffs, MajorantRun, NumericMode, SeriesRun};
