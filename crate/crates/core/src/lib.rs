//! Bit-exact model of variable-precision IEEE-754 multiplication built
//! from fixed-size multiplier tiles (24x24, 24x9, 9x9), with resource and
//! utilization accounting against uniform 18x18 tiling.
//!
//! - [`wideint`]: checked fixed-width unsigned integers, the substrate for
//!   every significand product.
//! - [`tiles`]: tile shapes, tile sets and exact tile products.
//! - [`partition`]: partition plans and their execution.
//! - [`fpmul`]: formats, packing and the rounded multiply.
//! - [`report`]: censuses, utilization and tile-set comparisons.
//! - [`reference`]: an independent multiplier for cross-checking.

pub mod error;
pub mod fpmul;
pub mod partition;
pub mod reference;
pub mod report;
pub mod scalar;
pub mod tiles;
pub mod vectors;
pub mod wideint;

pub use error::{Error, Result};
pub use fpmul::{fp_multiply, Flags, FpClass, FpFormat, FpValue, RoundingMode};
pub use partition::{execute_plan, plan_generic, plan_p114, plan_p57, PartitionPlan};
pub use tiles::{TileSet, TileShape};
pub use wideint::WideUint;

/// Exact rational ratio used for utilization figures.
pub type Ratio = num_rational::Ratio<u64>;

/// Resource report with `f64` ratios.
pub type Report = report::ResourceReport<f64>;

/// Resource report with exact rational ratios.
pub type ExactReport = report::ResourceReport<Ratio>;

pub type FloatComparison = report::Comparison<f64>;

pub type ExactComparison = report::Comparison<Ratio>;
