//! Representation and analytics pipelines over four kinds of data.
//!
//! * [`cartogram`]: density-equalizing maps of region statistics.
//! * [`taxonomy`]: correlation distances, minimum spanning trees and
//!   subdominant ultrametrics over signals or feature vectors, plus a
//!   heavy-tail estimator.
//! * [`sentiment`]: signed actor graphs from actor/topic stance records.
//! * [`community`]: engagement graphs, modularity communities and topic ranking.
//!
//! [`io`] holds every parser and emitter, [`pipeline`] wires the stages
//! together behind a registry of named pipelines.

pub mod cartogram;
pub mod community;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod sentiment;
pub mod taxonomy;

/// Toolkit version reported by `--version` and in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the run-report and result-document schemas.
pub const SCHEMA_VERSION: u32 = 1;

/// Ternary sign with a dead zone of [`SIGN_EPSILON`] around zero.
pub fn sign_with_epsilon(value: f64) -> i8 {
    if value > SIGN_EPSILON {
        1
    } else if value < -SIGN_EPSILON {
        -1
    } else {
        0
    }
}

/// Values with magnitude at most this are classified as zero.
pub const SIGN_EPSILON: f64 = 1e-9;
