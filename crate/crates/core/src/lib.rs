//! Core library of the ergolab workspace: concrete dynamical systems with
//! exact or tolerance-controlled arithmetic, orbit-tracing searches and
//! certificates, separated-set entropy estimation, specification-property
//! testers, empirical-measure diagnostics, and interval-map classification.

/// Library version embedded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod entropy;
pub mod error;
pub mod interval;
pub mod measures;
pub mod props;
pub mod systems;
pub mod tracing;

pub use error::{CoreError, Result};
pub use systems::{
    zoo, GeneratorRule, IntervalMapSpec, Point, SymbolicMetric, SymbolicPoint, SystemSpec, Tail,
    SYMBOLIC_HORIZON,
};
pub use tracing::{GapSchedule, SearchRoute, TracingCertificate, TracingInstance};
