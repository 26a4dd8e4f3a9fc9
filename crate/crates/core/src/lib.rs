//! Stationary node distributions of the random-waypoint process in
//! rectangular and circular domains, the interference field and SINR
//! connection probability they induce, and the spatial density of
//! successful transmissions — each analytic path shadowed by an
//! independent Monte-Carlo simulator.
//!
//! All numerical code is generic over the scalar type via [`Real`]
//! (`f32` or `f64`); the aliases at the crate root fix the
//! double-precision instantiation the CLI and validation suites use.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod numerics;
pub mod rwpm;
pub mod scalar;
pub mod throughput;

pub use error::{Error, Result};
pub use scalar::Real;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// Double-precision aliases used by the CLI, tests and figure presets.
pub type Point2f = geometry::Point2<f64>;
pub type ChordSplitf = geometry::ChordSplit<f64>;
pub type ConvexDomainf = geometry::ConvexDomain<f64>;
pub type QuadratureSpecf = numerics::QuadratureSpec<f64>;
pub type MobilityParamsf = rwpm::MobilityParams<f64>;
pub type LegStatisticsf = rwpm::LegStatistics<f64>;
pub type StationaryDistributionf = rwpm::StationaryDistribution<f64>;
pub type ChannelParamsf = channel::ChannelParams<f64>;
pub type NetworkConfigf = channel::NetworkConfig<f64>;
pub type LaplaceQueryf = channel::LaplaceQuery<f64>;
pub type LaplaceCachef = channel::LaplaceCache<f64>;
pub type SnapshotEstimatef = montecarlo::SnapshotEstimate<f64>;
