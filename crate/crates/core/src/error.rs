//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by geometry queries, quadrature and the channel/throughput
/// evaluators built on top of them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A query point lies outside the domain it was evaluated on.
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    /// Path loss evaluated at zero distance with a zero non-singularity offset.
    #[error("path loss is singular: d = 0 with epsilon = 0")]
    SingularPathLoss,

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate
    /// reached and its error estimate.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {best:e}, error estimate {error_estimate:e})"
    )]
    QuadratureDidNotConverge {
        best: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// A series evaluation exceeded its term budget.
    #[error("series did not converge within {terms} terms")]
    SeriesDidNotConverge { terms: usize },

    /// Parameters outside the supported range of a special function or model.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    /// Invalid constructor argument; the message names the offending field.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No direction from the receiver keeps a transmitter at the requested
    /// distance inside the domain.
    #[error("no transmitter placement at distance {distance} from ({x}, {y})")]
    NoTransmitterPlacement { distance: f64, x: f64, y: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
