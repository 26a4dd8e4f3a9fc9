//! Subcommand implementations.

pub mod connect;
pub mod figure;
pub mod mu;
pub mod pdf;
pub mod simulate;

use rwpnet::numerics::QuadratureSpec;
use rwpnet::rwpm::StationaryDistribution;

use crate::config::Experiment;
use crate::error::CliResult;

/// Quadrature settings used by the commands' analytic evaluations.
pub fn quad_spec() -> QuadratureSpec<f64> {
    QuadratureSpec {
        rel_tol: 1e-7,
        abs_tol: 1e-12,
        max_subdivisions: 400,
    }
}

/// One distribution per pause weight in the sweep, sharing the cached mean
/// leg length.
pub fn distributions_for_sweep(
    exp: &Experiment,
) -> CliResult<Vec<(f64, StationaryDistribution<f64>)>> {
    let base = exp.distribution()?;
    exp.wp_values()
        .into_iter()
        .map(|wp| Ok((wp, base.with_pause_probability(wp)?)))
        .collect()
}

/// Evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Log-spaced, deduplicated integer node counts.
pub fn log_node_counts(lo: usize, hi: usize, n: usize) -> Vec<usize> {
    let (l, h) = ((lo.max(2)) as f64, hi as f64);
    let mut out: Vec<usize> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (l * (h / l).powf(t)).round() as usize
        })
        .collect();
    out.dedup();
    out
}
