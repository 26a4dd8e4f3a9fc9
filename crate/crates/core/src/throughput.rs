//! Spatial density of successful transmissions: the expected number of
//! nodes whose individual transmissions a receiver can decode.

use std::cell::Cell;

use crate::channel::{ChannelParams, LaplaceCache, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point2};
use crate::numerics::{erf, integrate_1d, QuadratureSpec};
use crate::rwpm::StationaryDistribution;
use crate::scalar::Real;
use rayon::prelude::*;

/// A receiver position paired with the network and channel it lives in.
#[derive(Clone, Debug)]
pub struct MuQuery<F> {
    pub receiver: Point2<F>,
    pub config: NetworkConfig<F>,
    pub params: ChannelParams<F>,
}

/// Expected number of decodable transmitters at `receiver`:
/// `(N - 1) int_V f(r) H(|r - receiver|) dr`.
///
/// Builds the receiver's Laplace cache and evaluates the link probability
/// through it.
pub fn mu_numeric<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    receiver: Point2<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    let cache = LaplaceCache::build(config, params, receiver, spec)?;
    mu_numeric_cached(config.distribution(), &cache, config.node_count(), spec)
}

/// Same as [`mu_numeric`] but reusing a prebuilt cache; the cache fixes the
/// receiver, the node count is free (the cached integral is per node).
pub fn mu_numeric_cached<F: Real>(
    distribution: &StationaryDistribution<F>,
    cache: &LaplaceCache<F>,
    node_count: usize,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    if node_count < 2 {
        return Err(Error::InvalidParameter(
            "mu needs at least two nodes".into(),
        ));
    }
    let receiver = cache.receiver();
    let domain = distribution.domain();
    let n_minus_1 = F::from_usize(node_count - 1).unwrap();

    // receiver at the centre of a disk: everything is radial
    if let ConvexDomain::Disk { radius } = *domain {
        if receiver.norm() <= domain.geometric_tolerance() {
            let r = integrate_1d(
                |t: F| {
                    distribution.pdf_unchecked(&Point2::new(t, F::zero()))
                        * cache.connection_probability_with_nodes(t, node_count)
                        * t
                },
                F::zero(),
                radius,
                spec,
            )?;
            return Ok(n_minus_1 * r.value * F::two() * F::PI());
        }
    }

    let integral = polar_about(
        domain,
        &receiver,
        |p, t| {
            distribution.pdf_unchecked(p)
                * cache.connection_probability_with_nodes(t, node_count)
        },
        None,
        spec,
    )?;
    Ok(n_minus_1 * integral)
}

/// `int f(p, |p - centre|) dA` in polar coordinates about `centre`, with the
/// radial reach optionally truncated. Inner quadrature failures surface as
/// errors.
fn polar_about<F: Real>(
    domain: &ConvexDomain<F>,
    centre: &Point2<F>,
    f: impl Fn(&Point2<F>, F) -> F,
    truncate: Option<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    if !domain.contains_with_tolerance(centre) {
        return Err(Error::OutsideDomain {
            x: centre.x.as_f64(),
            y: centre.y.as_f64(),
        });
    }
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * F::lit(0.1),
        abs_tol: spec.abs_tol * F::lit(0.1),
        max_subdivisions: spec.max_subdivisions,
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let outer = integrate_1d(
        |theta: F| {
            let (sin, cos) = theta.sin_cos();
            let mut reach = domain.exit_distance(centre, (cos, sin));
            if let Some(cap) = truncate {
                reach = reach.min(cap);
            }
            if reach <= F::zero() {
                return F::zero();
            }
            match integrate_1d(
                |t| {
                    let p = centre.offset((cos, sin), t);
                    f(&p, t) * t
                },
                F::zero(),
                reach,
                &inner_spec,
            ) {
                Ok(r) => r.value,
                Err(e) => {
                    failure.set(Some(e));
                    F::zero()
                }
            }
        },
        F::zero(),
        F::two() * F::PI(),
        spec,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(outer.value)
}

/// Expected decodable transmitters under the deterministic link rule
/// `H = 1 when d < radius`: the probability mass of the stationary
/// distribution inside the link disk, times `N - 1`.
///
/// The uniform component uses the exact circular-segment intersection area;
/// only the mobile component is integrated numerically.
pub fn mu_indicator<F: Real>(
    distribution: &StationaryDistribution<F>,
    node_count: usize,
    receiver: Point2<F>,
    link_radius: F,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    if node_count < 2 {
        return Err(Error::InvalidParameter(
            "mu needs at least two nodes".into(),
        ));
    }
    let domain = distribution.domain();
    let wp = distribution.pause_probability();
    let n_minus_1 = F::from_usize(node_count - 1).unwrap();
    let uniform_mass = domain.disk_intersection_area(&receiver, link_radius) / domain.area();
    let mobile_mass = if wp == F::one() {
        F::zero()
    } else {
        polar_about(
            domain,
            &receiver,
            |p, _| distribution.mobile_pdf_unchecked(p),
            Some(link_radius),
            spec,
        )?
    };
    Ok(n_minus_1 * (wp * uniform_mass + (F::one() - wp) * mobile_mass))
}

/// Verbatim printed closed form of the SNR-regime density (gamma = 0,
/// eta = 2) on the rectangle, written under the normalization
/// `q * noise / power = 1`, `epsilon = 0` and the polynomial pdf.
///
/// Kept exactly as published for the closed-form audit; the quadrature path
/// is the ground truth and the audit records the deviations of this
/// expression (its mobile part blows up away from `wp = 1`).
pub fn mu_snr_closed<F: Real>(a: F, b: F, x0: F, y0: F, wp: F, node_count: usize) -> F {
    let n1 = F::from_usize(node_count - 1).unwrap();
    let pi = F::PI();
    let sqrt_pi = pi.sqrt();
    let v = F::lit(4.0) * a * b;
    let uniform = n1 * wp * pi / (F::lit(4.0) * v)
        * (erf(a - x0) + erf(a + x0))
        * (erf(b - y0) + erf(b + y0));

    let block = |c: F, t0: F| -> F {
        ((t0 - c) * (t0 - c)).exp()
            * (-F::two() * (c + t0) * (F::two() * c * t0).exp()
                + sqrt_pi * (F::two() * t0 * t0 - F::two() * c * c) * erf(c - t0))
            + (-(c * c + t0 * t0)).exp()
                * (-F::two() * (c - t0)
                    + sqrt_pi
                        * (F::two() * t0 * t0 - F::two() * c * c)
                        * erf(c + t0)
                        * ((c + t0) * (c + t0)).exp())
    };
    let mobile = n1 * F::lit(9.0) * (F::one() - wp)
        * (-F::two() * (a * x0 + b * y0)).exp()
        / (F::lit(256.0) * (a * b).powi(3))
        * block(a, x0)
        * block(b, y0);
    uniform + mobile
}

/// The four receiver positions the printed unit-disk closed form covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitDiskPoint {
    Centre,
    EdgeMidX,
    EdgeMidY,
    Corner,
}

impl UnitDiskPoint {
    pub fn position<F: Real>(self, a: F, b: F) -> Point2<F> {
        match self {
            UnitDiskPoint::Centre => Point2::origin(),
            UnitDiskPoint::EdgeMidX => Point2::new(a, F::zero()),
            UnitDiskPoint::EdgeMidY => Point2::new(F::zero(), b),
            UnitDiskPoint::Corner => Point2::new(a, b),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            UnitDiskPoint::Centre => "centre",
            UnitDiskPoint::EdgeMidX => "edge_mid_x",
            UnitDiskPoint::EdgeMidY => "edge_mid_y",
            UnitDiskPoint::Corner => "corner",
        }
    }

    pub const ALL: [UnitDiskPoint; 4] = [
        UnitDiskPoint::Centre,
        UnitDiskPoint::EdgeMidX,
        UnitDiskPoint::EdgeMidY,
        UnitDiskPoint::Corner,
    ];
}

/// Verbatim printed closed form of the unit-disk-link density at the four
/// special receiver positions (unit link radius, rectangle at least one
/// unit in each half-extent).
///
/// `mean_leg` enters because the printed uniform parts carry a `1/(l V)`
/// factor; the indicator oracle [`mu_indicator`] is the ground truth and
/// the audit records the deviations.
pub fn mu_unit_disk_closed<F: Real>(
    a: F,
    b: F,
    mean_leg: F,
    wp: F,
    node_count: usize,
    point: UnitDiskPoint,
) -> Result<F> {
    if a < F::one() || b < F::one() {
        return Err(Error::Unsupported(
            "unit-disk closed form assumes half-extents of at least the link radius".into(),
        ));
    }
    let n1 = F::from_usize(node_count - 1).unwrap();
    let pi = F::PI();
    let ab = a * b;
    let mobile_weight = F::one() - wp;
    let value = match point {
        UnitDiskPoint::Centre => {
            n1 * wp * pi / (mean_leg * F::lit(4.0) * ab)
                + n1 * mobile_weight * pi / (F::lit(42.0) * ab.powi(3))
                    * (-F::lit(6.0) * (a * a + b * b) + F::lit(24.0) * ab * ab)
        }
        UnitDiskPoint::EdgeMidX => {
            n1 * wp * pi / (F::lit(8.0) * mean_leg * ab)
                + n1 * mobile_weight / (F::lit(426.0) * ab.powi(3))
                    * (F::lit(5.0) * pi - F::lit(64.0) * a - F::lit(30.0) * pi * b * b
                        + F::lit(320.0) * a * b * b)
        }
        UnitDiskPoint::EdgeMidY => {
            n1 * wp * pi / (F::lit(8.0) * mean_leg * ab)
                + n1 * mobile_weight / (F::lit(426.0) * ab.powi(3))
                    * (F::lit(5.0) * pi - F::lit(64.0) * b - F::lit(30.0) * pi * a * a
                        + F::lit(320.0) * a * a * b)
        }
        UnitDiskPoint::Corner => {
            n1 * wp * pi / (F::lit(16.0) * mean_leg * ab)
                + n1 * mobile_weight / (F::lit(854.0) * ab.powi(3))
                    * (F::lit(5.0) * pi - F::lit(64.0) * (a + b) + F::lit(120.0) * ab)
        }
    };
    Ok(value)
}

/// Density profile over a sweep of node counts with one shared Laplace
/// cache; entries come back in input order.
pub fn mu_vs_density_profile<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    receiver: Point2<F>,
    node_counts: &[usize],
    spec: &QuadratureSpec<F>,
) -> Result<Vec<(usize, F)>> {
    let cache = LaplaceCache::build(config, params, receiver, spec)?;
    node_counts
        .par_iter()
        .map(|&n| {
            mu_numeric_cached(config.distribution(), &cache, n, spec).map(|mu| (n, mu))
        })
        .collect()
}

/// One comparison row of a closed-form audit.
#[derive(Clone, Debug)]
pub struct AuditRow<F> {
    pub label: String,
    pub receiver: Point2<F>,
    pub verbatim: F,
    pub oracle: F,
    pub rel_deviation: F,
}

fn audit_row<F: Real>(label: String, receiver: Point2<F>, verbatim: F, oracle: F) -> AuditRow<F> {
    let rel = if oracle != F::zero() {
        ((verbatim - oracle) / oracle).abs()
    } else {
        verbatim.abs()
    };
    AuditRow {
        label,
        receiver,
        verbatim,
        oracle,
        rel_deviation: rel,
    }
}

/// Audits the printed SNR closed form against the quadrature path at the
/// given receivers. `distribution` must be a rectangle; the channel is fixed
/// to the normalization the printed form assumes (gamma = 0, eta = 2,
/// epsilon = 0, unit threshold/noise/power).
pub fn snr_closed_form_audit<F: Real>(
    distribution: &StationaryDistribution<F>,
    node_count: usize,
    receivers: &[Point2<F>],
    spec: &QuadratureSpec<F>,
) -> Result<Vec<AuditRow<F>>> {
    let (a, b) = match *distribution.domain() {
        ConvexDomain::Rectangle {
            half_width,
            half_height,
        } => (half_width, half_height),
        _ => {
            return Err(Error::Unsupported(
                "the SNR closed form is specific to rectangles".into(),
            ))
        }
    };
    let params = ChannelParams::new(
        F::one(),
        F::one(),
        F::two(),
        F::zero(),
        F::zero(),
        F::one(),
    )?;
    let config = NetworkConfig::new(node_count, distribution.clone())?;
    let wp = distribution.pause_probability();
    receivers
        .iter()
        .map(|r| {
            let oracle = mu_numeric(&config, &params, *r, spec)?;
            let verbatim = mu_snr_closed(a, b, r.x, r.y, wp, node_count);
            Ok(audit_row(format!("snr wp={wp}"), *r, verbatim, oracle))
        })
        .collect()
}

/// Audits the printed unit-disk closed form at its four special points
/// against the indicator-link oracle.
pub fn unit_disk_closed_form_audit<F: Real>(
    distribution: &StationaryDistribution<F>,
    node_count: usize,
    spec: &QuadratureSpec<F>,
) -> Result<Vec<AuditRow<F>>> {
    let (a, b) = match *distribution.domain() {
        ConvexDomain::Rectangle {
            half_width,
            half_height,
        } => (half_width, half_height),
        _ => {
            return Err(Error::Unsupported(
                "the unit-disk closed form is specific to rectangles".into(),
            ))
        }
    };
    let wp = distribution.pause_probability();
    let mean_leg = distribution.mean_leg_length();
    UnitDiskPoint::ALL
        .iter()
        .map(|&point| {
            let receiver = point.position(a, b);
            let oracle = mu_indicator(distribution, node_count, receiver, F::one(), spec)?;
            let verbatim = mu_unit_disk_closed(a, b, mean_leg, wp, node_count, point)?;
            Ok(audit_row(
                format!("unit_disk {} wp={wp}", point.label()),
                receiver,
                verbatim,
                oracle,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rwpm::PdfKind;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 400,
        }
    }

    fn rect_dist(a: f64, b: f64, wp: f64, kind: PdfKind) -> StationaryDistribution<f64> {
        let dom = ConvexDomain::rectangle(a, b).unwrap();
        StationaryDistribution::new(dom, wp, kind, &spec()).unwrap()
    }

    /// Independent SNR-regime closed form derived from the Gaussian
    /// integrals of the polynomial pdf; the cross-oracle for `mu_numeric`.
    fn mu_snr_gaussian(a: f64, b: f64, x0: f64, y0: f64, wp: f64, n: usize) -> f64 {
        let n1 = (n - 1) as f64;
        let v = 4.0 * a * b;
        let ex = erf(a - x0) + erf(a + x0);
        let ey = erf(b - y0) + erf(b + y0);
        let uniform = n1 * wp * PI / (4.0 * v) * ex * ey;
        let moment = |c: f64, t0: f64| {
            PI.sqrt() / 4.0 * (1.0 + 2.0 * t0 * t0 - 2.0 * c * c) * (erf(c - t0) + erf(c + t0))
                - 0.5
                    * ((c + t0) * (-((c - t0) * (c - t0))).exp()
                        + (c - t0) * (-((c + t0) * (c + t0))).exp())
        };
        let mobile = n1 * (1.0 - wp) * 9.0 / (16.0 * a.powi(3) * b.powi(3))
            * moment(a, x0)
            * moment(b, y0);
        uniform + mobile
    }

    #[test]
    fn snr_quadrature_matches_derived_gaussian_form() {
        let params = ChannelParams::new(1.0, 1.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        for wp in [0.0, 0.5, 1.0] {
            let dist = rect_dist(1.0, 1.0, wp, PdfKind::Approximate);
            let config = NetworkConfig::new(10, dist).unwrap();
            for r in [Point2::origin(), Point2::new(0.3, 0.5)] {
                let numeric = mu_numeric(&config, &params, r, &spec()).unwrap();
                let gauss = mu_snr_gaussian(1.0, 1.0, r.x, r.y, wp, 10);
                assert_relative_eq!(numeric, gauss, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn printed_snr_form_is_exact_for_the_uniform_component() {
        // wp = 1 leaves only the erf-product part, which is correct as printed
        let numeric = mu_snr_gaussian(1.0, 1.0, 0.0, 0.0, 1.0, 10);
        let verbatim = mu_snr_closed(1.0, 1.0, 0.0, 0.0, 1.0, 10);
        assert_relative_eq!(verbatim, numeric, max_relative = 1e-13);
        // and it is even in each coordinate there
        assert_eq!(
            mu_snr_closed(2.0, 1.0, 0.4, 0.2, 1.0, 10),
            mu_snr_closed(2.0, 1.0, -0.4, 0.2, 1.0, 10)
        );
    }

    #[test]
    fn printed_snr_form_deviates_for_the_mobile_component() {
        // the printed mobile block blows up; the audit must keep recording it
        let verbatim = mu_snr_closed(1.0, 1.0, 0.0, 0.0, 0.0, 10);
        let oracle = mu_snr_gaussian(1.0, 1.0, 0.0, 0.0, 0.0, 10);
        let rel = (verbatim / oracle - 1.0).abs();
        assert!(rel > 1.0, "expected a large printed-form deviation, got {rel}");
    }

    #[test]
    fn snr_large_domain_limit() {
        // wp = 1, domain much larger than the connection range: (N-1) pi / V
        let v = mu_snr_closed(10.0, 10.0, 0.0, 0.0, 1.0, 101);
        assert_relative_eq!(v, 100.0 * PI / 400.0, max_relative = 1e-9);
    }

    #[test]
    fn snr_linearity_in_node_count() {
        let params = ChannelParams::new(1.0, 1.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let dist = rect_dist(1.0, 1.0, 0.3, PdfKind::Approximate);
        let config = NetworkConfig::new(11, dist).unwrap();
        let mu11 = mu_numeric(&config, &params, Point2::origin(), &spec()).unwrap();
        let config21 = config.with_node_count(21).unwrap();
        let mu21 = mu_numeric(&config21, &params, Point2::origin(), &spec()).unwrap();
        assert_eq!(mu21, 2.0 * mu11, "exactly linear in N - 1 when gamma = 0");
    }

    #[test]
    fn mu_approaches_all_neighbours_without_noise() {
        let params = ChannelParams::new(1.0, 1e-12, 2.0, 0.0, 0.0, 1.0).unwrap();
        let dist = rect_dist(1.0, 1.0, 0.0, PdfKind::Approximate);
        let config = NetworkConfig::new(2, dist).unwrap();
        let mu = mu_numeric(&config, &params, Point2::origin(), &spec()).unwrap();
        assert_relative_eq!(mu, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn indicator_oracle_matches_exact_sector_integrals() {
        // closed-form integrals of the polynomial pdf over the unit disk,
        // half-disk and quarter-disk around the special points
        let (a, b) = (10.0f64, 10.0f64);
        let n = 100usize;
        let n1 = (n - 1) as f64;
        let k = 9.0 / (16.0 * a.powi(3) * b.powi(3));
        let exact_centre = k * PI * (1.0 / 24.0 - (a * a + b * b) / 4.0 + a * a * b * b);
        let exact_edge_x = k * (PI / 48.0 - PI * b * b / 8.0 - 4.0 * a / 15.0 + 4.0 * a * b * b / 3.0);
        let exact_corner = k * (PI / 96.0 - 2.0 * (a + b) / 15.0 + a * b / 2.0);

        let dist = rect_dist(a, b, 0.0, PdfKind::Approximate);
        let cases = [
            (UnitDiskPoint::Centre, exact_centre),
            (UnitDiskPoint::EdgeMidX, exact_edge_x),
            (UnitDiskPoint::Corner, exact_corner),
        ];
        for (point, exact_mobile) in cases {
            let receiver = point.position(a, b);
            let numeric = mu_indicator(&dist, n, receiver, 1.0, &spec()).unwrap();
            assert_relative_eq!(numeric, n1 * exact_mobile, max_relative = 1e-6);
        }
        // uniform case against plain intersection areas
        let dist = rect_dist(a, b, 1.0, PdfKind::Approximate);
        let numeric = mu_indicator(&dist, n, Point2::origin(), 1.0, &spec()).unwrap();
        assert_relative_eq!(numeric, n1 * PI / 400.0, max_relative = 1e-12);
    }

    #[test]
    fn printed_unit_disk_form_records_expected_deviations() {
        let (a, b) = (10.0, 10.0);
        let dist = rect_dist(a, b, 1.0, PdfKind::Approximate);
        let mean_leg = dist.mean_leg_length();
        let n = 100usize;
        // uniform part: verbatim carries a spurious 1/mean_leg against the
        // direct-geometry value (N-1) pi / V
        let verbatim = mu_unit_disk_closed(a, b, mean_leg, 1.0, n, UnitDiskPoint::Centre).unwrap();
        let geometry = 99.0 * PI / 400.0;
        assert_relative_eq!(verbatim * mean_leg, geometry, max_relative = 1e-12);
        // ordering still holds under the printed form
        let corner = mu_unit_disk_closed(a, b, mean_leg, 1.0, n, UnitDiskPoint::Corner).unwrap();
        assert!(corner < verbatim);
    }

    #[test]
    fn unit_disk_form_requires_unit_margin() {
        assert!(mu_unit_disk_closed(0.5, 0.5, 1.0, 0.5, 10, UnitDiskPoint::Centre).is_err());
    }

    #[test]
    fn audits_produce_rows() {
        let dist = rect_dist(2.0, 1.0, 0.0, PdfKind::Approximate);
        let rows = snr_closed_form_audit(
            &dist,
            10,
            &[Point2::origin(), Point2::new(0.5, 0.25)],
            &spec(),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.oracle.is_finite() && r.verbatim.is_finite()));
        assert!(rows.iter().all(|r| r.rel_deviation > 0.1),
            "wp = 0 printed SNR form should deviate strongly");

        let dist = rect_dist(10.0, 10.0, 0.5, PdfKind::Approximate);
        let rows = unit_disk_closed_form_audit(&dist, 50, &spec()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.oracle > 0.0));
    }

    #[test]
    fn profile_is_linear_without_interference() {
        let params = ChannelParams::new(1.0, 1.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let dist = rect_dist(1.0, 1.0, 0.5, PdfKind::Approximate);
        let config = NetworkConfig::new(2, dist).unwrap();
        let profile =
            mu_vs_density_profile(&config, &params, Point2::origin(), &[11, 21, 41], &spec())
                .unwrap();
        let base = profile[0].1 / 10.0;
        assert_eq!(profile[1].1, base * 20.0);
        assert_eq!(profile[2].1, base * 40.0);
    }
}
