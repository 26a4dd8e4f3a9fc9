//! Property tests for the geometry and special-function invariants.

use proptest::prelude::*;
use rwpnet::geometry::{ConvexDomain, Point2};
use rwpnet::numerics::{erf, hyp2f1, integrate_1d, QuadratureSpec};
use rwpnet::rwpm::{PdfKind, StationaryDistribution};

fn rect_strategy() -> impl Strategy<Value = ConvexDomain<f64>> {
    (0.5f64..8.0, 0.4f64..0.5).prop_map(|(a, frac)| {
        let b = a * (0.2 + frac);
        ConvexDomain::rectangle(a, b).unwrap()
    })
}

fn domain_strategy() -> impl Strategy<Value = ConvexDomain<f64>> {
    prop_oneof![
        rect_strategy(),
        (0.5f64..6.0).prop_map(|r| ConvexDomain::disk(r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chord_pieces_sum_and_endpoints_lie_on_boundary(
        dom in domain_strategy(),
        ux in -1.0f64..1.0,
        uy in -1.0f64..1.0,
        phi in 0.0f64..std::f64::consts::PI,
    ) {
        let (bx, by) = dom.bounding_half_widths();
        let p = Point2::new(ux * bx, uy * by);
        prop_assume!(dom.contains(&p));
        let c = dom.chord_split(&p, phi).unwrap();
        let r = dom.chord_split(&p, phi + std::f64::consts::PI).unwrap();
        // direction reversal swaps the two pieces
        prop_assert!((c.a1 - r.a2).abs() <= 1e-9 * dom.diameter());
        prop_assert!((c.a2 - r.a1).abs() <= 1e-9 * dom.diameter());
        // endpoints satisfy the boundary equation
        let (sin, cos) = phi.sin_cos();
        let tol = 1e-10 * dom.diameter();
        for (t, sgn) in [(c.a1, 1.0), (c.a2, -1.0)] {
            let e = p.offset((sgn * cos, sgn * sin), t);
            let resid = match dom {
                ConvexDomain::Rectangle { half_width, half_height } => {
                    (e.x.abs() - half_width).abs().min((e.y.abs() - half_height).abs())
                }
                ConvexDomain::Disk { radius } => (e.norm() - radius).abs(),
            };
            prop_assert!(resid <= tol, "residual {resid}");
        }
    }

    #[test]
    fn erf_is_odd_and_bounded(x in -30.0f64..30.0) {
        prop_assert_eq!(erf(x), -erf(-x));
        prop_assert!(erf(x) >= -1.0 && erf(x) <= 1.0);
        // strictly inside until the complement falls below one ulp
        if x.abs() <= 5.5 {
            prop_assert!(erf(x).abs() < 1.0);
        }
    }

    #[test]
    fn hypergeometric_identities(x in 1e-3f64..100.0) {
        let log_form = hyp2f1(1.0, 1.0, 2.0, -x).unwrap();
        prop_assert!((log_form - (1.0 + x).ln() / x).abs() <= 1e-10 * log_form.abs());
        let atan_form = hyp2f1(1.0, 0.5, 1.5, -x * x).unwrap();
        prop_assert!((atan_form - x.atan() / x).abs() <= 1e-10 * atan_form.abs());
    }

    #[test]
    fn disk_intersection_area_matches_quadrature(
        dom in domain_strategy(),
        cx in -0.95f64..0.95,
        cy in -0.95f64..0.95,
        radius in 0.1f64..4.0,
    ) {
        let (bx, by) = dom.bounding_half_widths();
        let centre = Point2::new(cx * bx, cy * by);
        prop_assume!(dom.contains(&centre));
        let analytic = dom.disk_intersection_area(&centre, radius);
        // polar oracle: area = int_0^2pi min(exit, radius)^2 / 2 dtheta;
        // the integrand kinks where the circle meets the boundary, which
        // limits the oracle itself to ~1e-5 relative
        let spec = QuadratureSpec { rel_tol: 1e-10, abs_tol: 1e-13, max_subdivisions: 4000 };
        let oracle = integrate_1d(
            |theta: f64| {
                let (sin, cos) = theta.sin_cos();
                let reach = dom
                    .boundary_distance(&centre, (cos, sin))
                    .unwrap()
                    .min(radius);
                reach * reach / 2.0
            },
            0.0,
            2.0 * std::f64::consts::PI,
            &spec,
        )
        .unwrap()
        .value;
        prop_assert!(
            (analytic - oracle).abs() <= 2e-5 * oracle.abs().max(1e-9),
            "analytic {analytic} vs oracle {oracle}"
        );
    }
}

proptest! {
    // the distribution constructor runs a quadrature, keep the case count low
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn mixture_bounded_by_components(
        wp in 0.0f64..1.0,
        px in -0.99f64..0.99,
        py in -0.99f64..0.99,
    ) {
        let dom = ConvexDomain::rectangle(2.0, 1.0).unwrap();
        let spec = QuadratureSpec::default_1d();
        let dist = StationaryDistribution::new(dom, wp, PdfKind::Exact, &spec).unwrap();
        let p = Point2::new(2.0 * px, py);
        let f = dist.pdf(&p).unwrap();
        let fm = dist.mobile_pdf(&p).unwrap();
        let fu = dist.uniform_density();
        prop_assert!(f >= fm.min(fu) - 1e-14);
        prop_assert!(f <= fm.max(fu) + 1e-14);
    }
}
