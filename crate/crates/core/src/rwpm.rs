//! Stationary spatial distribution of random-waypoint nodes: mean leg
//! length, exact and approximate densities, and the pause-probability
//! mixture.

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point2};
use crate::numerics::{
    complete_elliptic_e, integrate_1d, integrate_box, integrate_radial, QuadratureSpec,
};
use crate::scalar::Real;
use std::cell::Cell;

/// Speed and think-time parameters of the waypoint process.
///
/// Speeds are uniform on `[v_min, k * v_min]`; pauses are uniform on
/// `[0, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobilityParams<F> {
    pub v_min: F,
    pub speed_ratio: F,
    pub t_max: F,
}

impl<F: Real> MobilityParams<F> {
    pub fn new(v_min: F, speed_ratio: F, t_max: F) -> Result<Self> {
        if !(v_min > F::zero()) {
            return Err(Error::InvalidParameter("mobility: v_min must be > 0".into()));
        }
        if !(speed_ratio >= F::one()) {
            return Err(Error::InvalidParameter(
                "mobility: speed ratio k must be >= 1".into(),
            ));
        }
        if !(t_max >= F::zero()) {
            return Err(Error::InvalidParameter("mobility: t_max must be >= 0".into()));
        }
        Ok(MobilityParams {
            v_min,
            speed_ratio,
            t_max,
        })
    }

    pub fn v_max(&self) -> F {
        self.speed_ratio * self.v_min
    }
}

/// Long-run leg and pause statistics of a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegStatistics<F> {
    pub mean_leg_length: F,
    pub mean_leg_time: F,
    pub mean_pause_time: F,
    pub pause_probability: F,
}

impl<F: Real> LegStatistics<F> {
    /// Statistics from a known mean leg length.
    ///
    /// The mean leg time is `ln(k)/(k-1) * l/v_min`, continued analytically
    /// to `l/v_min` at `k = 1`; the mean pause is `t_max/2` for the uniform
    /// pause draw.
    pub fn from_mean_leg(mean_leg_length: F, mobility: &MobilityParams<F>) -> Self {
        let k1 = mobility.speed_ratio - F::one();
        let speed_factor = if k1.abs() < F::lit(1e-9) {
            // ln(k)/(k-1) -> 1 - (k-1)/2 + ...
            F::one() - k1 * F::half()
        } else {
            k1.ln_1p() / k1
        };
        let mean_leg_time = speed_factor * mean_leg_length / mobility.v_min;
        let mean_pause_time = mobility.t_max * F::half();
        let pause_probability = if mean_pause_time == F::zero() {
            F::zero()
        } else {
            mean_pause_time / (mean_pause_time + mean_leg_time)
        };
        LegStatistics {
            mean_leg_length,
            mean_leg_time,
            mean_pause_time,
            pause_probability,
        }
    }
}

/// Leg and pause statistics for nodes roaming `domain`; the mean leg length
/// is obtained from the chord-moment quadrature.
pub fn leg_statistics<F: Real>(
    domain: &ConvexDomain<F>,
    mobility: &MobilityParams<F>,
    spec: &QuadratureSpec<F>,
) -> Result<LegStatistics<F>> {
    let mean_leg = mean_leg_length_numeric(domain, spec)?;
    Ok(LegStatistics::from_mean_leg(mean_leg, mobility))
}

/// Angular chord-moment integral `int_0^pi a1 a2 (a1 + a2) dphi` at `p`.
///
/// This is the unnormalized mobile density: dividing by `l * V^2` yields the
/// stationary pdf of a moving node. For rectangles the integrand has corner
/// kinks, so the integral is split at the four critical angles.
pub fn pdf_kernel_integral<F: Real>(
    domain: &ConvexDomain<F>,
    p: &Point2<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    let integrand = |phi: F| {
        let (sin, cos) = phi.sin_cos();
        let a1 = domain.exit_distance(p, (cos, sin));
        let a2 = domain.exit_distance(p, (-cos, -sin));
        a1 * a2 * (a1 + a2)
    };
    match *domain {
        ConvexDomain::Rectangle {
            half_width: a,
            half_height: b,
        } => {
            if !domain.contains_with_tolerance(p) {
                return Err(Error::OutsideDomain {
                    x: p.x.as_f64(),
                    y: p.y.as_f64(),
                });
            }
            // angles where the forward/backward ray sweeps past a corner
            let mut cuts = [
                (b - p.y).atan2(a - p.x),
                (b - p.y).atan2(-a - p.x),
                (b + p.y).atan2(a + p.x),
                (b + p.y).atan2(p.x - a),
            ];
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut total = F::zero();
            let mut err = F::zero();
            let mut evals = 0usize;
            let mut lo = F::zero();
            for cut in cuts.into_iter().chain([F::PI()]) {
                let hi = cut.max(lo).min(F::PI());
                if hi > lo {
                    let r = integrate_1d(integrand, lo, hi, spec)?;
                    total = total + r.value;
                    err = err + r.error_estimate;
                    evals += r.evaluations;
                    lo = hi;
                }
            }
            let _ = (err, evals);
            Ok(total)
        }
        ConvexDomain::Disk { .. } => {
            if !domain.contains_with_tolerance(p) {
                return Err(Error::OutsideDomain {
                    x: p.x.as_f64(),
                    y: p.y.as_f64(),
                });
            }
            Ok(integrate_1d(integrand, F::zero(), F::PI(), spec)?.value)
        }
    }
}

/// Mean leg length by direct quadrature of the chord moment over the domain.
///
/// This is the ground-truth value used everywhere downstream.
pub fn mean_leg_length_numeric<F: Real>(
    domain: &ConvexDomain<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * F::lit(0.01),
        abs_tol: spec.abs_tol,
        max_subdivisions: spec.max_subdivisions,
    };
    let v = domain.area();
    match *domain {
        ConvexDomain::Rectangle {
            half_width: a,
            half_height: b,
        } => {
            let failure: Cell<Option<Error>> = Cell::new(None);
            // the integrand is symmetric under both axis reflections
            let quarter = integrate_box(
                |x, y| match pdf_kernel_integral(domain, &Point2::new(x, y), &inner_spec) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.set(Some(e));
                        F::zero()
                    }
                },
                (F::zero(), a),
                (F::zero(), b),
                spec,
            )?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(F::lit(4.0) * quarter.value / (v * v))
        }
        ConvexDomain::Disk { radius } => {
            let failure: Cell<Option<Error>> = Cell::new(None);
            let integral = integrate_radial(
                radius,
                |r| match pdf_kernel_integral(domain, &Point2::new(r, F::zero()), &inner_spec) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.set(Some(e));
                        F::zero()
                    }
                },
                spec,
            )?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(integral.value / (v * v))
        }
    }
}

/// Mean leg length of a `2a x 2b` rectangle as the published closed form
/// prints it, with `d = 2 sqrt(a^2 + b^2)`.
///
/// The printed expression is dimensionally consistent but does not agree
/// with the chord-moment quadrature (it even goes negative for the unit
/// square); it is kept verbatim for the closed-form audit and
/// [`mean_leg_length_numeric`] remains the ground truth.
pub fn mean_leg_length_rect_closed<F: Real>(a: F, b: F) -> F {
    let d = F::two() * (a * a + b * b).sqrt();
    let three = F::lit(3.0);
    let six = F::lit(6.0);
    let fifteen = F::lit(15.0);
    d / three
        + a * a / (six * b) * ((d + b) / a).ln()
        - b * b / (six * a) * ((d - a) / b).ln()
        + (a * a * a - d * d * d) / (fifteen * b * b)
        + (b * b * b - d * d * d) / (fifteen * a * a)
}

/// Mobile-node pdf by direct quadrature of the chord moment.
///
/// `mean_leg` is the mean leg length of the same domain; passing the value
/// explicitly lets callers share one quadrature across many evaluations.
pub fn pdf_mobile_numeric<F: Real>(
    domain: &ConvexDomain<F>,
    p: &Point2<F>,
    mean_leg: F,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    let v = domain.area();
    Ok(pdf_kernel_integral(domain, p, spec)? / (mean_leg * v * v))
}

/// Closed form of the chord-moment integral on the first-quadrant cell above
/// the scaled diagonal (`y/b >= x/a`), obtained by integrating the five
/// wall-pair angle sectors.
///
/// Difference logarithms are evaluated through `(d - p) = u^2 / (d + p)`
/// identities so the expression stays finite to within a nudge of the
/// boundary.
fn rect_cell_kernel_closed<F: Real>(a: F, b: F, x: F, y: F) -> F {
    let p = a - x;
    let q = a + x;
    let u = b - y;
    let v = b + y;
    let d1 = (p * p + u * u).sqrt();
    let d2 = (q * q + v * v).sqrt();
    let d3 = (p * p + v * v).sqrt();
    let d4 = (q * q + u * u).sqrt();

    let pq_chord = p * q * (p + q);
    let s1 = pq_chord * (u * d1 / (p * p) + ((d1 + u) / p).ln()) * F::half();
    let s5 = pq_chord * (u * d4 / (q * q) + ((d4 + u) / q).ln()) * F::half();
    let s2 = u * u * q * ((((d2 + v) / q).ln() - d2 / v) - (((d1 + u) / p).ln() - d1 / u))
        + u * q * q * ((d2 / q + (v / (d2 + q)).ln()) - (d1 / p + (u / (d1 + p)).ln()));
    let s4 = u * u * p * ((((d3 + v) / p).ln() - d3 / v) - (((d4 + u) / q).ln() - d4 / u))
        + u * p * p * ((d3 / p + (v / (d3 + p)).ln()) - (d4 / q + (u / (d4 + q)).ln()));
    let s3 = b
        * u
        * v
        * ((p * d3 / (v * v) + ((d3 + p) / v).ln()) - (-q * d2 / (v * v) + (v / (d2 + q)).ln()));
    s1 + s2 + s3 + s4 + s5
}

/// Exact stationary pdf of a mobile node in the rectangle `[-a,a] x [-b,b]`.
///
/// The point is folded into the first quadrant; points below the scaled
/// diagonal are evaluated with the axes swapped, which is the reflection
/// symmetry the eight elementary cells of the rectangle generate. Points on
/// (or outside) the boundary are nudged `1e-9 * min(a, b)` into the interior,
/// where the pdf limit is taken.
pub fn pdf_mobile_rect_exact<F: Real>(a: F, b: F, mean_leg: F, p: &Point2<F>) -> F {
    let delta = F::lit(1e-9) * a.min(b);
    let x = p.x.abs().min(a - delta);
    let y = p.y.abs().min(b - delta);
    let kernel = if y * a >= x * b {
        rect_cell_kernel_closed(a, b, x, y)
    } else {
        rect_cell_kernel_closed(b, a, y, x)
    };
    let v = F::lit(4.0) * a * b;
    kernel / (mean_leg * v * v)
}

/// Polynomial approximation of the rectangle pdf.
pub fn pdf_mobile_rect_approx<F: Real>(a: F, b: F, p: &Point2<F>) -> F {
    let c = F::lit(9.0 / 16.0) / (a * a * a * b * b * b);
    c * (p.x * p.x - a * a) * (p.y * p.y - b * b)
}

/// Exact mobile pdf of the disk at radial distance `r`, evaluated with the
/// 1-D quadrature of its angular integral.
pub fn pdf_mobile_disk_exact<F: Real>(
    radius: F,
    r: F,
    mean_leg: F,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    if r > radius || r < F::zero() {
        return Err(Error::OutsideDomain {
            x: r.as_f64(),
            y: 0.0,
        });
    }
    let angular = integrate_1d(
        |phi: F| {
            let c = phi.cos();
            (radius * radius - r * r * c * c).max(F::zero()).sqrt()
        },
        F::zero(),
        F::PI(),
        spec,
    )?
    .value;
    let v = F::PI() * radius * radius;
    Ok(F::two() * (radius * radius - r * r) * angular / (mean_leg * v * v))
}

/// The same angular integral in closed form, `2 R E(r/R)`; used by the
/// stationary distribution's hot path. Agrees with the quadrature route to
/// full precision (tested).
fn disk_angular_kernel<F: Real>(radius: F, r: F) -> F {
    F::two() * radius * complete_elliptic_e(r / radius)
}

/// Parabolic approximation of the disk pdf.
pub fn pdf_mobile_disk_approx<F: Real>(radius: F, r: F) -> F {
    let rr = r / radius;
    F::two() / (F::PI() * radius * radius) * (F::one() - rr * rr)
}

/// Mean leg length of the disk obtained by normalizing the exact disk pdf
/// (integrating its unnormalized form over the domain).
pub fn disk_mean_leg_from_pdf<F: Real>(radius: F, spec: &QuadratureSpec<F>) -> Result<F> {
    let v = F::PI() * radius * radius;
    let integral = integrate_radial(
        radius,
        |r| {
            let angular = F::two() * (radius * radius - r * r) * disk_angular_kernel(radius, r);
            angular / (v * v)
        },
        spec,
    )?;
    Ok(integral.value)
}

/// Which mobile-pdf variant a distribution evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdfKind {
    Exact,
    Approximate,
}

/// The stationary mixture `wp / V + (1 - wp) f_m(r)` of paused and mobile
/// nodes. Immutable after construction, including the cached mean leg
/// length; evaluation is pure.
#[derive(Clone, Debug)]
pub struct StationaryDistribution<F> {
    domain: ConvexDomain<F>,
    pause_probability: F,
    kind: PdfKind,
    mean_leg_length: F,
}

impl<F: Real> StationaryDistribution<F> {
    /// Builds the distribution, computing and caching the mean leg length
    /// (normalization route for the exact disk pdf, chord-moment quadrature
    /// otherwise).
    pub fn new(
        domain: ConvexDomain<F>,
        pause_probability: F,
        kind: PdfKind,
        spec: &QuadratureSpec<F>,
    ) -> Result<Self> {
        if !(F::zero()..=F::one()).contains(&pause_probability) {
            return Err(Error::InvalidParameter(
                "pause probability must lie in [0, 1]".into(),
            ));
        }
        let mean_leg_length = match (&domain, kind) {
            (ConvexDomain::Disk { radius }, PdfKind::Exact) => {
                disk_mean_leg_from_pdf(*radius, spec)?
            }
            _ => mean_leg_length_numeric(&domain, spec)?,
        };
        Ok(StationaryDistribution {
            domain,
            pause_probability,
            kind,
            mean_leg_length,
        })
    }

    /// Derives the distribution from mobility parameters, returning the leg
    /// statistics that produced the pause probability.
    pub fn from_mobility(
        domain: ConvexDomain<F>,
        mobility: &MobilityParams<F>,
        kind: PdfKind,
        spec: &QuadratureSpec<F>,
    ) -> Result<(Self, LegStatistics<F>)> {
        let mut dist = Self::new(domain, F::zero(), kind, spec)?;
        let stats = LegStatistics::from_mean_leg(dist.mean_leg_length, mobility);
        dist.pause_probability = stats.pause_probability;
        Ok((dist, stats))
    }

    /// Same domain and pdf kind with a different pause weight; reuses the
    /// cached mean leg length.
    pub fn with_pause_probability(&self, pause_probability: F) -> Result<Self> {
        if !(F::zero()..=F::one()).contains(&pause_probability) {
            return Err(Error::InvalidParameter(
                "pause probability must lie in [0, 1]".into(),
            ));
        }
        Ok(StationaryDistribution {
            pause_probability,
            ..self.clone()
        })
    }

    pub fn domain(&self) -> &ConvexDomain<F> {
        &self.domain
    }

    pub fn pause_probability(&self) -> F {
        self.pause_probability
    }

    pub fn kind(&self) -> PdfKind {
        self.kind
    }

    pub fn mean_leg_length(&self) -> F {
        self.mean_leg_length
    }

    /// Density of the uniform (paused) component.
    pub fn uniform_density(&self) -> F {
        F::one() / self.domain.area()
    }

    /// Mobile-component pdf at `p`.
    pub fn mobile_pdf(&self, p: &Point2<F>) -> Result<F> {
        if !self.domain.contains_with_tolerance(p) {
            return Err(Error::OutsideDomain {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            });
        }
        Ok(self.mobile_pdf_unchecked(p))
    }

    /// Mobile pdf without the membership test; quadrature loops call this on
    /// points generated inside the domain.
    #[inline]
    pub(crate) fn mobile_pdf_unchecked(&self, p: &Point2<F>) -> F {
        match (&self.domain, self.kind) {
            (
                ConvexDomain::Rectangle {
                    half_width,
                    half_height,
                },
                PdfKind::Exact,
            ) => pdf_mobile_rect_exact(*half_width, *half_height, self.mean_leg_length, p),
            (
                ConvexDomain::Rectangle {
                    half_width,
                    half_height,
                },
                PdfKind::Approximate,
            ) => pdf_mobile_rect_approx(*half_width, *half_height, p),
            (ConvexDomain::Disk { radius }, PdfKind::Exact) => {
                let r = p.norm().min(*radius);
                let v = F::PI() * *radius * *radius;
                F::two() * (*radius * *radius - r * r) * disk_angular_kernel(*radius, r)
                    / (self.mean_leg_length * v * v)
            }
            (ConvexDomain::Disk { radius }, PdfKind::Approximate) => {
                pdf_mobile_disk_approx(*radius, p.norm())
            }
        }
    }

    /// Stationary pdf at `p`: the pause/mobile mixture.
    pub fn pdf(&self, p: &Point2<F>) -> Result<F> {
        if !self.domain.contains_with_tolerance(p) {
            return Err(Error::OutsideDomain {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            });
        }
        Ok(self.pdf_unchecked(p))
    }

    #[inline]
    pub(crate) fn pdf_unchecked(&self, p: &Point2<F>) -> F {
        let wp = self.pause_probability;
        wp * self.uniform_density() + (F::one() - wp) * self.mobile_pdf_unchecked(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_2d;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    // closed-form mean leg lengths for uniformly random point pairs,
    // evaluated independently (diagonal/log form for the 2a x 2b rectangle,
    // 128 R / 45 pi for the disk); cross-checked below by Monte Carlo
    const LBAR_RECT_1_1: f64 = 1.0428108663294413;
    const LBAR_RECT_5_2: f64 = 3.8252872057664513;
    const LBAR_RECT_10_10: f64 = 10.428108663294413;

    fn rect(a: f64, b: f64) -> ConvexDomain<f64> {
        ConvexDomain::rectangle(a, b).unwrap()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            max_subdivisions: 512,
        }
    }

    #[test]
    fn mean_leg_disk_matches_exact_constant() {
        let dom = ConvexDomain::disk(1.0).unwrap();
        let l = mean_leg_length_numeric(&dom, &spec()).unwrap();
        assert_relative_eq!(l, 128.0 / (45.0 * PI), max_relative = 1e-8);
        // scaling: homogeneous of degree one in lengths
        let dom2 = ConvexDomain::disk(2.0).unwrap();
        let l2 = mean_leg_length_numeric(&dom2, &spec()).unwrap();
        assert_relative_eq!(l2, 2.0 * l, max_relative = 1e-8);
    }

    #[test]
    fn mean_leg_rect_matches_reference_and_monte_carlo() {
        let dom = rect(0.5, 0.5);
        let l = mean_leg_length_numeric(&dom, &spec()).unwrap();
        assert_relative_eq!(l, LBAR_RECT_1_1 / 2.0, max_relative = 1e-8);

        // Monte-Carlo oracle: mean distance between uniform point pairs
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000_000usize;
        let mut acc = 0.0f64;
        for _ in 0..n {
            let x1: f64 = rng.gen_range(-0.5..0.5);
            let y1: f64 = rng.gen_range(-0.5..0.5);
            let x2: f64 = rng.gen_range(-0.5..0.5);
            let y2: f64 = rng.gen_range(-0.5..0.5);
            acc += ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt();
        }
        let mc = acc / n as f64;
        // population std of the pair distance is ~0.25; 3 standard errors
        let three_se = 3.0 * 0.25 / (n as f64).sqrt();
        assert!(
            (l - mc).abs() < three_se,
            "numeric {l} vs MC {mc} (3se {three_se})"
        );
    }

    #[test]
    fn rect_closed_form_prints_known_deviation() {
        // verbatim closed form: homogeneity holds, but the printed constants
        // disagree with quadrature (negative for the unit square)
        let c1 = mean_leg_length_rect_closed(1.0, 1.0);
        let c2 = mean_leg_length_rect_closed(2.0, 2.0);
        assert_relative_eq!(c2, 2.0 * c1, max_relative = 1e-12);
        assert!(c1 < 0.0, "printed form is negative for the unit square: {c1}");
        let numeric = LBAR_RECT_10_10;
        let printed = mean_leg_length_rect_closed(10.0, 10.0);
        let deviation = (printed / numeric - 1.0).abs();
        println!("rect closed-form mean leg deviation at a=b=10: {deviation:.3e}");
        assert!(deviation > 1e-3, "expected a reproducible deviation");
    }

    #[test]
    fn leg_statistics_limits() {
        let mob = MobilityParams::new(1.0, 1.0, 0.0).unwrap();
        let stats = LegStatistics::from_mean_leg(3.0, &mob);
        assert_eq!(stats.pause_probability, 0.0);
        assert_relative_eq!(stats.mean_leg_time, 3.0); // k = 1 limit

        // E[T_p] = E[T] -> wp = 1/2
        let mob = MobilityParams::new(1.0, 1.0, 6.0).unwrap();
        let stats = LegStatistics::from_mean_leg(3.0, &mob);
        assert_relative_eq!(stats.pause_probability, 0.5);

        // k > 1 shortens the mean leg time
        let mob = MobilityParams::new(1.0, 2.0, 0.0).unwrap();
        let stats = LegStatistics::from_mean_leg(3.0, &mob);
        assert_relative_eq!(stats.mean_leg_time, 2.0f64.ln() * 3.0, max_relative = 1e-12);
    }

    #[test]
    fn mobility_params_validation() {
        assert!(MobilityParams::new(0.0, 1.0, 0.0).is_err());
        assert!(MobilityParams::new(1.0, 0.5, 0.0).is_err());
        assert!(MobilityParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn numeric_pdf_at_disk_centre() {
        let dom = ConvexDomain::disk(1.0).unwrap();
        let l = 128.0 / (45.0 * PI);
        let f = pdf_mobile_numeric(&dom, &Point2::origin(), l, &spec()).unwrap();
        // every chord through the centre has a1 = a2 = 1, so the kernel
        // integral is 2 pi and f = 2/(l pi) for V = pi
        assert_relative_eq!(f, 2.0 / (l * PI), max_relative = 1e-9);
    }

    #[test]
    fn numeric_pdf_vanishes_at_boundary() {
        let dom = rect(1.0, 1.0);
        let l = LBAR_RECT_1_1;
        let centre = pdf_mobile_numeric(&dom, &Point2::origin(), l, &spec()).unwrap();
        let near_edge =
            pdf_mobile_numeric(&dom, &Point2::new(1.0 - 1e-6, 0.3), l, &spec()).unwrap();
        assert!(near_edge < 1e-3 * centre, "{near_edge} vs {centre}");
    }

    #[test]
    fn numeric_pdf_is_centrally_symmetric() {
        let dom = rect(5.0, 2.0);
        let l = LBAR_RECT_5_2;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-2.0..2.0));
            let f1 = pdf_mobile_numeric(&dom, &p, l, &spec()).unwrap();
            let f2 =
                pdf_mobile_numeric(&dom, &Point2::new(-p.x, -p.y), l, &spec()).unwrap();
            assert_relative_eq!(f1, f2, max_relative = 1e-9);
        }
    }

    #[test]
    fn exact_rect_pdf_matches_quadrature_oracle() {
        for (a, b, l) in [(5.0, 2.0, LBAR_RECT_5_2), (1.0, 1.0, LBAR_RECT_1_1)] {
            let dom = rect(a, b);
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..60 {
                let p = Point2::new(rng.gen_range(-a..a), rng.gen_range(-b..b));
                let numeric = pdf_mobile_numeric(&dom, &p, l, &spec()).unwrap();
                let exact = pdf_mobile_rect_exact(a, b, l, &p);
                assert_relative_eq!(exact, numeric, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn exact_rect_pdf_symmetries_are_exact() {
        let (a, b, l) = (5.0, 2.0, LBAR_RECT_5_2);
        let p = Point2::new(1.3, 0.7);
        let v = pdf_mobile_rect_exact(a, b, l, &p);
        for q in [
            Point2::new(-1.3, 0.7),
            Point2::new(1.3, -0.7),
            Point2::new(-1.3, -0.7),
        ] {
            assert_eq!(v, pdf_mobile_rect_exact(a, b, l, &q));
        }
    }

    #[test]
    fn approx_rect_pdf_values() {
        assert_relative_eq!(
            pdf_mobile_rect_approx(1.0, 1.0, &Point2::origin()),
            9.0 / 16.0
        );
        assert_eq!(pdf_mobile_rect_approx(1.0, 1.0, &Point2::new(1.0, 0.3)), 0.0);
    }

    #[test]
    fn disk_pdfs() {
        let l = 128.0 / (45.0 * PI);
        // boundary zero
        assert_relative_eq!(
            pdf_mobile_disk_exact(1.0, 1.0, l, &spec()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(pdf_mobile_disk_approx(1.0, 1.0), 0.0);
        assert_relative_eq!(pdf_mobile_disk_approx(2.0, 0.0), 2.0 / (PI * 4.0));
        // the quadrature route and the elliptic route agree
        for r in [0.0, 0.3, 0.7, 0.95] {
            let q = pdf_mobile_disk_exact(2.0, r, l, &spec()).unwrap();
            let e = 2.0 * (4.0 - r * r) * disk_angular_kernel(2.0, r) / (l * (PI * 4.0).powi(2));
            assert_relative_eq!(q, e, max_relative = 1e-10);
        }
    }

    #[test]
    fn disk_mean_leg_routes_agree() {
        let eq4 = mean_leg_length_numeric(&ConvexDomain::disk(3.0).unwrap(), &spec()).unwrap();
        let norm = disk_mean_leg_from_pdf(3.0, &spec()).unwrap();
        assert_relative_eq!(eq4, norm, max_relative = 1e-8);
    }

    #[test]
    fn pdf_normalization() {
        let spec2 = QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 400,
        };
        for kind in [PdfKind::Exact, PdfKind::Approximate] {
            for dom in [rect(1.0, 1.0), ConvexDomain::disk(1.0).unwrap()] {
                let dist = StationaryDistribution::new(dom, 0.0, kind, &spec()).unwrap();
                let total = integrate_2d(&dom, |p| dist.pdf_unchecked(&p), &spec2)
                    .unwrap()
                    .value;
                assert_relative_eq!(total, 1.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn mixture_arithmetic() {
        let dom = rect(1.0, 1.0);
        let dist =
            StationaryDistribution::new(dom, 0.5, PdfKind::Approximate, &spec()).unwrap();
        // wp/V + (1-wp) f_approx(0) = 0.5/4 + 0.5 * 9/16
        assert_relative_eq!(
            dist.pdf(&Point2::origin()).unwrap(),
            0.40625,
            max_relative = 1e-13
        );
        let uniform = dist.with_pause_probability(1.0).unwrap();
        assert_relative_eq!(uniform.pdf(&Point2::new(0.9, -0.2)).unwrap(), 0.25);
        let mobile = dist.with_pause_probability(0.0).unwrap();
        assert_relative_eq!(
            mobile.pdf(&Point2::origin()).unwrap(),
            9.0 / 16.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn mixture_stays_between_components() {
        let dom = rect(5.0, 2.0);
        let base = StationaryDistribution::new(dom, 0.0, PdfKind::Exact, &spec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-2.0..2.0));
            let wp: f64 = rng.gen_range(0.0..1.0);
            let dist = base.with_pause_probability(wp).unwrap();
            let f = dist.pdf(&p).unwrap();
            let fm = dist.mobile_pdf(&p).unwrap();
            let fu = dist.uniform_density();
            assert!(f >= fm.min(fu) - 1e-15 && f <= fm.max(fu) + 1e-15);
        }
    }

    #[test]
    fn exact_pdf_unimodal_along_axes() {
        let (a, b, l) = (5.0, 2.0, LBAR_RECT_5_2);
        let mut last = f64::INFINITY;
        for i in 0..101 {
            let x = a * i as f64 / 101.0;
            let v = pdf_mobile_rect_exact(a, b, l, &Point2::new(x, 0.0));
            assert!(v <= last + 1e-12, "pdf rising in |x| at {x}");
            last = v;
        }
        let mut last = f64::INFINITY;
        for i in 0..101 {
            let y = b * i as f64 / 101.0;
            let v = pdf_mobile_rect_exact(a, b, l, &Point2::new(0.0, y));
            assert!(v <= last + 1e-12, "pdf rising in |y| at {y}");
            last = v;
        }
    }

    #[test]
    fn approximation_gap_changes_sign() {
        let (a, b, l) = (1.0, 1.0, LBAR_RECT_1_1);
        let mut signs = (false, false);
        for i in 1..40 {
            for j in 1..40 {
                let p = Point2::new(-a + 2.0 * a * i as f64 / 40.0, -b + 2.0 * b * j as f64 / 40.0);
                let diff = pdf_mobile_rect_approx(a, b, &p) - pdf_mobile_rect_exact(a, b, l, &p);
                if diff > 1e-12 {
                    signs.0 = true;
                }
                if diff < -1e-12 {
                    signs.1 = true;
                }
            }
        }
        assert!(signs.0 && signs.1, "difference surface should change sign");
    }

    #[test]
    fn stationary_distribution_rejects_bad_wp() {
        let dom = rect(1.0, 1.0);
        assert!(StationaryDistribution::new(dom, 1.5, PdfKind::Exact, &spec()).is_err());
        assert!(StationaryDistribution::new(dom, -0.1, PdfKind::Exact, &spec()).is_err());
    }

    #[test]
    fn from_mobility_wires_pause_probability() {
        let dom = ConvexDomain::disk(1.0).unwrap();
        let mob = MobilityParams::new(1.0, 1.0, 2.0 * 128.0 / (45.0 * PI)).unwrap();
        // E[T_p] = t_max/2 = l/v_min = E[T] -> wp = 1/2
        let (dist, stats) =
            StationaryDistribution::from_mobility(dom, &mob, PdfKind::Exact, &spec()).unwrap();
        assert_relative_eq!(stats.pause_probability, 0.5, max_relative = 1e-7);
        assert_relative_eq!(dist.pause_probability(), 0.5, max_relative = 1e-7);
    }
}
