//! Convex planar domains (rectangle, disk) and the boundary-ray queries the
//! mobility integrals are built on.
//!
//! Coordinates are domain-centred: the rectangle is `[-a, a] x [-b, b]`, the
//! disk is centred at the origin.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative geometric tolerance, in units of the domain diameter.
const GEOMETRIC_TOLERANCE: f64 = 1e-12;

/// A point in domain-centred Cartesian coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> Point2<F> {
    #[inline]
    pub fn new(x: F, y: F) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn origin() -> Self {
        Point2 {
            x: F::zero(),
            y: F::zero(),
        }
    }

    #[inline]
    pub fn distance(&self, other: &Self) -> F {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    #[inline]
    pub fn norm(&self) -> F {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    /// `self + t * dir`.
    #[inline]
    pub fn offset(&self, dir: (F, F), t: F) -> Self {
        Point2 {
            x: self.x + t * dir.0,
            y: self.y + t * dir.1,
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// The two pieces a chord is split into by an interior point: `a1` forward
/// along the chord direction, `a2` backward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordSplit<F> {
    pub a1: F,
    pub a2: F,
}

impl<F: Real> ChordSplit<F> {
    #[inline]
    pub fn chord_length(&self) -> F {
        self.a1 + self.a2
    }
}

/// A convex domain: origin-centred rectangle or disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvexDomain<F> {
    Rectangle { half_width: F, half_height: F },
    Disk { radius: F },
}

impl<F: Real> ConvexDomain<F> {
    /// Rectangle `[-a, a] x [-b, b]` with `a >= b > 0`.
    pub fn rectangle(half_width: F, half_height: F) -> Result<Self> {
        if !(half_height > F::zero()) || !half_width.is_finite() || !half_height.is_finite() {
            return Err(Error::InvalidParameter(
                "rectangle: half_height must be positive and finite".into(),
            ));
        }
        if half_width < half_height {
            return Err(Error::InvalidParameter(
                "rectangle: half_width must be >= half_height".into(),
            ));
        }
        Ok(ConvexDomain::Rectangle {
            half_width,
            half_height,
        })
    }

    /// Disk of the given radius, centred at the origin.
    pub fn disk(radius: F) -> Result<Self> {
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(
                "disk: radius must be positive and finite".into(),
            ));
        }
        Ok(ConvexDomain::Disk { radius })
    }

    pub fn area(&self) -> F {
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => F::lit(4.0) * half_width * half_height,
            ConvexDomain::Disk { radius } => F::PI() * radius * radius,
        }
    }

    pub fn diameter(&self) -> F {
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => F::two() * (half_width * half_width + half_height * half_height).sqrt(),
            ConvexDomain::Disk { radius } => F::two() * radius,
        }
    }

    /// Absolute tolerance used by boundary tests: 1e-12 of the diameter.
    pub fn geometric_tolerance(&self) -> F {
        F::lit(GEOMETRIC_TOLERANCE) * self.diameter()
    }

    /// Closed-domain membership.
    pub fn contains(&self, p: &Point2<F>) -> bool {
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => p.x.abs() <= half_width && p.y.abs() <= half_height,
            ConvexDomain::Disk { radius } => p.x * p.x + p.y * p.y <= radius * radius,
        }
    }

    /// Membership up to the geometric tolerance; boundary receivers produced
    /// by floating arithmetic must not be rejected.
    pub fn contains_with_tolerance(&self, p: &Point2<F>) -> bool {
        let tol = self.geometric_tolerance();
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => p.x.abs() <= half_width + tol && p.y.abs() <= half_height + tol,
            ConvexDomain::Disk { radius } => p.norm() <= radius + tol,
        }
    }

    fn check_inside(&self, p: &Point2<F>) -> Result<()> {
        if self.contains_with_tolerance(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            })
        }
    }

    /// Distance from `p` to the boundary along the unit direction `dir`
    /// (the exit distance of the ray).
    ///
    /// `p` must lie in the closed domain; points within the geometric
    /// tolerance of the boundary are accepted and clamped to a zero result
    /// for outward rays.
    pub fn boundary_distance(&self, p: &Point2<F>, dir: (F, F)) -> Result<F> {
        self.check_inside(p)?;
        Ok(self.exit_distance(p, dir))
    }

    /// Exit distance without the membership check; quadrature inner loops
    /// call this with points already known to be inside.
    #[inline]
    pub(crate) fn exit_distance(&self, p: &Point2<F>, dir: (F, F)) -> F {
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => {
                let mut t = F::infinity();
                if dir.0 > F::zero() {
                    t = t.min((half_width - p.x) / dir.0);
                } else if dir.0 < F::zero() {
                    t = t.min((-half_width - p.x) / dir.0);
                }
                if dir.1 > F::zero() {
                    t = t.min((half_height - p.y) / dir.1);
                } else if dir.1 < F::zero() {
                    t = t.min((-half_height - p.y) / dir.1);
                }
                if t.is_finite() {
                    t.max(F::zero())
                } else {
                    // zero direction: degenerate ray
                    F::zero()
                }
            }
            ConvexDomain::Disk { radius } => {
                // |p + t dir|^2 = R^2, larger root
                let b = p.x * dir.0 + p.y * dir.1;
                let c = p.x * p.x + p.y * p.y - radius * radius;
                let disc = b * b - c;
                if disc <= F::zero() {
                    return F::zero();
                }
                (-b + disc.sqrt()).max(F::zero())
            }
        }
    }

    /// Splits the chord through `p` with direction angle `phi` into its
    /// forward (`a1`) and backward (`a2`) pieces.
    pub fn chord_split(&self, p: &Point2<F>, phi: F) -> Result<ChordSplit<F>> {
        self.check_inside(p)?;
        let (sin, cos) = phi.sin_cos();
        let a1 = self.exit_distance(p, (cos, sin));
        let a2 = self.exit_distance(p, (-cos, -sin));
        Ok(ChordSplit { a1, a2 })
    }

    /// Half-widths of the axis-aligned bounding box (used by samplers).
    pub fn bounding_half_widths(&self) -> (F, F) {
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => (half_width, half_height),
            ConvexDomain::Disk { radius } => (radius, radius),
        }
    }

    /// Area of the intersection of this domain with the disk of radius
    /// `radius` centred at `center`. Exact circular-segment decomposition,
    /// no quadrature.
    pub fn disk_intersection_area(&self, center: &Point2<F>, radius: F) -> F {
        match *self {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => {
                // shift so the circle sits at the origin
                let x1 = -half_width - center.x;
                let x2 = half_width - center.x;
                let y1 = -half_height - center.y;
                let y2 = half_height - center.y;
                (quarter_plane_disk_area(radius, x2, y2) - quarter_plane_disk_area(radius, x1, y2)
                    - quarter_plane_disk_area(radius, x2, y1)
                    + quarter_plane_disk_area(radius, x1, y1))
                .max(F::zero())
            }
            ConvexDomain::Disk { radius: dom_r } => {
                circle_circle_intersection_area(dom_r, radius, center.norm())
            }
        }
    }
}

/// `int_{-rho}^{min(x, rho)} sqrt(rho^2 - t^2) dt`.
fn circ_area_below<F: Real>(rho: F, x: F) -> F {
    let x = x.max(-rho).min(rho);
    let s = ((rho - x) * (rho + x)).max(F::zero()).sqrt();
    x * s * F::half() + rho * rho * F::half() * ((x / rho).asin() + F::FRAC_PI_2())
}

/// Area of `{x <= bx, y <= by}` intersected with the disk of radius `rho`
/// at the origin.
fn quarter_plane_disk_area<F: Real>(rho: F, bx: F, by: F) -> F {
    if bx <= -rho || by <= -rho {
        return F::zero();
    }
    let xc = bx.min(rho);
    if by >= rho {
        return F::two() * circ_area_below(rho, xc);
    }
    let w = ((rho - by) * (rho + by)).max(F::zero()).sqrt();
    // band |x| < w: vertical extent by + s(x); outside it: 2 s(x) (by >= 0) or 0
    let mut area = F::zero();
    if by >= F::zero() {
        area = area + F::two() * circ_area_below(rho, xc.min(-w));
        if xc > w {
            area = area + F::two() * (circ_area_below(rho, xc) - circ_area_below(rho, w));
        }
    }
    if xc > -w {
        let u = xc.min(w);
        area = area + by * (u + w) + circ_area_below(rho, u) - circ_area_below(rho, -w);
    }
    area.max(F::zero())
}

/// Lens area of two circles of radii `r1`, `r2` whose centres are `d` apart;
/// the second circle's centre is offset, the first sits at the origin.
fn circle_circle_intersection_area<F: Real>(r1: F, r2: F, d: F) -> F {
    if d >= r1 + r2 {
        return F::zero();
    }
    let rmin = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return F::PI() * rmin * rmin;
    }
    let d2 = d * d;
    let alpha = ((d2 + r2 * r2 - r1 * r1) / (F::two() * d * r2))
        .max(-F::one())
        .min(F::one())
        .acos();
    let beta = ((d2 + r1 * r1 - r2 * r2) / (F::two() * d * r1))
        .max(-F::one())
        .min(F::one())
        .acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r2 * r2 * alpha + r1 * r1 * beta - F::half() * k.max(F::zero()).sqrt()
}
