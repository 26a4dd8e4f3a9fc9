//! Path loss, the interference Laplace transform, and the SINR connection
//! probability for arbitrary receiver positions, with closed forms for a
//! receiver at the centre of a disk.

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point2};
use crate::numerics::{
    hyp2f1, integrate_1d, integrate_2d_polar, MonotoneCubic, QuadratureSpec,
};
use crate::rwpm::StationaryDistribution;
use crate::scalar::Real;
use rayon::prelude::*;

/// Transmission and channel parameters.
///
/// `gamma` scales the aggregate co-channel interference (0 = orthogonal
/// channels, 1 = full reuse); `epsilon` keeps the path loss non-singular;
/// `threshold` is the SINR decoding threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams<F> {
    pub power: F,
    pub noise: F,
    pub eta: F,
    pub epsilon: F,
    pub gamma: F,
    pub threshold: F,
}

impl<F: Real> ChannelParams<F> {
    pub fn new(power: F, noise: F, eta: F, epsilon: F, gamma: F, threshold: F) -> Result<Self> {
        if !(power > F::zero()) {
            return Err(Error::InvalidParameter("channel: power must be > 0".into()));
        }
        if !(noise >= F::zero()) {
            return Err(Error::InvalidParameter("channel: noise must be >= 0".into()));
        }
        if !(eta >= F::two()) {
            return Err(Error::InvalidParameter(
                "channel: path-loss exponent must be >= 2".into(),
            ));
        }
        if eta > F::lit(6.0) {
            log::warn!(
                "path-loss exponent {} is outside the usual [2, 6] range",
                eta
            );
        }
        if !(epsilon >= F::zero()) {
            return Err(Error::InvalidParameter(
                "channel: epsilon must be >= 0".into(),
            ));
        }
        if !(F::zero()..=F::one()).contains(&gamma) {
            return Err(Error::InvalidParameter(
                "channel: gamma must lie in [0, 1]".into(),
            ));
        }
        if !(threshold > F::zero()) {
            return Err(Error::InvalidParameter(
                "channel: SINR threshold must be > 0".into(),
            ));
        }
        Ok(ChannelParams {
            power,
            noise,
            eta,
            epsilon,
            gamma,
            threshold,
        })
    }

    /// `epsilon + d^eta`, the reciprocal of the path-loss gain.
    #[inline]
    pub(crate) fn inverse_gain(&self, d: F) -> F {
        self.epsilon + d.powf(self.eta)
    }
}

/// Node count plus the stationary distribution the nodes follow.
#[derive(Clone, Debug)]
pub struct NetworkConfig<F> {
    node_count: usize,
    distribution: StationaryDistribution<F>,
}

impl<F: Real> NetworkConfig<F> {
    pub fn new(node_count: usize, distribution: StationaryDistribution<F>) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::InvalidParameter(
                "network: need at least two nodes".into(),
            ));
        }
        Ok(NetworkConfig {
            node_count,
            distribution,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn distribution(&self) -> &StationaryDistribution<F> {
        &self.distribution
    }

    pub fn domain(&self) -> &ConvexDomain<F> {
        self.distribution.domain()
    }

    /// Node density N / V.
    pub fn density(&self) -> F {
        F::from_usize(self.node_count).unwrap() / self.domain().area()
    }

    pub fn with_node_count(&self, node_count: usize) -> Result<Self> {
        Self::new(node_count, self.distribution.clone())
    }
}

/// Argument of the interference Laplace transform together with the receiver
/// it is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceQuery<F> {
    pub s: F,
    pub receiver: Point2<F>,
}

impl<F: Real> LaplaceQuery<F> {
    /// The transform argument induced by a link of length `d`:
    /// `s = q gamma / (P g(d))`.
    pub fn from_link(params: &ChannelParams<F>, d: F, receiver: Point2<F>) -> Self {
        LaplaceQuery {
            s: params.threshold * params.gamma * params.inverse_gain(d) / params.power,
            receiver,
        }
    }
}

/// Mean path-loss gain `g(d) = 1 / (epsilon + d^eta)`.
pub fn path_loss<F: Real>(d: F, params: &ChannelParams<F>) -> Result<F> {
    if d < F::zero() {
        return Err(Error::InvalidParameter("path loss: d must be >= 0".into()));
    }
    let denom = params.inverse_gain(d);
    if denom == F::zero() {
        return Err(Error::SingularPathLoss);
    }
    Ok(denom.recip())
}

/// Per-node interference saturation integral
/// `J(s) = int_V f(r) * s g(|r - r_j|) / (1 + s g(|r - r_j|)) dr`.
///
/// The aggregate Laplace transform is `exp(-N J(s))`. The integrand peaks at
/// the receiver, so the integral is taken in receiver-centred polar
/// coordinates; a receiver at the centre of a disk reduces to a single
/// radial integral.
pub fn interference_saturation<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    query: &LaplaceQuery<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    let s = query.s;
    if s < F::zero() {
        return Err(Error::InvalidParameter(
            "laplace argument s must be >= 0".into(),
        ));
    }
    if s == F::zero() {
        return Ok(F::zero());
    }
    let dist = config.distribution();
    let domain = dist.domain();
    let eta = params.eta;
    let eps = params.epsilon;
    // s g / (1 + s g) with g = 1/(eps + t^eta) collapses to a saturation that
    // stays finite at t = 0 even when eps = 0
    let saturation = move |t: F| s / (eps + s + t.powf(eta));

    if let ConvexDomain::Disk { radius } = *domain {
        if query.receiver.norm() <= domain.geometric_tolerance() {
            let r = integrate_1d(
                |t: F| dist.pdf_unchecked(&Point2::new(t, F::zero())) * saturation(t) * t,
                F::zero(),
                radius,
                spec,
            )?;
            return Ok(r.value * F::two() * F::PI());
        }
    }
    let receiver = query.receiver;
    let r = integrate_2d_polar(
        domain,
        &receiver,
        |p| {
            let t = p.distance(&receiver);
            dist.pdf_unchecked(&p) * saturation(t)
        },
        spec,
    )?;
    Ok(r.value)
}

/// Laplace transform of the aggregate interference at the query receiver,
/// under the Poisson approximation with intensity `N f`.
pub fn laplace_interference_numeric<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    query: &LaplaceQuery<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    let j = interference_saturation(config, params, query, spec)?;
    let n = F::from_usize(config.node_count()).unwrap();
    Ok((-n * j).exp())
}

/// Closed-form Laplace transform for a receiver at the centre of a disk of
/// radius `radius`, node density `rho`, pause weight `wp`, using the
/// parabolic disk pdf.
///
/// `eta = 2` and `eta = 4` use their elementary forms; other exponents fall
/// back to the hypergeometric expression.
pub fn laplace_disk_center_closed<F: Real>(
    radius: F,
    rho: F,
    wp: F,
    eta: F,
    epsilon: F,
    s: F,
) -> Result<F> {
    if !(F::zero()..=F::one()).contains(&wp) {
        return Err(Error::InvalidParameter("wp must lie in [0, 1]".into()));
    }
    if s < F::zero() {
        return Err(Error::InvalidParameter("s must be >= 0".into()));
    }
    if s == F::zero() {
        return Ok(F::one());
    }
    let c = s + epsilon;
    let r2 = radius * radius;
    let pi = F::PI();
    let exponent = if (eta - F::two()).abs() < F::lit(1e-9) {
        let log_term = (r2 / c).ln_1p();
        let uniform = wp * s * pi * rho * log_term;
        let mobile =
            (F::one() - wp) * F::two() * rho * pi * s / r2 * ((c + r2) * log_term - r2);
        uniform + mobile
    } else if (eta - F::lit(4.0)).abs() < F::lit(1e-9) {
        let sc = c.sqrt();
        let atan_term = (r2 / sc).atan();
        let log_term = (r2 * r2 / c).ln_1p();
        let uniform = wp * s * pi * rho / sc * atan_term;
        let mobile = (F::one() - wp)
            * (F::two() * rho * pi * s / sc * atan_term - rho * pi * s / r2 * log_term);
        uniform + mobile
    } else {
        return laplace_disk_center_general(radius, rho, wp, eta, epsilon, s);
    };
    Ok((-exponent).exp())
}

/// The disk-centre Laplace transform in its general hypergeometric form,
/// valid for any path-loss exponent. The elementary specializations above
/// must agree with this route (tested to 1e-8 and better).
pub fn laplace_disk_center_general<F: Real>(
    radius: F,
    rho: F,
    wp: F,
    eta: F,
    epsilon: F,
    s: F,
) -> Result<F> {
    if s < F::zero() {
        return Err(Error::InvalidParameter("s must be >= 0".into()));
    }
    if s == F::zero() {
        return Ok(F::one());
    }
    let c = s + epsilon;
    let r2 = radius * radius;
    let z = -radius.powf(eta) / c;
    let f1 = hyp2f1(F::one(), F::two() / eta, F::two() / eta + F::one(), z)?;
    let f2 = hyp2f1(F::one(), F::lit(4.0) / eta, F::lit(4.0) / eta + F::one(), z)?;
    let prefactor = rho * s * F::PI() * r2 / c;
    let exponent = prefactor * (wp * f1 + (F::one() - wp) * (F::two() * f1 - f2));
    Ok((-exponent).exp())
}

/// Probability that a transmission over distance `d` is decoded at
/// `receiver`, averaged over Rayleigh fading and interferer placement:
/// the noise factor times the interference Laplace transform.
pub fn connection_probability<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    d: F,
    receiver: Point2<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    // evaluate the gain so a singular configuration errors per contract
    let _gain = path_loss(d, params)?;
    let inv_gain = params.inverse_gain(d);
    let noise_exponent = params.threshold * params.noise * inv_gain / params.power;
    let laplace = if params.gamma == F::zero() {
        F::one()
    } else {
        let query = LaplaceQuery::from_link(params, d, receiver);
        laplace_interference_numeric(config, params, &query, spec)?
    };
    Ok((-noise_exponent).exp() * laplace)
}

/// Deterministic unit-disk link model: connected iff `d < threshold_radius`.
/// This is the `gamma = 0`, `eta -> inf` limit of the SINR model.
pub fn unit_disk_probability<F: Real>(d: F, threshold_radius: F) -> F {
    if d < threshold_radius {
        F::one()
    } else {
        F::zero()
    }
}

/// Number of log-spaced points in a Laplace cache.
pub const LAPLACE_CACHE_POINTS: usize = 256;

/// Receiver-specific cache of the interference saturation integral on a
/// log-spaced `s` grid with monotone cubic interpolation.
///
/// The cached quantity is per-node, so one cache serves every node count;
/// the transform for `n` nodes is `exp(-n J(s))`. Immutable once built;
/// concurrent readers are fine.
#[derive(Clone, Debug)]
pub struct LaplaceCache<F> {
    params: ChannelParams<F>,
    receiver: Point2<F>,
    node_count: usize,
    /// ln J over ln s; `None` when gamma = 0 and interference vanishes.
    interp: Option<MonotoneCubic<F>>,
}

impl<F: Real> LaplaceCache<F> {
    /// Builds the cache by evaluating the saturation integral at
    /// [`LAPLACE_CACHE_POINTS`] log-spaced arguments spanning link distances
    /// from `1e-6` diameters up to the full diameter.
    pub fn build(
        config: &NetworkConfig<F>,
        params: &ChannelParams<F>,
        receiver: Point2<F>,
        spec: &QuadratureSpec<F>,
    ) -> Result<Self> {
        if !config.domain().contains_with_tolerance(&receiver) {
            return Err(Error::OutsideDomain {
                x: receiver.x.as_f64(),
                y: receiver.y.as_f64(),
            });
        }
        if params.gamma == F::zero() {
            return Ok(LaplaceCache {
                params: *params,
                receiver,
                node_count: config.node_count(),
                interp: None,
            });
        }
        let diam = config.domain().diameter();
        let scale = params.threshold * params.gamma / params.power;
        let s_floor = scale * params.inverse_gain(diam * F::lit(1e-6));
        let s_max = scale * params.inverse_gain(diam);
        let lo = s_floor.ln();
        let hi = s_max.ln();
        let n = LAPLACE_CACHE_POINTS;
        let step = (hi - lo) / F::from_usize(n - 1).unwrap();

        let ln_j: Vec<F> = (0..n)
            .into_par_iter()
            .map(|i| {
                let s = (lo + step * F::from_usize(i).unwrap()).exp();
                let query = LaplaceQuery {
                    s,
                    receiver,
                };
                interference_saturation(config, params, &query, spec).map(|j| j.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        let ln_s: Vec<F> = (0..n)
            .map(|i| lo + step * F::from_usize(i).unwrap())
            .collect();
        Ok(LaplaceCache {
            params: *params,
            receiver,
            node_count: config.node_count(),
            interp: Some(MonotoneCubic::new(ln_s, ln_j)?),
        })
    }

    pub fn receiver(&self) -> Point2<F> {
        self.receiver
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Interpolated per-node saturation integral J(s).
    ///
    /// Below the grid floor the interpolant extrapolates linearly in
    /// log-log space, matching the power-law decay of J as s -> 0.
    pub fn saturation(&self, s: F) -> F {
        match &self.interp {
            None => F::zero(),
            Some(interp) => {
                if s <= F::zero() {
                    F::zero()
                } else {
                    interp.eval(s.ln()).exp()
                }
            }
        }
    }

    /// Laplace transform for the cached receiver at `n` nodes.
    pub fn laplace(&self, s: F, node_count: usize) -> F {
        let n = F::from_usize(node_count).unwrap();
        (-n * self.saturation(s)).exp()
    }

    /// Connection probability over distance `d` using the cached transform
    /// and the cache's node count.
    pub fn connection_probability(&self, d: F) -> F {
        self.connection_probability_with_nodes(d, self.node_count)
    }

    /// Connection probability over distance `d` for an explicit node count.
    pub fn connection_probability_with_nodes(&self, d: F, node_count: usize) -> F {
        let inv_gain = self.params.inverse_gain(d);
        let noise_exponent =
            self.params.threshold * self.params.noise * inv_gain / self.params.power;
        let s = self.params.threshold * self.params.gamma * inv_gain / self.params.power;
        (-noise_exponent).exp() * self.laplace(s, node_count)
    }
}
