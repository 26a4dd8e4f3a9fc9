//! Independent stochastic validation: waypoint trajectory simulation,
//! stationary-distribution sampling, and empirical SINR estimates.
//!
//! Everything is seeded; one seed plus one configuration reproduces results
//! bit for bit. Trials derive per-index seeds so parallel execution cannot
//! change the outcome.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{ChannelParams, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point2};
use crate::rwpm::{MobilityParams, StationaryDistribution};
use crate::scalar::Real;

/// Legs discarded per node before trajectory statistics are sampled; the
/// waypoint process starts from a uniform draw and needs burn-in to reach
/// stationarity.
pub const WARMUP_LEGS: usize = 100;

/// Master seed for a reproducible experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Stream for this seed. ChaCha8 keeps the stream identical across
    /// platforms and releases.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for a trial or node index; scheduling order
    /// then cannot affect results.
    pub fn derive(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x9e3779b97f4a7c15))))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// One straight leg of a trajectory and the pause taken at its endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg<F> {
    pub start: Point2<F>,
    pub end: Point2<F>,
    pub speed: F,
    pub pause_after: F,
}

impl<F: Real> Leg<F> {
    pub fn length(&self) -> F {
        self.start.distance(&self.end)
    }

    pub fn travel_time(&self) -> F {
        self.length() / self.speed
    }
}

/// Whether a node is travelling or thinking at a queried instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MotionState {
    Moving,
    Paused,
}

/// A realized waypoint path: consecutive legs with pauses.
#[derive(Clone, Debug)]
pub struct Trajectory<F> {
    legs: Vec<Leg<F>>,
    /// start time of each leg; last entry is the total duration
    starts: Vec<F>,
}

impl<F: Real> Trajectory<F> {
    fn from_legs(legs: Vec<Leg<F>>) -> Self {
        let mut starts = Vec::with_capacity(legs.len() + 1);
        let mut t = F::zero();
        for leg in &legs {
            starts.push(t);
            t = t + leg.travel_time() + leg.pause_after;
        }
        starts.push(t);
        Trajectory { legs, starts }
    }

    pub fn legs(&self) -> &[Leg<F>] {
        &self.legs
    }

    /// Total time covered: travel plus pauses.
    pub fn duration(&self) -> F {
        *self.starts.last().expect("at least one entry")
    }

    /// Time at which the node has completed `n` legs (including the pause
    /// after the n-th); the warmup boundary.
    pub fn time_after_legs(&self, n: usize) -> F {
        self.starts[n.min(self.legs.len())]
    }

    /// Position and motion state at time `t` in `[0, duration]`.
    pub fn position_at(&self, t: F) -> Result<(Point2<F>, MotionState)> {
        if t < F::zero() || t > self.duration() || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "query time {t} outside [0, {}]",
                self.duration()
            )));
        }
        // last leg whose start is <= t
        let idx = match self.starts[..self.legs.len()]
            .binary_search_by(|s| s.partial_cmp(&t).expect("finite times"))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let leg = &self.legs[idx];
        let offset = t - self.starts[idx];
        let travel = leg.travel_time();
        if offset < travel {
            let frac = offset / travel;
            let p = Point2::new(
                leg.start.x + (leg.end.x - leg.start.x) * frac,
                leg.start.y + (leg.end.y - leg.start.y) * frac,
            );
            Ok((p, MotionState::Moving))
        } else {
            Ok((leg.end, MotionState::Paused))
        }
    }
}

/// Uniform draw from the domain (direct, no rejection).
pub fn uniform_point<F: Real>(domain: &ConvexDomain<F>, rng: &mut impl Rng) -> Point2<F> {
    match *domain {
        ConvexDomain::Rectangle {
            half_width,
            half_height,
        } => Point2::new(
            rng.gen_range(-half_width..half_width),
            rng.gen_range(-half_height..half_height),
        ),
        ConvexDomain::Disk { radius } => {
            let r = radius * rng.gen_range(F::zero()..F::one()).sqrt();
            let theta = rng.gen_range(F::zero()..F::two() * F::PI());
            let (sin, cos) = theta.sin_cos();
            Point2::new(r * cos, r * sin)
        }
    }
}

fn exponential_unit_mean<F: Real>(rng: &mut impl Rng) -> F {
    let u: F = rng.gen_range(F::zero()..F::one());
    -(F::one() - u).ln()
}

/// Simulates one node for at least `duration`: uniform waypoints, uniform
/// speed in `[v_min, k v_min]`, uniform pause in `[0, t_max]`.
pub fn simulate_trajectory<F: Real>(
    domain: &ConvexDomain<F>,
    mobility: &MobilityParams<F>,
    duration: F,
    seed: RngSeed,
) -> Trajectory<F> {
    let mut rng = seed.rng();
    simulate_until(domain, mobility, &mut rng, |elapsed, _legs| {
        elapsed >= duration
    })
}

fn simulate_until<F: Real>(
    domain: &ConvexDomain<F>,
    mobility: &MobilityParams<F>,
    rng: &mut impl Rng,
    mut done: impl FnMut(F, usize) -> bool,
) -> Trajectory<F> {
    let mut legs = Vec::new();
    let mut here = uniform_point(domain, rng);
    let mut elapsed = F::zero();
    loop {
        let next = uniform_point(domain, rng);
        let speed = if mobility.speed_ratio == F::one() {
            mobility.v_min
        } else {
            rng.gen_range(mobility.v_min..mobility.v_max())
        };
        let pause = if mobility.t_max > F::zero() {
            rng.gen_range(F::zero()..mobility.t_max)
        } else {
            F::zero()
        };
        let leg = Leg {
            start: here,
            end: next,
            speed,
            pause_after: pause,
        };
        elapsed = elapsed + leg.travel_time() + pause;
        legs.push(leg);
        here = next;
        if done(elapsed, legs.len()) {
            return Trajectory::from_legs(legs);
        }
    }
}

/// Draws one point from the stationary mixture: a uniform point with the
/// pause weight, otherwise a uniform position on a length-biased leg
/// (endpoint pairs accepted with probability `|P1 P2| / diameter`).
fn stationary_point<F: Real>(
    dist: &StationaryDistribution<F>,
    rng: &mut impl Rng,
    stats: Option<&mut SamplerStats>,
) -> Point2<F> {
    let domain = dist.domain();
    if dist.pause_probability() > F::zero()
        && rng.gen_range(F::zero()..F::one()) < dist.pause_probability()
    {
        return uniform_point(domain, rng);
    }
    let diameter = domain.diameter();
    let mut proposed = 0u64;
    loop {
        let p1 = uniform_point(domain, rng);
        let p2 = uniform_point(domain, rng);
        proposed += 1;
        let len = p1.distance(&p2);
        if rng.gen_range(F::zero()..diameter) < len {
            if let Some(stats) = stats {
                stats.proposed_legs += proposed;
                stats.accepted_legs += 1;
            }
            let u = rng.gen_range(F::zero()..F::one());
            return Point2::new(p1.x + (p2.x - p1.x) * u, p1.y + (p2.y - p1.y) * u);
        }
    }
}

/// Acceptance bookkeeping of the leg rejection sampler; the acceptance rate
/// approaches mean-leg-length / diameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplerStats {
    pub proposed_legs: u64,
    pub accepted_legs: u64,
}

impl SamplerStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed_legs == 0 {
            0.0
        } else {
            self.accepted_legs as f64 / self.proposed_legs as f64
        }
    }
}

/// `count` independent draws from the stationary distribution.
pub fn sample_stationary<F: Real>(
    dist: &StationaryDistribution<F>,
    count: usize,
    seed: RngSeed,
) -> Vec<Point2<F>> {
    sample_stationary_with_stats(dist, count, seed).0
}

/// Same, also reporting rejection-sampler acceptance statistics.
pub fn sample_stationary_with_stats<F: Real>(
    dist: &StationaryDistribution<F>,
    count: usize,
    seed: RngSeed,
) -> (Vec<Point2<F>>, SamplerStats) {
    let mut rng = seed.rng();
    let mut stats = SamplerStats::default();
    let points = (0..count)
        .map(|_| stationary_point(dist, &mut rng, Some(&mut stats)))
        .collect();
    (points, stats)
}

/// A Monte-Carlo estimate with its standard error; the 95% confidence
/// interval convention is `value +- 1.96 std_error`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotEstimate<F> {
    pub value: F,
    pub std_error: F,
    pub sample_count: u64,
}

impl<F: Real> SnapshotEstimate<F> {
    /// Whether `target` lies within `k_sigma` standard errors.
    pub fn brackets(&self, target: F, k_sigma: F) -> bool {
        (self.value - target).abs() <= k_sigma * self.std_error
    }
}

fn mean_and_se<F: Real>(values: &[F]) -> SnapshotEstimate<F> {
    let n = F::from_usize(values.len()).unwrap();
    // compensated summation keeps the reduction order-insensitive
    let mut sum = F::zero();
    let mut comp = F::zero();
    for &v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mean = sum / n;
    let mut var = F::zero();
    for &v in values {
        let d = v - mean;
        var = var + d * d;
    }
    let var = if values.len() > 1 {
        var / (n - F::one())
    } else {
        F::zero()
    };
    SnapshotEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
        sample_count: values.len() as u64,
    }
}

/// A warmed-up set of node trajectories with their warmup boundaries.
#[derive(Clone, Debug)]
pub struct TrajectoryEnsemble<F> {
    pub trajectories: Vec<Trajectory<F>>,
    warmup_ends: Vec<F>,
}

/// Simulates `node_count` nodes until each has completed the warmup legs
/// plus `observation_time` of post-warmup motion.
pub fn warmed_ensemble<F: Real>(
    domain: &ConvexDomain<F>,
    mobility: &MobilityParams<F>,
    node_count: usize,
    observation_time: F,
    seed: RngSeed,
) -> TrajectoryEnsemble<F> {
    let trajectories: Vec<Trajectory<F>> = (0..node_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.derive(i as u64).rng();
            let mut warmup_end: Option<F> = None;
            simulate_until(domain, mobility, &mut rng, |elapsed, legs| {
                if legs == WARMUP_LEGS && warmup_end.is_none() {
                    warmup_end = Some(elapsed);
                }
                matches!(warmup_end, Some(w) if elapsed >= w + observation_time)
            })
        })
        .collect();
    let warmup_ends = trajectories
        .iter()
        .map(|t| t.time_after_legs(WARMUP_LEGS))
        .collect();
    TrajectoryEnsemble {
        trajectories,
        warmup_ends,
    }
}

impl<F: Real> TrajectoryEnsemble<F> {
    /// Post-warmup positions at uniformly random sample times, flattened
    /// over nodes. Random epochs avoid phase locking with leg durations.
    pub fn position_samples(&self, samples_per_node: usize, seed: RngSeed) -> Vec<Point2<F>> {
        self.sample(samples_per_node, seed)
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }

    fn sample(&self, samples_per_node: usize, seed: RngSeed) -> Vec<(Point2<F>, MotionState)> {
        self.trajectories
            .par_iter()
            .zip(self.warmup_ends.par_iter())
            .enumerate()
            .map(|(i, (traj, &warm))| {
                let mut rng = seed.derive(i as u64).rng();
                let hi = traj.duration();
                (0..samples_per_node)
                    .map(|_| {
                        let t = rng.gen_range(warm..hi);
                        traj.position_at(t).expect("time inside trajectory")
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect()
    }

    /// Empirical long-run pause probability: the fraction of (node, time)
    /// samples found in the paused state. The standard error is taken over
    /// per-node means, which are independent.
    pub fn empirical_pause_probability(
        &self,
        samples_per_node: usize,
        seed: RngSeed,
    ) -> SnapshotEstimate<F> {
        let per_node: Vec<F> = self
            .trajectories
            .par_iter()
            .zip(self.warmup_ends.par_iter())
            .enumerate()
            .map(|(i, (traj, &warm))| {
                let mut rng = seed.derive(i as u64).rng();
                let hi = traj.duration();
                let mut paused = 0usize;
                for _ in 0..samples_per_node {
                    let t = rng.gen_range(warm..hi);
                    if matches!(
                        traj.position_at(t).expect("time inside trajectory").1,
                        MotionState::Paused
                    ) {
                        paused += 1;
                    }
                }
                F::from_usize(paused).unwrap() / F::from_usize(samples_per_node).unwrap()
            })
            .collect();
        let mut est = mean_and_se(&per_node);
        est.sample_count = (self.trajectories.len() * samples_per_node) as u64;
        est
    }
}

/// Largest link distance for which some direction keeps the transmitter
/// inside the domain.
fn max_link_distance<F: Real>(domain: &ConvexDomain<F>, receiver: &Point2<F>) -> F {
    match *domain {
        ConvexDomain::Rectangle {
            half_width,
            half_height,
        } => {
            let mut best = F::zero();
            for sx in [-F::one(), F::one()] {
                for sy in [-F::one(), F::one()] {
                    let corner = Point2::new(sx * half_width, sy * half_height);
                    best = best.max(receiver.distance(&corner));
                }
            }
            best
        }
        ConvexDomain::Disk { radius } => radius + receiver.norm(),
    }
}

/// Empirical SINR success probability over `trials` independent snapshots:
/// the transmitter sits at distance `d` from the receiver in a uniformly
/// random feasible direction, the other `N - 1` nodes are stationary draws,
/// all channel gains are unit-mean exponentials.
pub fn empirical_connection_probability<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    d: F,
    receiver: Point2<F>,
    trials: usize,
    seed: RngSeed,
) -> Result<SnapshotEstimate<F>> {
    let domain = config.domain();
    if !domain.contains_with_tolerance(&receiver) {
        return Err(Error::OutsideDomain {
            x: receiver.x.as_f64(),
            y: receiver.y.as_f64(),
        });
    }
    if d > max_link_distance(domain, &receiver) {
        return Err(Error::NoTransmitterPlacement {
            distance: d.as_f64(),
            x: receiver.x.as_f64(),
            y: receiver.y.as_f64(),
        });
    }
    let dist = config.distribution();
    let interferers = config.node_count() - 1;
    let outcomes: Vec<F> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seed.derive(trial as u64).rng();
            // transmitter placement: resample the direction until inside
            let mut placed = false;
            for _ in 0..100_000 {
                let theta = rng.gen_range(F::zero()..F::two() * F::PI());
                let (sin, cos) = theta.sin_cos();
                let tx = receiver.offset((cos, sin), d);
                if domain.contains(&tx) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::NoTransmitterPlacement {
                    distance: d.as_f64(),
                    x: receiver.x.as_f64(),
                    y: receiver.y.as_f64(),
                });
            }
            let mut interference = F::zero();
            for _ in 0..interferers {
                let p = stationary_point(dist, &mut rng, None);
                let gain = (params.epsilon + receiver.distance(&p).powf(params.eta)).recip();
                let fading: F = exponential_unit_mean(&mut rng);
                interference = interference + params.power * fading * gain;
            }
            let fading: F = exponential_unit_mean(&mut rng);
            let signal = params.power * fading / params.inverse_gain(d);
            let sinr = signal / (params.noise + params.gamma * interference);
            Ok(if sinr > params.threshold {
                F::one()
            } else {
                F::zero()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut est = mean_and_se(&outcomes);
    // Bernoulli standard error
    let n = F::from_usize(trials).unwrap();
    est.std_error = (est.value * (F::one() - est.value) / n).sqrt();
    Ok(est)
}

/// Empirical spatial density of successful transmissions: drop `N - 1`
/// stationary nodes, draw fadings, and count how many of them individually
/// clear the SINR threshold at the receiver with the remaining `N - 2`
/// acting as interferers.
pub fn empirical_mu<F: Real>(
    config: &NetworkConfig<F>,
    params: &ChannelParams<F>,
    receiver: Point2<F>,
    trials: usize,
    seed: RngSeed,
) -> Result<SnapshotEstimate<F>> {
    let domain = config.domain();
    if !domain.contains_with_tolerance(&receiver) {
        return Err(Error::OutsideDomain {
            x: receiver.x.as_f64(),
            y: receiver.y.as_f64(),
        });
    }
    let dist = config.distribution();
    let candidates = config.node_count() - 1;
    let counts: Vec<F> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seed.derive(trial as u64).rng();
            let mut weights = Vec::with_capacity(candidates);
            let mut total = F::zero();
            for _ in 0..candidates {
                let p = stationary_point(dist, &mut rng, None);
                let gain = (params.epsilon + receiver.distance(&p).powf(params.eta)).recip();
                let fading: F = exponential_unit_mean(&mut rng);
                let w = params.power * fading * gain;
                weights.push(w);
                total = total + w;
            }
            let mut decoded = 0usize;
            for &w in &weights {
                let sinr = w / (params.noise + params.gamma * (total - w));
                if sinr > params.threshold {
                    decoded += 1;
                }
            }
            F::from_usize(decoded).unwrap()
        })
        .collect();
    Ok(mean_and_se(&counts))
}

// ---------------------------------------------------------------------------
// histogram gates used by the validation suites
// ---------------------------------------------------------------------------

/// Result of a binned comparison between samples and an analytic density.
#[derive(Clone, Copy, Debug)]
pub struct BinGateReport<F> {
    /// worst |observed - expected| in binomial standard errors
    pub max_sigma: F,
    pub bins_used: usize,
    pub pass: bool,
}

/// Compares a 2-D histogram of `samples` on a rectangle domain against the
/// distribution's pdf (3x3 Simpson per bin); passes when every bin deviates
/// by at most `sigma_gate` binomial standard errors.
pub fn rect_bin_gate<F: Real>(
    dist: &StationaryDistribution<F>,
    samples: &[Point2<F>],
    nx: usize,
    ny: usize,
    sigma_gate: F,
) -> Result<BinGateReport<F>> {
    let (a, b) = match *dist.domain() {
        ConvexDomain::Rectangle {
            half_width,
            half_height,
        } => (half_width, half_height),
        _ => {
            return Err(Error::Unsupported(
                "2-D bin gate expects a rectangle domain".into(),
            ))
        }
    };
    let n = samples.len();
    let mut counts = vec![0usize; nx * ny];
    let wx = F::two() * a / F::from_usize(nx).unwrap();
    let wy = F::two() * b / F::from_usize(ny).unwrap();
    for p in samples {
        let ix = (((p.x + a) / wx).to_usize().unwrap_or(0)).min(nx - 1);
        let iy = (((p.y + b) / wy).to_usize().unwrap_or(0)).min(ny - 1);
        counts[iy * nx + ix] += 1;
    }
    let simpson = [F::lit(1.0), F::lit(4.0), F::lit(1.0)];
    let mut max_sigma = F::zero();
    for iy in 0..ny {
        for ix in 0..nx {
            let x0 = -a + wx * F::from_usize(ix).unwrap();
            let y0 = -b + wy * F::from_usize(iy).unwrap();
            let mut acc = F::zero();
            for (i, wi) in simpson.iter().enumerate() {
                for (j, wj) in simpson.iter().enumerate() {
                    let x = x0 + wx * F::from_usize(i).unwrap() * F::half();
                    let y = y0 + wy * F::from_usize(j).unwrap() * F::half();
                    acc = acc + *wi * *wj * dist.pdf_unchecked(&Point2::new(x, y));
                }
            }
            let p_bin = acc * wx * wy / F::lit(36.0);
            let expected = p_bin * F::from_usize(n).unwrap();
            let sd = (F::from_usize(n).unwrap() * p_bin * (F::one() - p_bin))
                .sqrt()
                .max(F::lit(1e-9));
            let observed = F::from_usize(counts[iy * nx + ix]).unwrap();
            max_sigma = max_sigma.max((observed - expected).abs() / sd);
        }
    }
    Ok(BinGateReport {
        max_sigma,
        bins_used: nx * ny,
        pass: max_sigma <= sigma_gate,
    })
}

/// Radial histogram gate for disk domains; expected masses via Simpson on
/// `f(r) 2 pi r`.
pub fn disk_radial_gate<F: Real>(
    dist: &StationaryDistribution<F>,
    samples: &[Point2<F>],
    bins: usize,
    sigma_gate: F,
) -> Result<BinGateReport<F>> {
    let radius = match *dist.domain() {
        ConvexDomain::Disk { radius } => radius,
        _ => {
            return Err(Error::Unsupported(
                "radial gate expects a disk domain".into(),
            ))
        }
    };
    let n = samples.len();
    let w = radius / F::from_usize(bins).unwrap();
    let mut counts = vec![0usize; bins];
    for p in samples {
        let idx = ((p.norm() / w).to_usize().unwrap_or(0)).min(bins - 1);
        counts[idx] += 1;
    }
    let simpson = [F::lit(1.0), F::lit(4.0), F::lit(1.0)];
    let mut max_sigma = F::zero();
    for (i, &count) in counts.iter().enumerate() {
        let r0 = w * F::from_usize(i).unwrap();
        let mut acc = F::zero();
        for (j, wj) in simpson.iter().enumerate() {
            let r = r0 + w * F::from_usize(j).unwrap() * F::half();
            acc = acc + *wj * dist.pdf_unchecked(&Point2::new(r, F::zero())) * r;
        }
        let p_bin = acc * w / F::lit(6.0) * F::two() * F::PI();
        let expected = p_bin * F::from_usize(n).unwrap();
        let sd = (F::from_usize(n).unwrap() * p_bin * (F::one() - p_bin))
            .sqrt()
            .max(F::lit(1e-9));
        let observed = F::from_usize(count).unwrap();
        max_sigma = max_sigma.max((observed - expected).abs() / sd);
    }
    Ok(BinGateReport {
        max_sigma,
        bins_used: bins,
        pass: max_sigma <= sigma_gate,
    })
}

/// Chi-square p-value of a uniform 2-D histogram over the domain's bounding
/// box; bins are weighted by their overlap area with the domain (exact for
/// rectangles, circular-segment areas for disks). Bins expecting fewer than
/// five samples are dropped.
pub fn uniform_chi_square_p<F: Real>(
    domain: &ConvexDomain<F>,
    samples: &[Point2<F>],
    nx: usize,
    ny: usize,
) -> Result<F> {
    let (bx, by) = domain.bounding_half_widths();
    let wx = F::two() * bx / F::from_usize(nx).unwrap();
    let wy = F::two() * by / F::from_usize(ny).unwrap();
    let n = F::from_usize(samples.len()).unwrap();
    let mut counts = vec![0usize; nx * ny];
    for p in samples {
        let ix = (((p.x + bx) / wx).to_usize().unwrap_or(0)).min(nx - 1);
        let iy = (((p.y + by) / wy).to_usize().unwrap_or(0)).min(ny - 1);
        counts[iy * nx + ix] += 1;
    }
    let area = domain.area();
    let mut chi2 = F::zero();
    let mut used = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let x0 = -bx + wx * F::from_usize(ix).unwrap();
            let y0 = -by + wy * F::from_usize(iy).unwrap();
            let overlap = match *domain {
                ConvexDomain::Rectangle { .. } => wx * wy,
                ConvexDomain::Disk { .. } => {
                    // centre the bin; reuse the disk/rect intersection with
                    // roles swapped (bin as the rectangle)
                    let bin_centre =
                        Point2::new(x0 + wx * F::half(), y0 + wy * F::half());
                    let bin = ConvexDomain::Rectangle {
                        half_width: wx * F::half(),
                        half_height: wy * F::half(),
                    };
                    let shifted = Point2::new(-bin_centre.x, -bin_centre.y);
                    bin.disk_intersection_area(&shifted, domain.diameter() * F::half())
                }
            };
            let expected = n * overlap / area;
            if expected < F::lit(5.0) {
                continue;
            }
            let observed = F::from_usize(counts[iy * nx + ix]).unwrap();
            let d = observed - expected;
            chi2 = chi2 + d * d / expected;
            used += 1;
        }
    }
    if used < 2 {
        return Err(Error::InvalidParameter(
            "chi-square gate: too few usable bins".into(),
        ));
    }
    crate::numerics::chi_square_sf(used - 1, chi2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::QuadratureSpec;
    use crate::rwpm::PdfKind;
    use approx::assert_relative_eq;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default_1d()
    }

    fn mobility(k: f64, t_max: f64) -> MobilityParams<f64> {
        MobilityParams::new(1.0, k, t_max).unwrap()
    }

    #[test]
    fn trajectories_are_reproducible_and_inside() {
        let dom = ConvexDomain::rectangle(2.0, 1.0).unwrap();
        let mob = mobility(2.0, 0.5);
        let t1 = simulate_trajectory(&dom, &mob, 50.0, RngSeed(9));
        let t2 = simulate_trajectory(&dom, &mob, 50.0, RngSeed(9));
        assert_eq!(t1.legs(), t2.legs());
        assert!(t1.duration() >= 50.0);
        for leg in t1.legs() {
            assert!(dom.contains(&leg.start) && dom.contains(&leg.end));
            assert!(leg.speed >= 1.0 && leg.speed <= 2.0);
            assert!(leg.pause_after >= 0.0 && leg.pause_after <= 0.5);
        }
    }

    #[test]
    fn zero_think_time_reduces_to_random_walk() {
        let dom = ConvexDomain::disk(1.0).unwrap();
        let traj = simulate_trajectory(&dom, &mobility(1.0, 0.0), 30.0, RngSeed(3));
        assert!(traj.legs().iter().all(|l| l.pause_after == 0.0));
        assert!(traj.legs().iter().all(|l| l.speed == 1.0));
    }

    #[test]
    fn position_interpolation() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let traj = simulate_trajectory(&dom, &mobility(1.0, 0.0), 10.0, RngSeed(5));
        let leg = traj.legs()[0];
        let (p0, s0) = traj.position_at(0.0).unwrap();
        assert_eq!(p0, leg.start);
        assert_eq!(s0, MotionState::Moving);
        // halfway through the first leg sits at the geometric midpoint
        let (pm, _) = traj.position_at(leg.travel_time() / 2.0).unwrap();
        assert_relative_eq!(pm.x, (leg.start.x + leg.end.x) / 2.0, epsilon = 1e-12);
        assert_relative_eq!(pm.y, (leg.start.y + leg.end.y) / 2.0, epsilon = 1e-12);
        // arrival hits the waypoint
        let (pe, _) = traj.position_at(leg.travel_time() * (1.0 - 1e-12)).unwrap();
        assert_relative_eq!(pe.x, leg.end.x, epsilon = 1e-9);
        assert!(traj.position_at(traj.duration() + 1.0).is_err());
    }

    #[test]
    fn pause_state_is_flagged() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let traj = simulate_trajectory(&dom, &mobility(1.0, 1.0), 10.0, RngSeed(6));
        let leg = traj.legs()[0];
        if leg.pause_after > 0.0 {
            let t = leg.travel_time() + leg.pause_after / 2.0;
            let (p, state) = traj.position_at(t).unwrap();
            assert_eq!(state, MotionState::Paused);
            assert_eq!(p, leg.end);
        }
    }

    #[test]
    fn sampler_is_reproducible() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.3, PdfKind::Exact, &spec()).unwrap();
        let s1 = sample_stationary(&dist, 1000, RngSeed(11));
        let s2 = sample_stationary(&dist, 1000, RngSeed(11));
        assert_eq!(s1, s2);
        assert!(s1.iter().all(|p| dom.contains(p)));
    }

    #[test]
    fn sampler_acceptance_rate_tracks_mean_leg_over_diameter() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.0, PdfKind::Exact, &spec()).unwrap();
        let (_, stats) = sample_stationary_with_stats(&dist, 20_000, RngSeed(1));
        let expected = dist.mean_leg_length() / dom.diameter();
        assert_relative_eq!(stats.acceptance_rate(), expected, max_relative = 0.05);
    }

    #[test]
    fn uniform_case_passes_chi_square() {
        for dom in [
            ConvexDomain::rectangle(1.0, 1.0).unwrap(),
            ConvexDomain::disk(1.0).unwrap(),
        ] {
            let dist =
                StationaryDistribution::new(dom, 1.0, PdfKind::Approximate, &spec()).unwrap();
            let samples = sample_stationary(&dist, 100_000, RngSeed(21));
            let p = uniform_chi_square_p(&dom, &samples, 8, 8).unwrap();
            assert!(p > 0.01, "chi-square p-value {p} for {dom:?}");
        }
    }

    #[test]
    fn mobile_samples_match_exact_pdfs() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.0, PdfKind::Exact, &spec()).unwrap();
        let samples = sample_stationary(&dist, 200_000, RngSeed(33));
        let gate = rect_bin_gate(&dist, &samples, 16, 16, 4.0).unwrap();
        assert!(gate.pass, "rect bin gate max sigma {}", gate.max_sigma);

        let disk = ConvexDomain::disk(1.0).unwrap();
        let dist = StationaryDistribution::new(disk, 0.0, PdfKind::Exact, &spec()).unwrap();
        let samples = sample_stationary(&dist, 200_000, RngSeed(34));
        let gate = disk_radial_gate(&dist, &samples, 16, 4.0).unwrap();
        assert!(gate.pass, "disk radial gate max sigma {}", gate.max_sigma);
    }

    #[test]
    fn pause_probability_brackets_analytic_value() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        // choose t_max so E[T_p] = 0.3 E[T]
        let dist = StationaryDistribution::new(dom, 0.0, PdfKind::Exact, &spec()).unwrap();
        let mean_leg = dist.mean_leg_length();
        let k: f64 = 2.0;
        let mean_leg_time = (k.ln() / (k - 1.0)) * mean_leg;
        let t_max = 2.0 * 0.3 * mean_leg_time;
        let mob = MobilityParams::new(1.0, k, t_max).unwrap();
        let ens = warmed_ensemble(&dom, &mob, 60, 200.0 * mean_leg_time, RngSeed(17));
        let est = ens.empirical_pause_probability(200, RngSeed(18));
        let expected = 0.3 / 1.3;
        assert!(
            est.brackets(expected, 3.0),
            "estimate {} +- {} vs {expected}",
            est.value,
            est.std_error
        );

        // zero think time: exactly zero
        let mob = MobilityParams::new(1.0, 1.0, 0.0).unwrap();
        let ens = warmed_ensemble(&dom, &mob, 10, 20.0, RngSeed(19));
        let est = ens.empirical_pause_probability(50, RngSeed(20));
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn connection_probability_without_interference() {
        // gamma = 0, eps = 0, eta = 2, unit budget, d = 1: exp(-1)
        let dom = ConvexDomain::rectangle(2.0, 2.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.5, PdfKind::Exact, &spec()).unwrap();
        let config = NetworkConfig::new(10, dist).unwrap();
        let params = ChannelParams::new(1.0, 1.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let est = empirical_connection_probability(
            &config,
            &params,
            1.0,
            Point2::origin(),
            40_000,
            RngSeed(40),
        )
        .unwrap();
        assert!(
            est.brackets((-1.0f64).exp(), 3.0),
            "{} +- {}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn rejects_impossible_link_distance() {
        let dom = ConvexDomain::disk(1.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.5, PdfKind::Exact, &spec()).unwrap();
        let config = NetworkConfig::new(5, dist).unwrap();
        let params = ChannelParams::new(1.0, 1.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let err = empirical_connection_probability(
            &config,
            &params,
            5.0,
            Point2::origin(),
            10,
            RngSeed(1),
        );
        assert!(matches!(err, Err(Error::NoTransmitterPlacement { .. })));
    }

    #[test]
    fn empirical_mu_saturates_without_noise_or_interference() {
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.0, PdfKind::Exact, &spec()).unwrap();
        let config = NetworkConfig::new(6, dist).unwrap();
        let params = ChannelParams::new(1.0, 1e-9, 2.0, 0.0, 0.0, 1.0).unwrap();
        let est =
            empirical_mu(&config, &params, Point2::origin(), 2_000, RngSeed(50)).unwrap();
        assert_relative_eq!(est.value, 5.0, epsilon = 1e-9);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn estimates_are_deterministic() {
        let dom = ConvexDomain::disk(2.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.5, PdfKind::Exact, &spec()).unwrap();
        let config = NetworkConfig::new(10, dist).unwrap();
        let params = ChannelParams::new(1.0, 1.0, 2.0, 0.01, 0.5, 1.0).unwrap();
        let a = empirical_mu(&config, &params, Point2::origin(), 3_000, RngSeed(77)).unwrap();
        let b = empirical_mu(&config, &params, Point2::origin(), 3_000, RngSeed(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn time_average_matches_ensemble_sampler() {
        // positions sampled along warmed trajectories agree with the direct
        // stationary sampler through the same histogram gate
        let dom = ConvexDomain::rectangle(1.0, 1.0).unwrap();
        let mob = MobilityParams::new(1.0, 1.0, 0.0).unwrap();
        let dist = StationaryDistribution::new(dom, 0.0, PdfKind::Exact, &spec()).unwrap();
        let ens = warmed_ensemble(&dom, &mob, 40, 400.0, RngSeed(60));
        let positions = ens.position_samples(1_500, RngSeed(61));
        assert!(positions.len() >= 60_000);
        let gate = rect_bin_gate(&dist, &positions, 8, 8, 4.5).unwrap();
        assert!(
            gate.pass,
            "trajectory histogram deviates: max sigma {}",
            gate.max_sigma
        );
    }
}
