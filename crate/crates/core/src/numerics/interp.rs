//! Monotone cubic (Fritsch-Carlson) interpolation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shape-preserving piecewise-cubic interpolant. Monotone data produce a
/// monotone interpolant; evaluation outside the knot range extrapolates
/// linearly with the end derivative.
#[derive(Clone, Debug)]
pub struct MonotoneCubic<F> {
    xs: Vec<F>,
    ys: Vec<F>,
    derivs: Vec<F>,
}

impl<F: Real> MonotoneCubic<F> {
    pub fn new(xs: Vec<F>, ys: Vec<F>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "interpolation needs >= 2 knots with matching lengths".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "interpolation knots must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let h: Vec<F> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<F> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut d = vec![F::zero(); n];
        for i in 1..n - 1 {
            if slope[i - 1] * slope[i] <= F::zero() {
                d[i] = F::zero();
            } else {
                let w1 = F::two() * h[i] + h[i - 1];
                let w2 = h[i] + F::two() * h[i - 1];
                d[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
            }
        }
        d[0] = edge_derivative(h[0], h.get(1).copied(), slope[0], slope.get(1).copied());
        let last = n - 2;
        d[n - 1] = edge_derivative(
            h[last],
            last.checked_sub(1).map(|i| h[i]),
            slope[last],
            last.checked_sub(1).map(|i| slope[i]),
        );
        Ok(MonotoneCubic { xs, ys, derivs: d })
    }

    pub fn eval(&self, x: F) -> F {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.derivs[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.derivs[n - 1] * (x - self.xs[n - 1]);
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[lo + 1] - self.xs[lo];
        let t = (x - self.xs[lo]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let three = F::lit(3.0);
        let h00 = F::two() * t3 - three * t2 + F::one();
        let h10 = t3 - F::two() * t2 + t;
        let h01 = -F::two() * t3 + three * t2;
        let h11 = t3 - t2;
        h00 * self.ys[lo]
            + h10 * h * self.derivs[lo]
            + h01 * self.ys[lo + 1]
            + h11 * h * self.derivs[lo + 1]
    }

    pub fn first_knot(&self) -> F {
        self.xs[0]
    }

    pub fn last_knot(&self) -> F {
        *self.xs.last().expect("non-empty")
    }
}

/// One-sided three-point end derivative with the Fritsch-Carlson clamps.
fn edge_derivative<F: Real>(h0: F, h1: Option<F>, s0: F, s1: Option<F>) -> F {
    let (h1, s1) = match (h1, s1) {
        (Some(h1), Some(s1)) => (h1, s1),
        _ => return s0,
    };
    let d = ((F::two() * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= F::zero() {
        F::zero()
    } else if s0 * s1 <= F::zero() && d.abs() > F::lit(3.0) * s0.abs() {
        F::lit(3.0) * s0
    } else {
        d
    }
}
