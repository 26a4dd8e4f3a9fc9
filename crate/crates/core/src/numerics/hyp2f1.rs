//! Gauss hypergeometric function 2F1 on the non-positive real axis.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_TERMS: usize = 40_000_000;

/// 2F1(a, b; c; z) for z <= 0, c > b > 0, a >= 0.
///
/// The argument is first mapped through the Pfaff transformation
/// `2F1(a, b; c; z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`, which sends
/// z <= 0 to w = z/(z-1) in [0, 1); the transformed Gauss series then has
/// positive terms only and is summed with compensation. Arguments far down
/// the negative axis converge slowly (the series needs O(|z| ln(1/eps))
/// terms) but stay accurate.
pub fn hyp2f1<F: Real>(a: F, b: F, c: F, z: F) -> Result<F> {
    if !(c > b && b > F::zero()) || a < F::zero() {
        return Err(Error::Unsupported(format!(
            "hyp2f1 requires c > b > 0 and a >= 0 (got a={a}, b={b}, c={c})"
        )));
    }
    if z > F::zero() || !z.is_finite() {
        return Err(Error::Unsupported(format!(
            "hyp2f1 argument must satisfy z <= 0 (got z={z})"
        )));
    }
    if z == F::zero() || a == F::zero() {
        return Ok(F::one());
    }

    let w = z / (z - F::one());
    let b2 = c - b;

    // term ratios stay below w (a + c - b <= c + 1 here), so the tail after
    // stopping is bounded by term * w / (1 - w)
    let tail_factor = w / (F::one() - w);
    let mut term = F::one();
    let mut sum = F::one();
    let mut comp = F::zero();
    let mut n = F::zero();
    let mut converged = false;
    for _ in 0..MAX_TERMS {
        term = term * (a + n) * (b2 + n) / ((c + n) * (n + F::one())) * w;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        n = n + F::one();
        if term * tail_factor < F::epsilon() * sum {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesDidNotConverge { terms: MAX_TERMS });
    }
    Ok((F::one() - z).powf(-a) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unity_at_zero() {
        assert_eq!(hyp2f1(1.0, 0.5, 1.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn log_identity() {
        // 2F1(1, 1; 2; -x) = ln(1+x)/x
        for x in [0.1f64, 1.0, 3.0, 10.0, 100.0] {
            let v = hyp2f1(1.0, 1.0, 2.0, -x).unwrap();
            assert_relative_eq!(v, (1.0 + x).ln() / x, max_relative = 1e-12);
        }
    }

    #[test]
    fn arctan_identity() {
        // 2F1(1, 1/2; 3/2; -x^2) = arctan(x)/x
        for x in [0.1f64, 1.0, 2.0, 10.0, 100.0] {
            let v = hyp2f1(1.0, 0.5, 1.5, -x * x).unwrap();
            assert_relative_eq!(v, x.atan() / x, max_relative = 1e-12);
        }
    }

    #[test]
    fn matches_euler_integral_representation() {
        // c > b > 0: 2F1(a,b;c;z) = B(b, c-b)^-1 int_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt;
        // with c = b+1 the Beta factor is b.
        use crate::numerics::{integrate_1d, QuadratureSpec};
        let spec = QuadratureSpec {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_subdivisions: 2000,
        };
        for (a, b, z) in [
            (1.0, 0.5, -11.904761904761905),
            (1.0, 0.5, -0.3),
            (1.0, 0.25, -40.0),
            (2.0, 1.5, -7.0),
            (1.0, 1.0, -625.0),
        ] {
            let c: f64 = b + 1.0;
            let euler = integrate_1d(
                |t: f64| t.powf(b - 1.0) * (1.0 - z * t).powf(-a),
                0.0,
                1.0,
                &spec,
            )
            .unwrap()
            .value
                * b;
            let v = hyp2f1(a, b, c, z).unwrap();
            assert_relative_eq!(v, euler, max_relative = 1e-10);
        }
        // frozen spot value (independent multiprecision evaluation)
        assert_relative_eq!(
            hyp2f1(1.0, 0.5, 1.5, -25.0 / 2.1).unwrap(),
            0.3735001640504881,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_unsupported_parameters() {
        assert!(hyp2f1(1.0, 2.0, 1.0, -1.0).is_err()); // c <= b
        assert!(hyp2f1(1.0, 0.5, 1.5, 0.5).is_err()); // z > 0
        assert!(hyp2f1(-1.0, 0.5, 1.5, -0.5).is_err()); // a < 0
    }
}
