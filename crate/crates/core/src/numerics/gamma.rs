//! Regularized incomplete gamma function and the chi-square survival
//! function built on it (used by the sampler validation gates).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// ln Gamma(z) for z > 0.
pub fn ln_gamma<F: Real>(z: F) -> F {
    if z < F::half() {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return (F::PI() / (F::PI() * z).sin()).ln() - ln_gamma(F::one() - z);
    }
    let z = z - F::one();
    let mut acc = F::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + F::lit(c) / (z + F::from_usize(i).unwrap());
    }
    let g = F::lit(7.5);
    let t = z + g;
    F::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (z + F::half()) * t.ln() - t + acc.ln()
}

const MAX_ITER: usize = 500;

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
pub fn gamma_p<F: Real>(a: F, x: F) -> Result<F> {
    if !(a > F::zero()) || x < F::zero() {
        return Err(Error::InvalidParameter(
            "gamma_p requires a > 0 and x >= 0".into(),
        ));
    }
    if x == F::zero() {
        return Ok(F::zero());
    }
    if x < a + F::one() {
        // series representation
        let mut term = F::one() / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap = ap + F::one();
            term = term * x / ap;
            sum = sum + term;
            if term.abs() < sum.abs() * F::epsilon() {
                let ln_pre = a * x.ln() - x - ln_gamma(a);
                return Ok((sum * ln_pre.exp()).min(F::one()));
            }
        }
        Err(Error::SeriesDidNotConverge { terms: MAX_ITER })
    } else {
        // continued fraction for Q, modified Lentz
        let tiny = F::lit(1e-30);
        let mut b = x + F::one() - a;
        let mut c = F::one() / tiny;
        let mut d = F::one() / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let fi = F::from_usize(i).unwrap();
            let an = -fi * (fi - a);
            b = b + F::two();
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = F::one() / d;
            let delta = d * c;
            h = h * delta;
            if (delta - F::one()).abs() < F::epsilon() {
                let ln_pre = a * x.ln() - x - ln_gamma(a);
                let q = ln_pre.exp() * h;
                return Ok((F::one() - q).max(F::zero()));
            }
        }
        Err(Error::SeriesDidNotConverge { terms: MAX_ITER })
    }
}

/// Survival function of the chi-square distribution with `dof` degrees of
/// freedom: P[X > x].
pub fn chi_square_sf<F: Real>(dof: usize, x: F) -> Result<F> {
    let a = F::from_usize(dof).unwrap() * F::half();
    Ok(F::one() - gamma_p(a, x * F::half())?)
}
