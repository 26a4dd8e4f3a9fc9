//! 15-point Gauss-Kronrod rule with embedded 7-point Gauss rule.

use crate::scalar::Real;

/// Kronrod abscissae on [0, 1] side of the symmetric rule (last entry is 0).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded rule (even-index Kronrod nodes).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Evaluates the G7/K15 pair on `[lo, hi]`; returns the Kronrod value and
/// `|K - G|` as the local error estimate.
pub fn gk15<F: Real>(f: &mut impl FnMut(F) -> F, lo: F, hi: F) -> (F, F) {
    let centre = (lo + hi) * F::half();
    let half = (hi - lo) * F::half();

    let fc = f(centre);
    let mut kronrod = F::lit(WGK[7]) * fc;
    let mut gauss = F::lit(WG[3]) * fc;

    for j in 0..7 {
        let x = F::lit(XGK[j]) * half;
        let fsum = f(centre - x) + f(centre + x);
        kronrod = kronrod + F::lit(WGK[j]) * fsum;
        if j % 2 == 1 {
            gauss = gauss + F::lit(WG[j / 2]) * fsum;
        }
    }

    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}
