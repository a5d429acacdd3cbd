//! Error functions.
//!
//! `erf` and `erfc` follow the fdlibm rational approximations (error below
//! one ulp on the reduced intervals). `erfcx(x) = e^{x²}·erfc(x)` reuses the
//! same tail approximation without forming `e^{−x²}`, so products such as
//! `e^{a}·erfc(b)` can be evaluated for large arguments without overflow.

use std::f64::consts::PI;

const ERX: f64 = 8.45062911510467529297e-01;
const EFX8: f64 = 1.02703333676410069053e+00;

const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 6] = [
    1.0,
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];

const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 7] = [
    1.0,
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];

const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 9] = [
    1.0,
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];

const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 8] = [
    1.0,
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

fn poly(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * z + k)
}

/// `erf(x)` for `|x| < 0.84375`, as `x + x·P(x²)/Q(x²)`.
fn erf_small(x: f64) -> f64 {
    if x.abs() < 2f64.powi(-28) {
        return 0.125 * (8.0 * x + EFX8 * x);
    }
    let z = x * x;
    x + x * (poly(&PP, z) / poly(&QQ, z))
}

/// `erfc(x)` for `0.84375 ≤ x < 1.25`.
fn erfc_near_one(x: f64) -> f64 {
    let s = x - 1.0;
    1.0 - ERX - poly(&PA, s) / poly(&QA, s)
}

/// `ln(x·erfcx(x))` for `x ≥ 1.25`, i.e. `R(1/x²)/S(1/x²) − 0.5625`.
fn log_scaled_tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let rs = if x < 1.0 / 0.35 {
        poly(&RA, s) / poly(&SA, s)
    } else {
        poly(&RB, s) / poly(&SB, s)
    };
    rs - 0.5625
}

/// `erfc(x)` for `x ≥ 1.25`. The exponent is split as in fdlibm so that
/// `e^{−x²}` keeps full relative precision.
fn erfc_tail(x: f64) -> f64 {
    if x >= 28.0 {
        return erfcx(x) * (-x * x).exp();
    }
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    let s = 1.0 / (x * x);
    let rs = if x < 1.0 / 0.35 {
        poly(&RA, s) / poly(&SA, s)
    } else {
        poly(&RB, s) / poly(&SB, s)
    };
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + rs).exp() / x
}

/// `erfc(x)` for `x ≥ 0`.
fn erfc_pos(x: f64) -> f64 {
    if x < 0.84375 {
        if x < 0.25 {
            1.0 - erf_small(x)
        } else {
            let z = x * x;
            0.5 - (x - 0.5 + x * (poly(&PP, z) / poly(&QQ, z)))
        }
    } else if x < 1.25 {
        erfc_near_one(x)
    } else {
        erfc_tail(x)
    }
}

/// Error function. Odd by construction: the sign is stripped before
/// evaluation and reapplied afterwards.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let a = x.abs();
    let y = if a < 0.84375 {
        erf_small(a)
    } else if a < 6.0 {
        1.0 - erfc_pos(a)
    } else {
        1.0
    };
    y.copysign(x)
}

/// Complementary error function `1 − erf(x)`, computed directly for
/// `x > 0` to avoid cancellation.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x >= 0.0 {
        erfc_pos(x)
    } else if x > -0.84375 {
        1.0 + erf_small(-x)
    } else {
        2.0 - erfc_pos(-x)
    }
}

/// Above this the asymptotic series of `erfcx` is used; the rational tail
/// fit loses a few digits as it approaches its upper end at 28.
const ASYMPTOTIC: f64 = 12.0;

/// Scaled complementary error function `e^{x²}·erfc(x)`.
///
/// Finite for every `x ≥ −26`; overflows to `+∞` for very negative `x`
/// like the unscaled quantity.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 1.25 {
        return (x * x).exp() * erfc_pos(x);
    }
    if x < ASYMPTOTIC {
        return log_scaled_tail(x).exp() / x;
    }
    // Asymptotic series 1/(x√π)·Σ (−1)^k (2k−1)!!/(2x²)^k, truncated at the
    // first term below 1e-17 (about ten terms for x ≥ 12).
    let w = 1.0 / (2.0 * x * x);
    let (mut sum, mut term, mut k) = (1.0f64, 1.0f64, 1.0f64);
    while term.abs() > 1e-17 {
        term *= -(2.0 * k - 1.0) * w;
        sum += term;
        k += 1.0;
    }
    sum / (x * PI.sqrt())
}

/// `e^{a}·erfc(b)` without intermediate overflow or underflow, via
/// `e^{a−b²}·erfcx(b)` when `b > 0`.
pub fn exp_erfc(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        let e = a - b * b;
        if e < -745.2 {
            0.0
        } else {
            e.exp() * erfcx(b)
        }
    } else {
        a.exp() * erfc(b)
    }
}
