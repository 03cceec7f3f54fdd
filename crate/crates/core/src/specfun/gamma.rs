//! Gamma function via the Lanczos approximation (g = 607/128, 15 terms),
//! with reflection for arguments below one half.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_091_82,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x+1)).
    let mut sum = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (x + k as f64);
    }
    sum
}

/// sin(πx) with exact argument reduction, so that large |x| keep full
/// relative accuracy and integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) for x ≥ 0.5 without any checking.
fn gamma_right(x: f64) -> f64 {
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let half = 0.5 * (xm + 0.5);
    // split the power to avoid overflow near x = 171
    let p = t.powf(half);
    SQRT_2PI * p * (p * (-t).exp()) * lanczos_sum(xm)
}

/// Γ(x) for real x that is not a non-positive integer.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if is_pole(x) {
        return Err(Error::domain(format!("gamma has a pole at x = {x}")));
    }
    Ok(gamma(x))
}

/// Γ(x) without the pole check; returns ±inf or NaN at poles.
pub(crate) fn gamma(x: f64) -> f64 {
    if x == x.floor() && (1.0..=30.0).contains(&x) {
        let mut p = 1.0;
        for k in 2..(x as u32) {
            p *= k as f64;
        }
        return p;
    }
    if x < 0.5 {
        let s = sin_pi(x);
        if s == 0.0 {
            return f64::NAN;
        }
        PI / (s * gamma_right(1.0 - x))
    } else {
        gamma_right(x)
    }
}

/// 1/Γ(x), which is entire: zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x == x.floor() && (1.0..=30.0).contains(&x) {
        return 1.0 / gamma(x);
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        let g = gamma_right(1.0 - x);
        if g.is_infinite() {
            let lg = ln_gamma(1.0 - x);
            return sin_pi(x).signum() * (lg - PI.ln()).exp() * sin_pi(x).abs();
        }
        sin_pi(x) * g / PI
    } else {
        1.0 / gamma_right(x)
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection keeps accuracy near zero
        return (PI / sin_pi(x)).ln() - ln_gamma(1.0 - x);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln()
}
