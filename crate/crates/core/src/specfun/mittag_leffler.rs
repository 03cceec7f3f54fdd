//! One-parameter Mittag–Leffler function E_α(z) = Σ zⁿ/Γ(αn+1).
//!
//! Real arguments use the power series near the origin and on the positive
//! axis. On the negative axis beyond |z| = 1 the series cancels badly, so
//! the Laplace-type spectral representation
//!
//! E_α(−x) = (sin απ / απ) ∫₀^∞ x e^{−v^{1/α}} / (v² + 2xv cos απ + x²) dv
//!
//! is integrated adaptively instead.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{gamma, ln_gamma, rgamma};
use super::wright::{m_wright, m_wright_quantile};
use super::{CompensatedSum, FractionalOrder};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// Below this |z| the series is used on the negative axis.
const SERIES_RADIUS: f64 = 1.0;
const MAX_TERMS: usize = 20_000;

/// E_α(z) for real z.
pub fn mittag_leffler(alpha: FractionalOrder, z: f64) -> Result<f64> {
    let a = alpha.value();
    if z.is_nan() {
        return Err(Error::domain("Mittag-Leffler argument is NaN"));
    }
    if alpha.is_one() {
        return Ok(z.exp());
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z > 0.0 || z >= -SERIES_RADIUS {
        return Ok(real_series(a, z));
    }
    if z == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    negative_axis_integral(a, -z)
}

fn real_series(a: f64, z: f64) -> f64 {
    let lnz = z.abs().ln();
    let negative = z < 0.0;
    let mut acc = CompensatedSum::default();
    acc.add(1.0);
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        let mag = (nf * lnz - ln_gamma(a * nf + 1.0)).exp();
        let term = if negative && n % 2 == 1 { -mag } else { mag };
        acc.add(term);
        if !acc.value().is_finite() {
            return f64::INFINITY;
        }
        if a * nf > 1.0 && mag <= 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

fn negative_axis_integral(a: f64, x: f64) -> Result<f64> {
    let (s, c) = (a * PI).sin_cos();
    let pref = s / (a * PI);
    let inv_a = 1.0 / a;
    let decay = |v: f64| (-v.powf(inv_a)).exp();
    // e^{-v^{1/α}} is below 1e-22 beyond v = 50^α.
    let v_max = 50f64.powf(a);
    let center = -x * c;
    let width = x * s;
    let mut pts = vec![0.0, 1.0f64.min(v_max), v_max];
    // For α > 1/2 the kernel is a Lorentzian centred at −x cos απ with
    // width x sin απ; its integral against the frozen decay is done in
    // closed form and only the remainder, which is odd about the centre
    // to leading order, goes to quadrature.
    let peaked = c < 0.0 && center < v_max;
    let frozen = if peaked { decay(center) } else { 0.0 };
    let lorentz = if peaked { (((v_max - center) / width).atan() + (center / width).atan()) / s } else { 0.0 };
    let f = |v: f64| x * (decay(v) - frozen) / (v * v + 2.0 * x * v * c + x * x);
    if c < 0.0 {
        for p in [center - 4.0 * width, center - width, center, center + width, center + 4.0 * width] {
            if p > 0.0 && p < v_max {
                pts.push(p);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let est = integrate(f, &pts, Tolerance::new(2e-13 / pref, 1e-14).with_segments(4000))?;
    let value = pref * (est.value + frozen * lorentz);
    let err = pref * est.error;
    if err > 1e-12 {
        return Err(Error::Accuracy {
            what: format!("Mittag-Leffler integral at alpha={a}, z={}", -x),
            achieved: err,
            required: 1e-12,
        });
    }
    Ok(value)
}

/// E_α(z) for complex z.
///
/// Uses the power series while its terms stay small enough that
/// cancellation costs at most three digits, and otherwise, for Re z ≤ 0,
/// the mixture E_α(z) = ∫₀^∞ M_α(v) e^{zv} dv over the M-Wright density.
pub fn mittag_leffler_complex(alpha: FractionalOrder, z: Complex64) -> Result<Complex64> {
    if alpha.is_one() {
        return Ok(z.exp());
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(mittag_leffler(alpha, z.re)?, 0.0));
    }
    let a = alpha.value();
    let r = z.norm();
    // Σ|terms| = E_α(|z|)
    if real_series(a, r) <= 1e3 {
        return Ok(complex_series(a, z));
    }
    if z.re > 0.0 {
        return Err(Error::domain(format!(
            "complex Mittag-Leffler with positive real part outside the series range (z = {z})"
        )));
    }
    let v_max = m_wright_quantile(alpha, 1e-16)?;
    let f = |v: f64| {
        let m = m_wright(alpha, v).unwrap_or(0.0);
        (z * v).exp() * m
    };
    // a few oscillation periods per panel
    let periods = (z.im.abs() * v_max / (2.0 * PI)).ceil().max(1.0) as usize;
    let panels = periods.min(2000) + 1;
    let pts: Vec<f64> = (0..=panels).map(|k| v_max * k as f64 / panels as f64).collect();
    let est = integrate(f, &pts, Tolerance::new(1e-13, 1e-13).with_segments(20_000))?;
    Ok(est.value)
}

fn complex_series(a: f64, z: Complex64) -> Complex64 {
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    re.add(1.0);
    let mut zn = Complex64::new(1.0, 0.0);
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        zn *= z;
        let term = zn * rgamma(a * nf + 1.0);
        let term = if term.is_finite() {
            term
        } else {
            let ln_mag = nf * z.norm().ln() - ln_gamma(a * nf + 1.0);
            Complex64::from_polar(ln_mag.exp(), nf * z.arg())
        };
        re.add(term.re);
        im.add(term.im);
        if a * nf > 1.0 && term.norm() <= 1e-18 * Complex64::new(re.value(), im.value()).norm().max(1e-300) {
            break;
        }
    }
    Complex64::new(re.value(), im.value())
}

/// Truncated series P_N(z) = Σ_{n=0}^{N} zⁿ/Γ(αn+1) together with the
/// remainder bound |z|^{N+1}/Γ(α(N+1)+1).
pub fn ml_partial_sum(alpha: FractionalOrder, z: f64, n: usize) -> (f64, f64) {
    let a = alpha.value();
    let mut acc = CompensatedSum::default();
    let mut zn = 1.0;
    for k in 0..=n {
        let term = zn / gamma(a * k as f64 + 1.0);
        acc.add(term);
        zn *= z;
    }
    let m = (n + 1) as f64;
    let bound = z.abs().powf(m) * rgamma(a * m + 1.0);
    (acc.value(), bound)
}
