//! The M-Wright function M_α(z) = Σ (−z)ⁿ / (n! Γ(1−α−αn)) for 0 < α < 1.
//!
//! Small arguments use the series. Larger ones use Kanter's integral
//!
//! M_α(z) = z^{α/(1−α)} / ((1−α)π) ∫₀^π A(φ) exp(−A(φ) z^{1/(1−α)}) dφ,
//! A(φ) = [sin(αφ)^α sin((1−α)φ)^{1−α} / sin φ]^{1/(1−α)},
//!
//! whose integrand is positive, so nothing cancels.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, rgamma, sin_pi};
use super::{CompensatedSum, FractionalOrder};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

const SERIES_LIMIT: f64 = 1.0;

fn check(alpha: FractionalOrder, z: f64) -> Result<f64> {
    if alpha.is_one() {
        return Err(Error::domain("M-Wright function is a point mass at alpha = 1 (density degenerates to a delta)"));
    }
    if !(z >= 0.0) {
        return Err(Error::domain(format!("M-Wright argument must be non-negative, got {z}")));
    }
    Ok(alpha.value())
}

/// M_α(z) for z ≥ 0 and α < 1.
pub fn m_wright(alpha: FractionalOrder, z: f64) -> Result<f64> {
    let a = check(alpha, z)?;
    if z == 0.0 {
        return Ok(rgamma(1.0 - a));
    }
    if z == f64::INFINITY {
        return Ok(0.0);
    }
    if z <= SERIES_LIMIT {
        return Ok(series(a, z));
    }
    kanter_density(a, z)
}

/// Tail mass ∫_z^∞ M_α(x) dx.
pub fn m_wright_tail(alpha: FractionalOrder, z: f64) -> Result<f64> {
    let a = check(alpha, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    let lnc = z.ln() / (1.0 - a);
    let f = |phi: f64| (-(ln_a(a, phi) + lnc).exp()).exp();
    let est = integrate(f, &breakpoints(a, lnc), Tolerance::new(1e-300, attainable(a, lnc, 1e-12)))?;
    Ok((est.value / PI).clamp(0.0, 1.0))
}

/// Smallest z (to bisection accuracy) with tail mass ≤ `mass`.
pub(crate) fn m_wright_quantile(alpha: FractionalOrder, mass: f64) -> Result<f64> {
    let mut hi = 1.0;
    while m_wright_tail(alpha, hi)? > mass {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Accuracy {
                what: "M-Wright tail did not fall below the requested mass".into(),
                achieved: m_wright_tail(alpha, hi)?,
                required: mass,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if m_wright_tail(alpha, mid)? > mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 * hi {
            break;
        }
    }
    Ok(hi)
}

fn series(a: f64, z: f64) -> f64 {
    // 1/Γ(1−y) = Γ(y) sin(πy)/π with y = α(n+1)
    let lnz = z.ln();
    let mut acc = CompensatedSum::default();
    for n in 0..5000usize {
        let nf = n as f64;
        let y = a * (nf + 1.0);
        let envelope = (nf * lnz + ln_gamma(y) - ln_gamma(nf + 1.0)).exp() / PI;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(sign * envelope * sin_pi(y));
        if n > 4 && envelope <= 1e-18 * acc.value().abs().max(1e-300) {
            break;
        }
    }
    acc.value()
}

/// ln A(φ) for the Kanter representation.
fn ln_a(a: f64, phi: f64) -> f64 {
    let b = 1.0 - a;
    (a * (a * phi).sin().ln() + b * (b * phi).sin().ln() - phi.sin().ln()) / b
}

/// Breakpoints on [0, π] around the point where A(φ)·c = 1.
fn breakpoints(a: f64, lnc: f64) -> Vec<f64> {
    let mut pts = vec![0.0, PI];
    let g = |phi: f64| ln_a(a, phi) + lnc;
    let (mut lo, mut hi) = (1e-12, PI - 1e-12);
    if g(lo) < 0.0 && g(hi) > 0.0 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let star = 0.5 * (lo + hi);
        pts.extend([0.5 * star, star, 0.5 * (star + PI)]);
    } else if g(lo) >= 0.0 {
        // A(φ)c > 1 throughout: the integrand peaks at φ = 0 with a width
        // shrinking like c^{−1/2}; mark where A c has grown by fixed amounts
        let base = g(lo).exp();
        for rise in [1.0, 8.0, 40.0, 200.0] {
            let level = (base + rise).ln();
            if g(hi) <= level {
                break;
            }
            let (mut l, mut h) = (lo, hi);
            for _ in 0..80 {
                let mid = 0.5 * (l + h);
                if g(mid) < level {
                    l = mid;
                } else {
                    h = mid;
                }
            }
            pts.push(0.5 * (l + h));
        }
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// Relative tolerance no finer than the integrand's own rounding: the
/// exponent A(φ)c is at least its φ → 0 limit, and exp amplifies its
/// rounding by that size.
fn attainable(a: f64, lnc: f64, rel: f64) -> f64 {
    let smallest_exponent = (ln_a(a, 1e-12) + lnc).exp();
    rel.max(64.0 * f64::EPSILON * smallest_exponent)
}

fn kanter_density(a: f64, z: f64) -> Result<f64> {
    let b = 1.0 - a;
    let lnz = z.ln();
    let lnc = lnz / b;
    let ln_pref = a * lnz / b;
    let f = |phi: f64| {
        let la = ln_a(a, phi);
        (ln_pref + la - (la + lnc).exp()).exp()
    };
    let est = integrate(f, &breakpoints(a, lnc), Tolerance::new(1e-300, attainable(a, lnc, 1e-13)))?;
    Ok(est.value / (b * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn half_order_is_gaussian() {
        for z in [0.0f64, 0.3, 0.9, 1.0, 1.1, 2.0, 4.0, 7.5] {
            let want = (-z * z / 4.0).exp() / PI.sqrt();
            let got = m_wright(ord(0.5), z).unwrap();
            assert!((got - want).abs() < 1e-13, "z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn origin_value() {
        let got = m_wright(ord(0.3), 0.0).unwrap();
        assert!((got - 1.0 / crate::specfun::gamma(0.7)).abs() < 1e-15);
    }

    #[test]
    fn series_and_integral_agree_near_switch() {
        for a in [0.1, 0.4, 0.75, 0.9] {
            for z in [0.6, 1.0] {
                let s = series(a, z);
                let k = kanter_density(a, z).unwrap();
                assert!((s - k).abs() < 1e-12, "alpha={a} z={z}: {s} vs {k}");
            }
        }
    }

    #[test]
    fn far_tail_below_rounding_of_exponent() {
        // exponent ≈ 547 here; 1e-13 relative is finer than exp can deliver
        let v = m_wright(ord(0.9), 2.6).unwrap();
        assert!((v / 1.142_092_162_308_089_4e-236 - 1.0).abs() < 1e-8, "{v}");
        assert!(m_wright(ord(0.99), 150.0).unwrap() >= 0.0);
    }

    #[test]
    fn rejects_degenerate_order_and_negative_argument() {
        assert!(m_wright(ord(1.0), 0.5).is_err());
        assert!(m_wright(ord(0.5), -0.1).is_err());
    }

    #[test]
    fn tail_mass_matches_half_order_closed_form() {
        // ∫_z^∞ e^{-x²/4}/√π dx = erfc(z/2)
        let got = m_wright_tail(ord(0.5), 2.0).unwrap();
        assert!((got - 0.157_299_207_050_285_13).abs() < 1e-12);
        let q = m_wright_quantile(ord(0.5), 1e-8).unwrap();
        assert!(q > 8.0 && q < 8.3);
        assert!((m_wright_tail(ord(0.5), q).unwrap() - 1e-8).abs() < 1e-15);
    }
}
