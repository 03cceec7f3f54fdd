//! Pure-dephasing spin-boson model: spectral densities, the dephasing
//! functional Q(t), the bath correlation C(t), the exact coherence and the
//! two time-local comparison models (constant rate and Q̇/2 rate).
//!
//! Both frequency integrals are taken along the ray ω = r e^{iπ/4}. The
//! integrands are analytic in the first octant, so the rotation is exact and
//! turns the cos ωt oscillation into decay.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate, Tolerance};
use crate::specfun::{gamma_fn, sin_pi};

const RAY_ANGLE: f64 = FRAC_PI_4;

fn quad_tolerance(scale: f64) -> Tolerance {
    Tolerance::new(1e-14 * scale.min(1.0), 1e-13).with_segments(4000)
}

/// Bath with spectral density J(ω) = η ω^χ ω_c^{1−χ} e^{−ω/ω_c} at inverse
/// temperature β (infinite for zero temperature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub eta: f64,
    pub chi: f64,
    pub omega_c: f64,
    #[serde(default = "zero_temperature", serialize_with = "write_beta", deserialize_with = "read_beta")]
    pub beta: f64,
}

fn zero_temperature() -> f64 {
    f64::INFINITY
}

fn write_beta<S: Serializer>(beta: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if beta.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*beta)
    }
}

fn read_beta<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Beta {
        Number(f64),
        Text(String),
    }
    match Beta::deserialize(d)? {
        Beta::Number(x) => Ok(x),
        Beta::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
            other => Err(serde::de::Error::custom(format!("beta: expected a number or \"inf\", got {other:?}"))),
        },
    }
}

impl BathSpec {
    pub fn new(eta: f64, chi: f64, omega_c: f64, beta: f64) -> Result<Self> {
        let bath = BathSpec { eta, chi, omega_c, beta };
        bath.validate()?;
        Ok(bath)
    }

    /// Zero-temperature bath.
    pub fn zero_temperature(eta: f64, chi: f64, omega_c: f64) -> Result<Self> {
        Self::new(eta, chi, omega_c, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        if !finite_pos(self.eta) || !finite_pos(self.chi) || !finite_pos(self.omega_c) {
            return Err(Error::validation(format!(
                "bath needs positive finite eta, chi, omega_c (got {}, {}, {})",
                self.eta, self.chi, self.omega_c
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::validation(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    /// J(ω) continued to complex frequency (principal branch of ω^χ).
    fn density_complex(&self, r: f64, phase: f64) -> Complex64 {
        let omega = Complex64::from_polar(r, phase);
        let log_mag = self.eta.ln() + self.chi * r.ln() + (1.0 - self.chi) * self.omega_c.ln();
        Complex64::from_polar(1.0, self.chi * phase)
            * (log_mag - omega.re / self.omega_c).exp()
            * Complex64::from_polar(1.0, -omega.im / self.omega_c)
    }

    fn coth(&self, omega: Complex64) -> Complex64 {
        if self.is_zero_temperature() {
            return Complex64::new(1.0, 0.0);
        }
        let e = (-omega * self.beta).exp(); // e^{−2w}, w = βω/2
        (Complex64::new(1.0, 0.0) + e) / -expm1(-omega * self.beta)
    }
}

/// e^u − 1 without cancellation for small |u|.
fn expm1(u: Complex64) -> Complex64 {
    if u.norm() < 0.5 {
        let mut term = u;
        let mut sum = u;
        for k in 2..30 {
            term *= u / k as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        u.exp() - 1.0
    }
}

/// 1 − e^{iz} + iz/(1+z²). On the real axis the last term is imaginary,
/// so the real part is 1 − cos z; near zero the sum is z²/2 + O(z³).
fn dephasing_factor(z: Complex64) -> Complex64 {
    let iz = Complex64::i() * z;
    let z2 = z * z;
    let cubic = iz * z2 / (1.0 + z2);
    if z.norm() < 0.5 {
        // 1 − e^{iz} + iz = −Σ_{k≥2} (iz)^k/k!
        let mut term = iz;
        let mut sum = Complex64::default();
        for k in 2..30 {
            term *= iz / k as f64;
            sum -= term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum - cubic
    } else {
        1.0 - iz.exp() + iz - cubic
    }
}

/// J(ω) = η ω^χ ω_c^{1−χ} e^{−ω/ω_c}.
pub fn spectral_density(bath: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!("frequency must be non-negative, got {omega}")));
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    Ok(bath.density_complex(omega, 0.0).re)
}

/// Ray integral (2/π) Re ∫ e^{iθ} g(r e^{iθ}) dr, where g behaves like
/// r^{power−1} near zero. The first panel is mapped with r = r₁ y^{1/power}
/// so the integrand is bounded there. `scale` is a rough size of the
/// result; the absolute tolerance shrinks with it.
fn ray_integral<G>(bath: &BathSpec, t: f64, power: f64, scale: f64, g: G) -> Result<f64>
where
    G: Fn(f64, Complex64) -> Complex64,
{
    let (sin, cos) = RAY_ANGLE.sin_cos();
    let rot = Complex64::new(cos, sin);
    let wc = bath.omega_c;
    let r_max = wc * (60.0 + 3.0 * bath.chi) / cos;

    let mut breaks: Vec<f64> = [wc, 4.0 * wc, 16.0 * wc].to_vec();
    if t > 0.0 {
        breaks.extend([0.5, 2.0, 8.0, 32.0].iter().map(|k| k / t));
    }
    breaks.retain(|&b| b < r_max);
    breaks.push(r_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let first = breaks[0];

    let value_at = |r: f64| (rot * g(r, rot * r)).re;
    let inv = 1.0 / power;
    let head = integrate(
        |y: f64| {
            if y <= 0.0 {
                return 0.0;
            }
            let r = first * y.powf(inv);
            value_at(r) * first * inv * y.powf(inv - 1.0)
        },
        &[0.0, 1.0],
        quad_tolerance(scale),
    )?;
    let body = integrate(value_at, &breaks, quad_tolerance(scale))?;
    Ok(FRAC_2_PI * (head.value + body.value))
}

/// Q(t) = (2/π) ∫₀^∞ J(ω)(1 − cos ωt) coth(βω/2)/ω² dω.
pub fn dephasing_q(bath: &BathSpec, t: f64) -> Result<f64> {
    bath.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let power = if bath.is_zero_temperature() { bath.chi + 1.0 } else { bath.chi };
    let wt = bath.omega_c * t;
    let q = ray_integral(bath, t, power, bath.eta * wt * wt, |r, omega| {
        let j = bath.density_complex(r, RAY_ANGLE);
        j * bath.coth(omega) * dephasing_factor(omega * t) / (omega * omega)
    })?;
    Ok(q.max(0.0))
}

/// C(t) = (2/π) ∫₀^∞ J(ω) cos(ωt) coth(βω/2) dω.
pub fn bath_correlation(bath: &BathSpec, t: f64) -> Result<f64> {
    bath.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
    }
    let power = if bath.is_zero_temperature() { bath.chi + 1.0 } else { bath.chi };
    ray_integral(bath, t, power, 1.0, |r, omega| {
        let j = bath.density_complex(r, RAY_ANGLE);
        j * bath.coth(omega) * (Complex64::i() * omega * t).exp()
    })
}

/// Long-time limit of Q at zero temperature, (2/π)ηΓ(χ−1), for χ > 1.
pub fn plateau_q(bath: &BathSpec) -> Result<f64> {
    bath.validate()?;
    if !(bath.chi > 1.0) || !bath.is_zero_temperature() {
        return Err(Error::domain("a coherence plateau needs a super-Ohmic bath at zero temperature"));
    }
    Ok(FRAC_2_PI * bath.eta * gamma_fn(bath.chi - 1.0)?)
}

/// Which leading-order form of Q to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    ShortTime,
    SubOhmic,
    Ohmic,
    SuperOhmic,
}

/// Leading-order asymptotic forms of Q with their tabulated constants.
pub fn asymptotic_q(bath: &BathSpec, t: f64, regime: Regime) -> Result<f64> {
    bath.validate()?;
    if !(t > 0.0) {
        return Err(Error::domain(format!("asymptotic forms need t > 0, got {t}")));
    }
    let BathSpec { eta, chi, omega_c, .. } = *bath;
    let mismatch = |want: &str| Err(Error::domain(format!("regime {regime:?} needs {want}, got chi = {chi}")));
    match regime {
        Regime::ShortTime => Ok(0.5 * eta * gamma_fn(chi + 1.0)? * omega_c * omega_c * t * t),
        Regime::SubOhmic => {
            if !(chi < 1.0) {
                return mismatch("chi < 1");
            }
            let c = FRAC_2_PI * eta * omega_c.powf(1.0 - chi) * gamma_fn(1.0 - chi)? * sin_pi(0.5 * chi);
            Ok(c * t.powf(1.0 - chi))
        }
        Regime::Ohmic => {
            if chi != 1.0 {
                return mismatch("chi = 1");
            }
            Ok(0.5 * eta * (omega_c * omega_c * t * t).ln())
        }
        Regime::SuperOhmic => {
            if !(chi > 1.0) {
                return mismatch("chi > 1");
            }
            Ok(FRAC_2_PI * eta * gamma_fn(chi - 1.0)?)
        }
    }
}

/// Model that produced a coherence series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Exact,
    Markov,
    Tcl,
    Fractional,
    FractionalPlateau,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Exact => "exact",
            SeriesKind::Markov => "markov",
            SeriesKind::Tcl => "tcl",
            SeriesKind::Fractional => "fractional",
            SeriesKind::FractionalPlateau => "fractional-plateau",
        })
    }
}

/// Coherence u(t_k) on a time grid, normalised to u(0) = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
    kind: SeriesKind,
}

impl CoherenceSeries {
    pub const COLUMNS: [&'static str; 4] = ["t", "re_u", "im_u", "abs_u"];

    pub fn new(times: Vec<f64>, values: Vec<Complex64>, kind: SeriesKind) -> Result<Self> {
        validate_grid(&times)?;
        if values.len() != times.len() {
            return Err(Error::validation(format!("{} values for {} times", values.len(), times.len())));
        }
        Ok(CoherenceSeries { times, values, kind })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|u| u.norm()).collect()
    }

    /// Rows matching [`Self::COLUMNS`].
    pub fn rows(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        self.times.iter().zip(&self.values).map(|(&t, u)| [t, u.re, u.im, u.norm()])
    }

    /// Largest |u_k − v_k| against a series on the same grid.
    pub fn max_deviation(&self, other: &CoherenceSeries) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::validation("series are on different grids"));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

/// Non-empty, finite, non-negative and strictly increasing.
pub fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::validation("time grid is empty"));
    }
    if !(times[0] >= 0.0) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("times must be strictly increasing"));
    }
    Ok(())
}

/// `points` equally spaced times on [0, end].
pub fn uniform_grid(end: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(end > 0.0 && end.is_finite()) {
        return Err(Error::validation("a uniform grid needs end > 0 and at least two points"));
    }
    let h = end / (points - 1) as f64;
    Ok((0..points).map(|k| if k + 1 == points { end } else { k as f64 * h }).collect())
}

/// u(t) = e^{iεt} e^{−Q(t)}. The phase sign matches ρ₁₀ under −i[H, ρ]
/// with H = (ε/2)σ_z, the same convention as the Markov and TCL models.
pub fn exact_coherence(bath: &BathSpec, epsilon: f64, times: &[f64]) -> Result<CoherenceSeries> {
    validate_grid(times)?;
    let values = times
        .iter()
        .map(|&t| Ok(Complex64::from_polar((-dephasing_q(bath, t)?).exp(), epsilon * t)))
        .collect::<Result<Vec<_>>>()?;
    CoherenceSeries::new(times.to_vec(), values, SeriesKind::Exact)
}

/// Least-squares rate γ from ln|u| ≈ c − 2γt on the window.
pub fn markov_fit_rate(series: &CoherenceSeries, window: (f64, f64)) -> Result<f64> {
    let (start, end) = window;
    if !(end > start) {
        return Err(Error::validation(format!("empty fit window [{start}, {end}]")));
    }
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t >= start && t <= end)
        .map(|(&t, u)| (t, u.norm()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::validation(format!(
            "fit window [{start}, {end}] holds {} samples, need at least 8",
            pts.len()
        )));
    }
    if pts.iter().any(|&(_, m)| !(m > 0.0)) {
        return Err(Error::validation("coherence vanishes inside the fit window"));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, m) in &pts {
        sxy += (t - mt) * (m.ln() - ml);
        sxx += (t - mt) * (t - mt);
    }
    Ok(-0.5 * sxy / sxx)
}

/// u(t) = e^{iεt} e^{−2γt}.
pub fn markov_coherence(gamma: f64, epsilon: f64, times: &[f64]) -> Result<CoherenceSeries> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("rate must be finite and non-negative, got {gamma}")));
    }
    validate_grid(times)?;
    let values = times.iter().map(|&t| Complex64::from_polar((-2.0 * gamma * t).exp(), epsilon * t)).collect();
    CoherenceSeries::new(times.to_vec(), values, SeriesKind::Markov)
}

/// Q̇(t) by a central difference of step δ. Q is even in t, so the left
/// point reflects through zero.
fn q_rate(bath: &BathSpec, t: f64, delta: f64) -> Result<f64> {
    let up = dephasing_q(bath, t + delta)?;
    let down = dephasing_q(bath, (t - delta).abs())?;
    Ok((up - down) / (2.0 * delta))
}

const TCL_NODES: usize = 10;

/// Integrates u̇ = (iε − 2γ(t))u with γ = Q̇/2. The rate integral over each
/// grid interval uses Gauss-Legendre panels no wider than 0.5/ω_c.
pub fn tcl_coherence(bath: &BathSpec, epsilon: f64, times: &[f64]) -> Result<CoherenceSeries> {
    bath.validate()?;
    validate_grid(times)?;
    let (nodes, weights) = gauss_legendre(TCL_NODES);
    let max_panel = 0.5 / bath.omega_c;

    let mut decay = 0.0; // 2∫γ from 0
    let mut t_prev = 0.0;
    let mut values = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        if t > t_prev {
            let span = t - t_prev;
            let step = if k > 0 { span } else { t };
            let delta = step.min(1e-3) / 4.0;
            let panels = (span / max_panel).ceil().max(1.0) as usize;
            let w = span / panels as f64;
            for p in 0..panels {
                let a = t_prev + p as f64 * w;
                for (x, wt) in nodes.iter().zip(&weights) {
                    decay += 0.5 * w * wt * q_rate(bath, a + 0.5 * w * (1.0 + x), delta)?;
                }
            }
        }
        values.push(Complex64::from_polar((-decay).exp(), epsilon * t));
        t_prev = t;
    }
    CoherenceSeries::new(times.to_vec(), values, SeriesKind::Tcl)
}
