//! Subordination of GKSL semigroups by the inverse α-stable clock:
//! ρ(t) = ∫₀^∞ f_α(u, t) e^{u𝓛} ρ(0) du with f_α(u, t) = t^{−α} M_α(u t^{−α}).

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{
    hermiticity_defect, map_diagnostics, unvectorize, CMatrix, CptpReport, DensityMatrix, GkslGenerator, StateDeviation,
};
use crate::quad::composite_gauss_legendre;
use crate::specfun::{m_wright, m_wright_quantile, m_wright_tail, mittag_leffler, FractionalOrder};

/// Inverse-stable operational time U(t) at physical time t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationalClock {
    alpha: FractionalOrder,
    t: f64,
}

impl OperationalClock {
    pub fn new(alpha: FractionalOrder, t: f64) -> Result<Self> {
        if alpha.is_one() {
            return Err(Error::domain("the operational clock needs alpha < 1"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("clock time must be positive, got {t}")));
        }
        Ok(OperationalClock { alpha, t })
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// t^α, the scale of U(t).
    fn scale(&self) -> f64 {
        self.t.powf(self.alpha.value())
    }

    /// E[U(t)] = t^α / Γ(1+α).
    pub fn mean(&self) -> f64 {
        self.scale() * crate::specfun::rgamma(1.0 + self.alpha.value())
    }
}

/// Density f_α(u, t) of the operational time; zero for u < 0.
pub fn levy_density(clock: &OperationalClock, u: f64) -> Result<f64> {
    if u < 0.0 {
        return Ok(0.0);
    }
    let s = clock.scale();
    Ok(m_wright(clock.alpha, u / s)? / s)
}

/// P(U(t) ≤ u).
pub fn levy_cdf(clock: &OperationalClock, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - m_wright_tail(clock.alpha, u / clock.scale())?)
}

/// Draws U(t) = t^α S^{−α} with S standard one-sided α-stable, S from the
/// Chambers–Mallows–Stuck representation (evaluated in logs).
pub fn sample_clock<R: Rng + ?Sized>(clock: &OperationalClock, rng: &mut R) -> f64 {
    let a = clock.alpha.value();
    let v = std::f64::consts::PI * rng.sample::<f64, _>(Open01);
    let w = -rng.sample::<f64, _>(Open01).ln();
    let ln_s = (a * v).sin().ln() - v.sin().ln() / a + (1.0 - a) / a * (((1.0 - a) * v).sin().ln() - w.ln());
    clock.scale() * (-a * ln_s).exp()
}

/// Generator for trajectory `index` of a run seeded with `seed`: one
/// ChaCha stream per trajectory, so draws do not depend on scheduling.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n` clock draws, draw k taken from stream k.
pub fn clock_samples(clock: &OperationalClock, seed: u64, n: usize) -> Vec<f64> {
    (0..n as u64).into_par_iter().map(|k| sample_clock(clock, &mut trajectory_rng(seed, k))).collect()
}

/// Truncation and refinement rule for the subordination integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubordinationQuad {
    /// Density mass allowed beyond the truncation point.
    pub tail_mass: f64,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
    /// Agreement required between successive panel doublings.
    pub tol: f64,
}

impl Default for SubordinationQuad {
    fn default() -> Self {
        SubordinationQuad { tail_mass: 1e-8, order: 16, initial_panels: 4, max_panels: 4096, tol: 1e-8 }
    }
}

impl SubordinationQuad {
    fn validate(&self) -> Result<()> {
        if !(self.tail_mass > 0.0 && self.tail_mass < 1.0) {
            return Err(Error::validation("tail_mass must lie in (0, 1)"));
        }
        if self.order < 2 || self.initial_panels == 0 || self.max_panels < self.initial_panels {
            return Err(Error::validation("quadrature needs order ≥ 2 and 1 ≤ initial_panels ≤ max_panels"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::validation("quadrature tolerance must be positive"));
        }
        Ok(())
    }
}

/// ∫₀^{U_max} f_α(u,t) g(u) du for vector-valued g, with U_max from the
/// exact tail mass and panels doubled until successive results agree.
pub fn subordinate_with<G>(clock: &OperationalClock, quad: &SubordinationQuad, g: G) -> Result<Vec<Complex64>>
where
    G: Fn(f64) -> Result<Vec<Complex64>>,
{
    quad.validate()?;
    let u_max = clock.scale() * m_wright_quantile(clock.alpha, quad.tail_mass)?;
    let rule = |panels: usize| -> Result<Vec<Complex64>> {
        let mut acc: Vec<Complex64> = Vec::new();
        for (u, w) in composite_gauss_legendre(0.0, u_max, panels, quad.order) {
            let weight = w * levy_density(clock, u)?;
            let val = g(u)?;
            if acc.is_empty() {
                acc = vec![Complex64::default(); val.len()];
            }
            for (a, v) in acc.iter_mut().zip(&val) {
                *a += v * weight;
            }
        }
        Ok(acc)
    };
    let mut panels = quad.initial_panels;
    let mut coarse = rule(panels)?;
    let mut gap = f64::INFINITY;
    while panels * 2 <= quad.max_panels {
        panels *= 2;
        let fine = rule(panels)?;
        gap = coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if gap <= quad.tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::Accuracy {
        what: format!("subordination quadrature at t = {} did not settle", clock.t),
        achieved: gap,
        required: quad.tol,
    })
}

/// ∫ f_α(u,t) e^{zu} du for a scalar eigenvalue z with Re z ≤ 0.
pub fn subordinate_scalar(clock: &OperationalClock, z: Complex64, quad: &SubordinationQuad) -> Result<Complex64> {
    if z.re > 0.0 {
        return Err(Error::domain("subordination of a growing mode diverges"));
    }
    Ok(subordinate_with(clock, quad, |u| Ok(vec![(z * u).exp()]))?[0])
}

/// The fractional map ∫ f_α(u,t) e^{u𝓛} du as a d²×d² matrix acting on
/// column-stacked states. The mass missing from the truncated quadrature is
/// placed on e^{U_max𝓛}, which keeps the map a convex mixture of CPTP maps
/// with unit total weight.
pub fn subordinated_map(
    gen: &GkslGenerator,
    alpha: FractionalOrder,
    t: f64,
    quad: &SubordinationQuad,
) -> Result<CMatrix> {
    let superop = gen.superoperator();
    let n = gen.dim() * gen.dim();
    if t == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }
    let clock = OperationalClock::new(alpha, t)?;
    // last component integrates the density itself
    let mut flat = subordinate_with(&clock, quad, |u| {
        let mut v = superop.propagator(u).as_slice().to_vec();
        v.push(Complex64::new(1.0, 0.0));
        Ok(v)
    })?;
    let mass = flat.pop().expect("mass component").re;
    let u_max = clock.scale() * m_wright_quantile(alpha, quad.tail_mass)?;
    let tail = superop.propagator(u_max) * Complex64::from((1.0 - mass).max(0.0));
    Ok(CMatrix::from_column_slice(n, n, &flat) + tail)
}

/// ρ(t) by the subordination quadrature; the result is checked against the
/// density-matrix invariants at 1e-8.
pub fn subordinated_propagate(
    gen: &GkslGenerator,
    alpha: FractionalOrder,
    t: f64,
    init: &DensityMatrix,
    quad: &SubordinationQuad,
) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
    }
    if init.dim() != gen.dim() {
        return Err(Error::validation("state and generator dimensions differ"));
    }
    if t == 0.0 {
        return Ok(init.clone());
    }
    let map = subordinated_map(gen, alpha, t, quad)?;
    let m = unvectorize(&(&map * init.to_vec()), gen.dim());
    let dev = StateDeviation::of(&m);
    if !(dev.worst() <= 1e-8) {
        return Err(Error::Accuracy {
            what: format!("subordinated state at t = {t}"),
            achieved: dev.worst(),
            required: 1e-8,
        });
    }
    Ok(DensityMatrix::from_unchecked(m))
}

/// Choi positivity and trace preservation of the subordinated map.
pub fn subordinated_cptp(
    gen: &GkslGenerator,
    alpha: FractionalOrder,
    t: f64,
    quad: &SubordinationQuad,
) -> Result<CptpReport> {
    map_diagnostics(&subordinated_map(gen, alpha, t, quad)?, gen.dim())
}

/// Monte-Carlo mean of an observable with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl TrajectoryEstimate {
    pub const COLUMNS: [&'static str; 5] = ["t", "mean", "stderr", "M", "seed"];

    /// Two-pass mean and sample deviation over values in their given order.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::domain("an estimate needs at least two samples"));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        Ok(TrajectoryEstimate { mean, stderr: sd / (n as f64).sqrt(), n_samples: n, seed })
    }
}

/// ⟨O⟩_t ≈ (1/M) Σ_k Re tr[O e^{u_k𝓛} ρ(0)] with u_k drawn from the clock.
/// Trajectory k always uses stream k, and values are reduced serially in
/// index order, so the result does not depend on the thread count.
pub fn trajectory_estimate(
    gen: &GkslGenerator,
    alpha: FractionalOrder,
    t: f64,
    init: &DensityMatrix,
    observable: &CMatrix,
    samples: usize,
    seed: u64,
) -> Result<TrajectoryEstimate> {
    let d = gen.dim();
    if init.dim() != d || observable.nrows() != d || observable.ncols() != d {
        return Err(Error::validation("generator, state and observable dimensions differ"));
    }
    if hermiticity_defect(observable) > 1e-12 {
        return Err(Error::validation("observable must be Hermitian"));
    }
    let clock = OperationalClock::new(alpha, t)?;
    let superop = gen.superoperator();
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let u = sample_clock(&clock, &mut trajectory_rng(seed, k));
            let rho = superop.semigroup_apply(u, init)?;
            Ok(rho.expectation(observable).re)
        })
        .collect::<Result<_>>()?;
    TrajectoryEstimate::from_values(&values, seed)
}

/// |E_α(−λt^α) − E_α(−λ(t−τ)^α) E_α(−λτ^α)|, the semigroup defect of a
/// dephasing eigenmode.
pub fn divisibility_defect(alpha: FractionalOrder, lambda: f64, t: f64, tau: f64) -> Result<f64> {
    if !(0.0 < tau && tau < t) {
        return Err(Error::domain(format!("need 0 < tau < t, got tau = {tau}, t = {t}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("rate must be positive"));
    }
    let a = alpha.value();
    let e = |s: f64| mittag_leffler(alpha, -lambda * s.powf(a));
    Ok((e(t)? - e(t - tau)? * e(tau)?).abs())
}

/// Coherence read-out used by the benchmarks: ρ_10 of a qubit state.
pub fn coherence(rho: &DensityMatrix) -> Complex64 {
    rho.entry(1, 0)
}
