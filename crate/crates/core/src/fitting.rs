//! Extraction of an effective fractional order from coherence data: the
//! least-squares (α, λ) fit of E_α(−λt^α), with or without a plateau, the
//! optimization-free local-order and single-point estimators, and the
//! fitting-window rule based on the bath correlation time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{mittag_leffler, FractionalOrder};
use crate::spinboson::{bath_correlation, plateau_q, BathSpec, CoherenceSeries};

/// Closed interval of times entering a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub t_start: f64,
    pub t_end: f64,
}

impl FitWindow {
    pub fn new(t_start: f64, t_end: f64) -> Result<Self> {
        let w = FitWindow { t_start, t_end };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start > 0.0 && self.t_end > self.t_start && self.t_end.is_finite()) {
            return Err(Error::validation(format!(
                "fit window needs 0 < t_start < t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(())
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t <= self.t_end
    }
}

/// Outcome of [`fit_fractional`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: FractionalOrder,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_inf: Option<f64>,
    pub window: FitWindow,
    pub rmse: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl FitResult {
    /// Model magnitude at time t.
    pub fn model(&self, t: f64) -> Result<f64> {
        model_value(self.alpha.value(), self.lambda, self.u_inf, t)
    }
}

/// How the long-time plateau enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Plateau {
    /// Plain E_α(−λt^α).
    #[default]
    None,
    /// u_∞ + (1 − u_∞)E_α(−λt^α) with the given u_∞.
    Fixed(f64),
    /// u_∞ = e^{−Q_∞} from the bath when one is given and super-Ohmic,
    /// otherwise the median of the last tenth of the data.
    Auto(Option<BathSpec>),
}

fn check_plateau(u_inf: f64) -> Result<()> {
    if !(0.0..1.0).contains(&u_inf) {
        return Err(Error::domain(format!("plateau must lie in [0, 1), got {u_inf}")));
    }
    Ok(())
}

fn model_value(alpha: f64, lambda: f64, u_inf: Option<f64>, t: f64) -> Result<f64> {
    let e = mittag_leffler(FractionalOrder::new(alpha)?, -lambda * t.powf(alpha))?;
    Ok(match u_inf {
        Some(p) => p + (1.0 - p) * e,
        None => e,
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Resolves a plateau mode against the data.
pub fn resolve_plateau(target: &CoherenceSeries, plateau: Plateau) -> Result<Option<f64>> {
    let u = match plateau {
        Plateau::None => return Ok(None),
        Plateau::Fixed(p) => p,
        Plateau::Auto(Some(bath)) if bath.chi > 1.0 && bath.is_zero_temperature() => (-plateau_q(&bath)?).exp(),
        Plateau::Auto(_) => {
            let mags = target.magnitudes();
            let tail = (mags.len() / 10).max(1);
            median(mags[mags.len() - tail..].to_vec())
        }
    };
    check_plateau(u)?;
    Ok(Some(u))
}

/// In-window (t, |u|) samples.
fn window_samples(target: &CoherenceSeries, window: &FitWindow) -> Result<Vec<(f64, f64)>> {
    window.validate()?;
    let pts: Vec<(f64, f64)> = target
        .times()
        .iter()
        .zip(target.values())
        .filter(|(&t, _)| window.contains(t))
        .map(|(&t, u)| (t, u.norm()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::validation(format!(
            "fit window [{}, {}] holds {} samples, need at least 4",
            window.t_start,
            window.t_end,
            pts.len()
        )));
    }
    Ok(pts)
}

fn rmse_on(samples: &[(f64, f64)], alpha: f64, lambda: f64, u_inf: Option<f64>) -> Result<f64> {
    let mut ss = 0.0;
    for &(t, m) in samples {
        let d = model_value(alpha, lambda, u_inf, t)? - m;
        ss += d * d;
    }
    Ok((ss / samples.len() as f64).sqrt())
}

/// Root-mean-square misfit of the model magnitude against |u| on the window.
pub fn rmse_objective(
    alpha: FractionalOrder,
    lambda: f64,
    target: &CoherenceSeries,
    window: &FitWindow,
    u_inf: Option<f64>,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("rate must be positive, got {lambda}")));
    }
    if let Some(p) = u_inf {
        check_plateau(p)?;
    }
    rmse_on(&window_samples(target, window)?, alpha.value(), lambda, u_inf)
}

pub const ALPHA_GRID_STEP: f64 = 0.05;
pub const LAMBDA_GRID: (f64, f64, usize) = (1e-3, 1e2, 41);
pub const SIMPLEX_DIAMETER: f64 = 1e-6;
pub const MAX_EVALUATIONS: usize = 10_000;

/// Coarse α × ln λ grid.
fn coarse_grid() -> Vec<(f64, f64)> {
    let (lo, hi, n) = LAMBDA_GRID;
    let steps = (1.0 / ALPHA_GRID_STEP).round() as usize;
    let mut cells = Vec::with_capacity(steps * n);
    for i in 1..=steps {
        let alpha = (i as f64 * ALPHA_GRID_STEP).min(1.0);
        for j in 0..n {
            let f = j as f64 / (n - 1) as f64;
            cells.push((alpha, lo.ln() + f * (hi / lo).ln()));
        }
    }
    cells
}

struct Simplex {
    best: Vec<f64>,
    value: f64,
    evaluations: usize,
    converged: bool,
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            d = d.max(s.sqrt());
        }
    }
    d
}

/// Nelder–Mead with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5, stopped when the simplex diameter drops below `tol`.
fn nelder_mead<F>(f: &mut F, start: &[f64], steps: &[f64], tol: f64, budget: usize) -> Simplex
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    for (k, &s) in steps.iter().enumerate() {
        let mut p = start.to_vec();
        p[k] += s;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evaluations)).collect();

    let mut converged = false;
    while evaluations < budget {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if diameter(&pts) < tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |c: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + c * (pts[n][k] - centroid[k])).collect() };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evaluations);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evaluations);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = eval(&x, &mut evaluations);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x, &mut evaluations);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<f64> = (0..n).map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k])).collect();
                    vals[i] = eval(&p, &mut evaluations);
                    pts[i] = p;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("simplex is non-empty");
    Simplex { best: pts[best].clone(), value: vals[best], evaluations, converged }
}

/// Simplex refinement in (α, ln λ) from a starting guess, restarted once
/// around the first optimum.
fn refine(samples: &[(f64, f64)], u_inf: Option<f64>, alpha: f64, ln_lambda: f64, budget: usize) -> Simplex {
    let mut objective = |x: &[f64]| {
        if !(x[0] > 0.0 && x[0] <= 1.0) || !x[1].is_finite() {
            return f64::INFINITY;
        }
        rmse_on(samples, x[0], x[1].exp(), u_inf).unwrap_or(f64::INFINITY)
    };
    let ln_step = (LAMBDA_GRID.1 / LAMBDA_GRID.0).ln() / (LAMBDA_GRID.2 - 1) as f64;
    let steps = [-0.5 * ALPHA_GRID_STEP, 0.5 * ln_step];
    let first = nelder_mead(&mut objective, &[alpha, ln_lambda], &steps, SIMPLEX_DIAMETER, budget);
    let left = budget.saturating_sub(first.evaluations);
    if left == 0 {
        return first;
    }
    let restart_steps = [-0.1 * steps[0].abs(), 0.1 * steps[1]];
    let second = nelder_mead(&mut objective, &first.best, &restart_steps, SIMPLEX_DIAMETER, left);
    let evaluations = first.evaluations + second.evaluations;
    let converged = second.converged;
    let (best, value) =
        if second.value <= first.value { (second.best, second.value) } else { (first.best, first.value) };
    Simplex { best, value, evaluations, converged }
}

fn finish(simplex: Simplex, u_inf: Option<f64>, window: FitWindow, extra: usize) -> Result<FitResult> {
    if !simplex.value.is_finite() {
        return Err(Error::Estimation("no finite objective value was found".into()));
    }
    Ok(FitResult {
        alpha: FractionalOrder::new(simplex.best[0])?,
        lambda: simplex.best[1].exp(),
        u_inf,
        window,
        rmse: simplex.value,
        converged: simplex.converged,
        evaluations: simplex.evaluations + extra,
    })
}

/// Least-squares (α, λ) from a coarse grid followed by simplex refinement.
/// Non-convergence within the evaluation budget is reported through
/// `converged = false` with the best point found.
pub fn fit_fractional(target: &CoherenceSeries, window: &FitWindow, plateau: Plateau) -> Result<FitResult> {
    let samples = window_samples(target, window)?;
    if samples.iter().any(|&(_, m)| !(m > 0.0)) {
        return Err(Error::validation("coherence vanishes inside the fit window"));
    }
    let u_inf = resolve_plateau(target, plateau)?;
    let grid = coarse_grid();
    let scores: Vec<f64> =
        grid.par_iter().map(|&(a, l)| rmse_on(&samples, a, l.exp(), u_inf).unwrap_or(f64::INFINITY)).collect();
    let mut best = 0;
    for (k, s) in scores.iter().enumerate() {
        if *s < scores[best] {
            best = k;
        }
    }
    let (alpha, ln_lambda) = grid[best];
    let simplex = refine(&samples, u_inf, alpha, ln_lambda, MAX_EVALUATIONS - grid.len());
    finish(simplex, u_inf, *window, grid.len())
}

/// Simplex refinement only, started from a caller-supplied (α, λ), e.g.
/// the local-order and single-point estimates.
pub fn fit_from_guess(
    target: &CoherenceSeries,
    window: &FitWindow,
    u_inf: Option<f64>,
    alpha: FractionalOrder,
    lambda: f64,
) -> Result<FitResult> {
    if let Some(p) = u_inf {
        check_plateau(p)?;
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("rate must be positive, got {lambda}")));
    }
    let samples = window_samples(target, window)?;
    let simplex = refine(&samples, u_inf, alpha.value(), lambda.ln(), MAX_EVALUATIONS);
    finish(simplex, u_inf, *window, 0)
}

pub const SLOPE_RUN_TOLERANCE: f64 = 0.05;
pub const SLOPE_RUN_MIN_POINTS: usize = 5;

/// Median of the local log-log slope of −ln|v| over its longest run of
/// nearly constant values, with v = (|u| − u_∞)/(1 − u_∞).
pub fn local_order_estimate(target: &CoherenceSeries, u_inf: Option<f64>) -> Result<f64> {
    if let Some(p) = u_inf {
        check_plateau(p)?;
    }
    let p = u_inf.unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = target
        .times()
        .iter()
        .zip(target.values())
        .filter_map(|(&t, u)| {
            let v = (u.norm() - p) / (1.0 - p);
            let x = -v.ln();
            (t > 0.0 && x > 0.0 && x.is_finite()).then(|| (t.ln(), x.ln()))
        })
        .collect();
    if pts.len() < SLOPE_RUN_MIN_POINTS {
        return Err(Error::Estimation(format!(
            "only {} samples carry a positive decay exponent; supply a longer series",
            pts.len()
        )));
    }
    let slopes: Vec<f64> = pts.windows(3).map(|w| (w[2].1 - w[0].1) / (w[2].0 - w[0].0)).collect();

    let mut best: (usize, usize) = (0, 0);
    let mut start = 0;
    for k in 1..=slopes.len() {
        let broken = k == slopes.len() || (slopes[k] - slopes[k - 1]).abs() >= SLOPE_RUN_TOLERANCE;
        if broken {
            if k - start > best.1 - best.0 {
                best = (start, k);
            }
            start = k;
        }
    }
    if best.1 - best.0 < SLOPE_RUN_MIN_POINTS {
        return Err(Error::Estimation(
            "no run of nearly constant local slope; supply a longer or denser series".into(),
        ));
    }
    Ok(median(slopes[best.0..best.1].to_vec()))
}

/// λ such that the model passes through (t*, u*).
pub fn lambda_from_point(alpha: FractionalOrder, t_star: f64, u_star: f64, u_inf: Option<f64>) -> Result<f64> {
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(Error::domain(format!("time must be positive, got {t_star}")));
    }
    let p = u_inf.unwrap_or(0.0);
    check_plateau(p)?;
    if !(u_star > p && u_star < 1.0) {
        return Err(Error::domain(format!("point value must lie in ({p}, 1), got {u_star}")));
    }
    let v = (u_star - p) / (1.0 - p);
    let ta = t_star.powf(alpha.value());
    let g = |ln_l: f64| -> Result<f64> { Ok(mittag_leffler(alpha, -ln_l.exp() * ta)? - v) };

    // g decreases in ln λ
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut expansions = 0;
    while g(lo)? <= 0.0 || g(hi)? >= 0.0 {
        if g(lo)? <= 0.0 {
            lo -= 2.0 * (hi - lo);
        } else {
            hi += 2.0 * (hi - lo);
        }
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Estimation("could not bracket the rate".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

const CORRELATION_SCAN_STEP: f64 = 0.01;
const CORRELATION_SCAN_LIMIT: f64 = 1e3;

/// First time at which |C(t)| falls to |C(0)|/e, in units where the scan
/// step and limit scale with 1/ω_c.
pub fn bath_correlation_time(bath: &BathSpec) -> Result<f64> {
    let c0 = bath_correlation(bath, 0.0)?.abs();
    if !(c0 > 0.0) {
        return Err(Error::Estimation("bath correlation vanishes at t = 0".into()));
    }
    let level = c0 * (-1f64).exp();
    let below = |t: f64| -> Result<bool> { Ok(bath_correlation(bath, t)?.abs() <= level) };
    let unit = 1.0 / bath.omega_c;
    let mut lo = 0.0;
    let mut step = CORRELATION_SCAN_STEP * unit;
    let hi = loop {
        let t = lo + step;
        if t > CORRELATION_SCAN_LIMIT * unit {
            return Err(Error::Estimation(format!(
                "bath correlation stays above 1/e of its initial value up to t = {}",
                CORRELATION_SCAN_LIMIT * unit
            )));
        }
        if below(t)? {
            break t;
        }
        lo = t;
        if lo >= 10.0 * unit {
            step = 0.01 * lo;
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-9 * unit {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Window [2τ_B, k·τ_B] with k ∈ [20, 60].
pub fn correlation_window(bath: &BathSpec, end_multiple: f64) -> Result<FitWindow> {
    if !(20.0..=60.0).contains(&end_multiple) {
        return Err(Error::domain(format!("window end must be 20 to 60 correlation times, got {end_multiple}")));
    }
    let tau = bath_correlation_time(bath)?;
    FitWindow::new(2.0 * tau, end_multiple * tau)
}
