//! Power-law memory kernels and their sum-of-exponentials compression.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{rgamma, FractionalOrder};

/// The three power-law kernels attached to a fractional order α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// t^{−α}/Γ(1−α), the weight on past rates in the Caputo derivative.
    CaputoInner,
    /// t^{α−1}/Γ(α), the kernel of the equivalent Volterra equation.
    Volterra,
    /// t^{α−2}/Γ(α−1), the time derivative of the Volterra kernel.
    DifferentialConvolution,
}

pub fn kernel_eval(kind: KernelKind, alpha: FractionalOrder, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("kernels are singular at t <= 0 (t = {t})")));
    }
    let a = alpha.value();
    let (power, arg) = match kind {
        KernelKind::CaputoInner => (-a, 1.0 - a),
        KernelKind::Volterra => (a - 1.0, a),
        KernelKind::DifferentialConvolution => (a - 2.0, a - 1.0),
    };
    let r = rgamma(arg);
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(power) * r)
}

/// Necessary-condition probe for complete monotonicity: every divided
/// difference of order m ≤ `order` on `grid` must carry the sign (−1)^m.
pub fn complete_monotonicity_probe(
    alpha: FractionalOrder,
    kind: KernelKind,
    grid: &[f64],
    order: usize,
) -> Result<bool> {
    let values = grid.iter().map(|&t| kernel_eval(kind, alpha, t)).collect::<Result<Vec<_>>>()?;
    probe_values(grid, &values, order)
}

/// [`complete_monotonicity_probe`] for arbitrary sampled values.
pub fn probe_values(grid: &[f64], values: &[f64], order: usize) -> Result<bool> {
    if grid.len() != values.len() {
        return Err(Error::validation("grid and values differ in length"));
    }
    if order > 6 {
        return Err(Error::validation("probe order is limited to 6"));
    }
    if grid.len() < order + 1 {
        return Err(Error::validation(format!("order {order} needs at least {} grid points", order + 1)));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("grid must be strictly increasing"));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut diff = values.to_vec();
    for m in 0..=order {
        if m > 0 {
            diff = (0..diff.len() - 1).map(|i| (diff[i + 1] - diff[i]) / (grid[i + m] - grid[i])).collect();
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        // roundoff floor for an m-th divided difference
        let span = grid[grid.len() - 1] - grid[0];
        let min_gap = grid.windows(2).map(|w| w[1] - w[0]).fold(span, f64::min);
        let floor = 1e-12 * scale / min_gap.powi(m as i32).max(f64::MIN_POSITIVE);
        if diff.iter().any(|d| sign * d < -floor) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sum-of-exponentials approximation Σ w_q e^{−ξ_q t} of the Volterra
/// kernel t^{α−1}/Γ(α) on [t_min, t_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoeKernel {
    alpha: FractionalOrder,
    terms: Vec<(f64, f64)>,
    t_min: f64,
    t_max: f64,
    tol: f64,
}

impl SoeKernel {
    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    /// (weight, rate) pairs with strictly increasing rates.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn valid_range(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(w, xi)| w * (-xi * t).exp()).sum()
    }

    /// Largest relative error against the exact kernel on `grid`.
    pub fn audit(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&t| {
                let exact = kernel_eval(KernelKind::Volterra, self.alpha, t).unwrap_or(f64::NAN);
                ((self.eval(t) - exact) / exact).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub const SOE_TERM_BUDGET: usize = 256;
const AUDIT_POINTS: usize = 256;

/// Log-spaced points on [a, b]; a single point when a == b.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if a == b || n < 2 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Builds an SOE approximation by trapezoidal quadrature of
/// t^{α−1}/Γ(α) = (sin πα/π) ∫ e^{(1−α)x} exp(−eˣ t) dx in x = ln ξ.
///
/// Nodes sit on the dyadic lattice x = jΔ. Nodes below the range where
/// e^{−ξ t_max} differs from one are lumped into a single ξ = 0 term, nodes
/// past the decay of e^{−ξ t_min} are dropped, and Δ is halved until the
/// relative error passes an audit on a log grid of 256 points.
pub fn soe_compress(alpha: FractionalOrder, t_min: f64, t_max: f64, tol: f64) -> Result<SoeKernel> {
    if !(t_min > 0.0 && t_max >= t_min) {
        return Err(Error::domain(format!("invalid SOE range [{t_min}, {t_max}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("SOE tolerance must be positive"));
    }
    if alpha.is_one() {
        return Ok(SoeKernel { alpha, terms: vec![(1.0, 0.0)], t_min, t_max, tol });
    }
    let a = alpha.value();
    let pref = (PI * a).sin() / PI;
    let audit_grid = log_grid(t_min, t_max, AUDIT_POINTS);

    // e^{-ξ t} ≈ 1 below x_lo, relative effect ~ (ξ t_max)^{2-α}
    let x_lo = (0.1 * tol).powf(1.0 / (2.0 - a)).ln() - t_max.ln();
    // e^{-ξ t_min} negligible beyond x_hi
    let x_hi = (1.5 * (1.0 / tol).ln() + 10.0).ln() + 1.0 - t_min.ln();

    let mut best = f64::INFINITY;
    let mut delta = 1.0;
    for _ in 0..12 {
        let j_lo = (x_lo / delta).floor() as i64;
        let j_hi = (x_hi / delta).ceil() as i64;
        let count = (j_hi - j_lo + 1) as usize + 1;
        if count > SOE_TERM_BUDGET {
            break;
        }
        let decay = (1.0 - a) * delta;
        let lumped = pref * delta * ((1.0 - a) * j_lo as f64 * delta).exp() / (1.0 - (-decay).exp());
        let mut terms = vec![(lumped, 0.0)];
        for j in (j_lo + 1)..=j_hi {
            let x = j as f64 * delta;
            terms.push((pref * delta * ((1.0 - a) * x).exp(), x.exp()));
        }
        let soe = SoeKernel { alpha, terms, t_min, t_max, tol };
        let err = soe.audit(&audit_grid);
        if err <= tol {
            return Ok(soe);
        }
        best = best.min(err);
        delta *= 0.5;
    }
    Err(Error::Accuracy {
        what: format!("SOE compression within {SOE_TERM_BUDGET} terms"),
        achieved: best,
        required: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ord(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn closed_forms() {
        let v = kernel_eval(KernelKind::Volterra, ord(0.5), 1.0).unwrap();
        assert!((v - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert_eq!(kernel_eval(KernelKind::Volterra, ord(1.0), 7.3).unwrap(), 1.0);
        let c = kernel_eval(KernelKind::CaputoInner, ord(0.5), 4.0).unwrap();
        assert!((c - 0.282_094_791_773_878_1).abs() < 1e-15);
        assert!(kernel_eval(KernelKind::Volterra, ord(0.5), 0.0).is_err());
        assert!(kernel_eval(KernelKind::CaputoInner, ord(0.5), -1.0).is_err());
    }

    #[test]
    fn differential_kernel_is_derivative_of_volterra() {
        for a in [0.3, 0.5, 0.8] {
            for k in 0..40 {
                let t = 0.5 * (100.0f64).powf(k as f64 / 39.0);
                let h = 1e-5 * t;
                let fd = (kernel_eval(KernelKind::Volterra, ord(a), t + h).unwrap()
                    - kernel_eval(KernelKind::Volterra, ord(a), t - h).unwrap())
                    / (2.0 * h);
                let k_d = kernel_eval(KernelKind::DifferentialConvolution, ord(a), t).unwrap();
                assert!(((fd - k_d) / k_d).abs() < 1e-6, "alpha={a} t={t}");
            }
        }
    }

    #[test]
    fn volterra_laplace_transform() {
        use crate::quad::{integrate, Tolerance};
        // t = v^{1/α} removes the endpoint singularity
        for a in [0.3, 0.5, 0.9] {
            for s in [0.5, 1.0, 2.0] {
                let v_max = (50.0f64 / s).powf(a);
                let f = |v: f64| {
                    let t = v.powf(1.0 / a);
                    let jac = t / (a * v);
                    (-s * t).exp() * kernel_eval(KernelKind::Volterra, ord(a), t).unwrap() * jac
                };
                let got = integrate(f, &[0.0, v_max / 4.0, v_max], Tolerance::new(1e-12, 1e-12)).unwrap().value;
                let want = f64::powf(s, -a);
                assert!(((got - want) / want).abs() < 1e-6, "alpha={a} s={s}: {got}");
            }
        }
    }

    #[test]
    fn monotonicity_probe_examples() {
        let grid = log_grid(0.1, 10.0, 50);
        assert!(complete_monotonicity_probe(ord(0.5), KernelKind::Volterra, &grid, 4).unwrap());
        assert!(!complete_monotonicity_probe(ord(0.5), KernelKind::DifferentialConvolution, &grid, 1).unwrap());
        let flipped: Vec<f64> =
            grid.iter().map(|&t| -kernel_eval(KernelKind::DifferentialConvolution, ord(0.5), t).unwrap()).collect();
        assert!(probe_values(&grid, &flipped, 1).unwrap());
        assert!(complete_monotonicity_probe(ord(1.0), KernelKind::Volterra, &grid, 3).unwrap());
        assert!(complete_monotonicity_probe(ord(0.5), KernelKind::Volterra, &grid[..3], 3).is_err());
    }

    #[test]
    fn soe_examples() {
        let soe = soe_compress(ord(0.5), 1e-2, 1e2, 1e-6).unwrap();
        assert!(soe.len() <= 80, "{} terms", soe.len());
        assert!(soe.terms().windows(2).all(|w| w[1].1 > w[0].1));
        let one = soe_compress(ord(1.0), 0.3, 9.0, 1e-9).unwrap();
        assert_eq!(one.terms(), &[(1.0, 0.0)]);
        let point = soe_compress(ord(0.5), 1.0, 1.0, 1e-3).unwrap();
        assert!(point.audit(&[1.0]) <= 1e-3);
    }

    #[test]
    fn soe_rejects_bad_input() {
        assert!(soe_compress(ord(0.5), 2.0, 1.0, 1e-6).is_err());
        assert!(soe_compress(ord(0.5), 1.0, 2.0, 0.0).is_err());
        let err = soe_compress(ord(0.5), 1e-8, 1e8, 1e-15).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn soe_holds_off_the_audit_grid(a in 0.1f64..0.95, lo in -3.0f64..0.0, span in 0.5f64..5.0, seed in 0u64..1000) {
            let (t_min, t_max) = (10f64.powf(lo), 10f64.powf(lo + span));
            let soe = soe_compress(ord(a), t_min, t_max, 1e-6).unwrap();
            let fresh: Vec<f64> = (0..300)
                .map(|k| {
                    let u = ((k as u64 * 7919 + seed * 104_729) % 10_007) as f64 / 10_007.0;
                    (t_min.ln() + u * (t_max.ln() - t_min.ln())).exp()
                })
                .collect();
            prop_assert!(soe.audit(&fresh) <= 1e-6);
        }
    }
}
