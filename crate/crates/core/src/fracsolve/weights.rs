//! Quadrature weights for the fractional Adams–Moulton step.
//!
//! Second differences (m+1)^p − 2m^p + (m−1)^p lose about log10(m²) digits
//! when evaluated directly, so lags past one go through the even binomial
//! series of (1+x)^p + (1−x)^p − 2 with x = 1/m.

use serde::{Deserialize, Serialize};

use crate::specfun::{rgamma, FractionalOrder};

/// Which weight family drives the predictor and corrector sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightScheme {
    /// Predictor exponent 1−α, corrector exponent α, prefactor h^α/Γ(1+α),
    /// explicit corrector with a unit weight on the predicted value.
    PaperPrinted,
    /// Product rectangle predictor and product trapezoid corrector
    /// (exponents α and α+1), with the corrector solved implicitly.
    StandardDFF,
}

impl WeightScheme {
    /// At α = 1 both families collapse to the classical rectangle and
    /// trapezoid rules, which the printed formulas do not reproduce.
    pub(crate) fn effective(self, alpha: FractionalOrder) -> WeightScheme {
        if alpha.is_one() {
            WeightScheme::StandardDFF
        } else {
            self
        }
    }
}

/// Prefactors (predictor, corrector) multiplying the weight sums.
pub fn step_prefactors(scheme: WeightScheme, alpha: FractionalOrder, h: f64) -> (f64, f64) {
    let a = alpha.value();
    let ha = h.powf(a);
    match scheme.effective(alpha) {
        WeightScheme::PaperPrinted => (ha * rgamma(1.0 + a), ha * rgamma(1.0 + a)),
        WeightScheme::StandardDFF => (ha * rgamma(1.0 + a), ha * rgamma(2.0 + a)),
    }
}

/// (m+1)^p − m^p.
pub(crate) fn first_difference(p: f64, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mf = m as f64;
    mf.powf(p) * (p * (1.0 / mf).ln_1p()).exp_m1()
}

/// (m+1)^p − 2m^p + (m−1)^p for m ≥ 1.
pub(crate) fn second_difference(p: f64, m: usize) -> f64 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 2f64.powf(p) - 2.0;
    }
    let x = 1.0 / m as f64;
    let x2 = x * x;
    // 2 Σ_{k≥1} C(p, 2k) x^{2k}
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let j = 2 * k;
        coeff *= (p - (j - 2) as f64) / (j - 1) as f64;
        coeff *= (p - (j - 1) as f64) / j as f64;
        power *= x2;
        let term = coeff * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    2.0 * (m as f64).powf(p) * sum
}

/// Trapezoid weight of the initial node when stepping to t_{n+1}:
/// n^{α+1} − (n−α)(n+1)^α.
pub(crate) fn trapezoid_start_weight(a: f64, n: usize) -> f64 {
    let nf = n as f64;
    if n < 4 {
        return nf.powf(a + 1.0) - (nf - a) * (nf + 1.0).powf(a);
    }
    // −n^{α+1} Σ_{k≥2} [C(α,k) − α C(α,k−1)] n^{−k}
    let x = 1.0 / nf;
    let mut prev = a; // C(α,1)
    let mut power = x;
    let mut sum = 0.0;
    for k in 2..400 {
        let cur = prev * (a - (k - 1) as f64) / k as f64;
        power *= x;
        let term = (cur - a * prev) * power;
        sum += term;
        prev = cur;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    -nf.powf(a + 1.0) * sum
}

/// Lag-indexed predictor weights b_0 … b_n.
pub fn predictor_weights(scheme: WeightScheme, alpha: FractionalOrder, n: usize) -> Vec<f64> {
    let a = alpha.value();
    let p = match scheme.effective(alpha) {
        WeightScheme::PaperPrinted => 1.0 - a,
        WeightScheme::StandardDFF => a,
    };
    (0..=n).map(|m| first_difference(p, m)).collect()
}

/// Weights multiplying 𝓛ρ_k, k = 0 … n+1, in the corrector producing
/// ρ_{n+1}. The last entry belongs to the new point (implicit scheme) or
/// to the predicted value (explicit scheme).
pub fn corrector_weights(scheme: WeightScheme, alpha: FractionalOrder, n: usize) -> Vec<f64> {
    let a = alpha.value();
    let mut w = vec![0.0; n + 2];
    match scheme.effective(alpha) {
        WeightScheme::StandardDFF => {
            w[0] = trapezoid_start_weight(a, n);
            for (k, wk) in w.iter_mut().enumerate().take(n + 1).skip(1) {
                *wk = second_difference(a + 1.0, n + 1 - k);
            }
            w[n + 1] = 1.0;
        }
        WeightScheme::PaperPrinted => {
            for (k, wk) in w.iter_mut().enumerate().take(n).skip(1) {
                *wk = second_difference(a, n - k);
            }
            w[0] = 1.0;
            w[n] = 1.0;
            w[n + 1] = 1.0;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fo(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn predictor_examples() {
        let w = predictor_weights(WeightScheme::PaperPrinted, fo(0.5), 1);
        assert_eq!(w[0], 1.0);
        assert!((w[1] - 0.41421356237309515).abs() < 1e-15);
        for s in [WeightScheme::StandardDFF, WeightScheme::PaperPrinted] {
            assert_eq!(predictor_weights(s, fo(1.0), 2), vec![1.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn corrector_examples() {
        let n = 5;
        let dff = corrector_weights(WeightScheme::StandardDFF, fo(0.5), n);
        assert!((dff[n] - (2f64.powf(1.5) - 2.0)).abs() < 1e-15);
        let printed = corrector_weights(WeightScheme::PaperPrinted, fo(0.5), n);
        assert!((printed[n - 1] - (2f64.sqrt() - 2.0)).abs() < 1e-15);
        assert_eq!(printed[n], 1.0);

        for s in [WeightScheme::StandardDFF, WeightScheme::PaperPrinted] {
            let w = corrector_weights(s, fo(1.0), 4);
            let expect = [1.0, 2.0, 2.0, 2.0, 2.0, 1.0];
            for (x, y) in w.iter().zip(expect) {
                assert!((x - y).abs() < 1e-14, "{w:?}");
            }
            let (_, c) = step_prefactors(s, fo(1.0), 0.1);
            assert!((c - 0.05).abs() < 1e-16);
        }
    }

    #[test]
    fn series_matches_direct_evaluation() {
        for p in [0.3, 0.5, 1.2, 1.5, 1.9] {
            for m in 2..40usize {
                let mf = m as f64;
                let direct = (mf + 1.0).powf(p) - 2.0 * mf.powf(p) + (mf - 1.0).powf(p);
                let s = second_difference(p, m);
                assert!((s - direct).abs() <= 1e-11 * direct.abs().max(1e-3), "p={p} m={m}");
            }
        }
        for a in [0.2, 0.5, 0.9] {
            for n in 0..40usize {
                let nf = n as f64;
                let direct = nf.powf(a + 1.0) - (nf - a) * (nf + 1.0).powf(a);
                let s = trapezoid_start_weight(a, n);
                assert!((s - direct).abs() <= 1e-11 * direct.abs(), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn trapezoid_weights_integrate_kernel_exactly() {
        // Σ_k w_k h^α/Γ(α+2) = t_{n+1}^α / Γ(α+1) for f ≡ 1.
        let a = 0.37;
        let n = 200;
        let w = corrector_weights(WeightScheme::StandardDFF, fo(a), n);
        let total: f64 = w.iter().sum::<f64>() * rgamma(a + 2.0);
        let exact = ((n + 1) as f64).powf(a) * rgamma(a + 1.0);
        assert!((total - exact).abs() < 1e-12 * exact);
    }
}
