//! Time stepping on the vectorised linear problem y' ^α = A y.

use num_complex::Complex64;

use super::weights::{first_difference, second_difference, step_prefactors, trapezoid_start_weight, WeightScheme};
use crate::error::{Error, Result};
use crate::kernels::SoeKernel;
use crate::lindblad::{CMatrix, CVector};
use crate::specfun::FractionalOrder;

/// Called after each accepted step with (index, state); an error aborts.
pub(crate) type StepCheck<'a> = dyn FnMut(usize, &CVector) -> Result<()> + 'a;

/// Row-major history of 𝓛ρ_k.
struct History {
    dim: usize,
    data: Vec<Complex64>,
}

impl History {
    fn with_capacity(dim: usize, rows: usize) -> Self {
        History { dim, data: Vec::with_capacity(dim * rows) }
    }

    fn push(&mut self, v: &CVector) {
        self.data.extend(v.iter());
    }

    fn row(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }
}

fn axpy(acc: &mut [Complex64], w: f64, x: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b * w;
    }
}

/// I − c·A, decomposed once for the run.
struct ImplicitFactor {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl ImplicitFactor {
    fn new(op: &CMatrix, c: f64) -> Result<Self> {
        let d = op.nrows();
        let m = CMatrix::identity(d, d) - op * Complex64::from(c);
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Internal("implicit step matrix is singular".into()));
        }
        Ok(ImplicitFactor { lu })
    }

    fn solve(&self, rhs: &CVector) -> Result<CVector> {
        self.lu.solve(rhs).ok_or_else(|| Error::Internal("implicit step solve failed".into()))
    }
}

fn to_vector(v: &[Complex64]) -> CVector {
    CVector::from_column_slice(v)
}

pub(crate) fn dense(
    op: &CMatrix,
    y0: &CVector,
    alpha: FractionalOrder,
    h: f64,
    steps: usize,
    scheme: WeightScheme,
    check: &mut StepCheck<'_>,
) -> Result<Vec<CVector>> {
    match scheme.effective(alpha) {
        WeightScheme::StandardDFF => dense_implicit(op, y0, alpha, h, steps, check),
        WeightScheme::PaperPrinted => dense_printed(op, y0, alpha, h, steps, check),
    }
}

fn dense_implicit(
    op: &CMatrix,
    y0: &CVector,
    alpha: FractionalOrder,
    h: f64,
    steps: usize,
    check: &mut StepCheck<'_>,
) -> Result<Vec<CVector>> {
    let a = alpha.value();
    let d = y0.len();
    let (_, c) = step_prefactors(WeightScheme::StandardDFF, alpha, h);
    let factor = ImplicitFactor::new(op, c)?;
    let lag: Vec<f64> = (0..=steps).map(|m| if m == 0 { 1.0 } else { second_difference(a + 1.0, m) }).collect();

    let mut hist = History::with_capacity(d, steps + 1);
    hist.push(&(op * y0));
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.clone());
    let mut acc = vec![Complex64::default(); d];
    for n in 0..steps {
        acc.iter_mut().for_each(|z| *z = Complex64::default());
        axpy(&mut acc, trapezoid_start_weight(a, n), hist.row(0));
        for k in 1..=n {
            axpy(&mut acc, lag[n + 1 - k], hist.row(k));
        }
        let rhs = y0 + to_vector(&acc) * Complex64::from(c);
        let y = factor.solve(&rhs)?;
        check(n + 1, &y)?;
        hist.push(&(op * &y));
        out.push(y);
    }
    Ok(out)
}

fn dense_printed(
    op: &CMatrix,
    y0: &CVector,
    alpha: FractionalOrder,
    h: f64,
    steps: usize,
    check: &mut StepCheck<'_>,
) -> Result<Vec<CVector>> {
    let a = alpha.value();
    let d = y0.len();
    let (cp, cc) = step_prefactors(WeightScheme::PaperPrinted, alpha, h);
    let b: Vec<f64> = (0..=steps).map(|m| first_difference(1.0 - a, m)).collect();
    let lag: Vec<f64> = (0..=steps).map(|m| if m == 0 { 1.0 } else { second_difference(a, m) }).collect();

    let mut hist = History::with_capacity(d, steps + 1);
    hist.push(&(op * y0));
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.clone());
    let mut pred = vec![Complex64::default(); d];
    let mut corr = vec![Complex64::default(); d];
    for n in 0..steps {
        pred.iter_mut().for_each(|z| *z = Complex64::default());
        corr.iter_mut().for_each(|z| *z = Complex64::default());
        for k in 0..=n {
            let row = hist.row(k);
            axpy(&mut pred, b[n - k], row);
            // end weights are one, interior ones are the second differences
            let w = if k == 0 || k == n { 1.0 } else { lag[n - k] };
            axpy(&mut corr, w, row);
        }
        let y_pred = y0 + to_vector(&pred) * Complex64::from(cp);
        let coupled = op * &y_pred;
        let y = y0 + (to_vector(&corr) + coupled) * Complex64::from(cc);
        check(n + 1, &y)?;
        hist.push(&(op * &y));
        out.push(y);
    }
    Ok(out)
}

/// ∫₀¹ e^{−zu} du and ∫₀¹ e^{−zu} u du.
fn exp_moments(z: f64) -> (f64, f64) {
    if z < 0.5 {
        let mut term = 1.0; // (−z)^k / k!
        let (mut m0, mut m1) = (0.0, 0.0);
        for k in 0..30 {
            m0 += term / (k + 1) as f64;
            m1 += term / (k + 2) as f64;
            term *= -z / (k + 1) as f64;
        }
        (m0, m1)
    } else {
        let e = (-z).exp();
        let m0 = -(-z).exp_m1() / z;
        let m1 = (1.0 - (1.0 + z) * e) / (z * z);
        (m0, m1)
    }
}

/// Implicit trapezoid step with the history beyond the last interval
/// carried by one exponentially decaying accumulator per SOE term.
pub(crate) fn soe_implicit(
    op: &CMatrix,
    y0: &CVector,
    alpha: FractionalOrder,
    h: f64,
    steps: usize,
    soe: &SoeKernel,
    check: &mut StepCheck<'_>,
) -> Result<Vec<CVector>> {
    let a = alpha.value();
    let d = y0.len();
    let (_, c) = step_prefactors(WeightScheme::StandardDFF, alpha, h);
    let factor = ImplicitFactor::new(op, c)?;

    struct Mode {
        decay: f64,
        readout: f64,
        left: f64,
        right: f64,
    }
    let modes: Vec<Mode> = soe
        .terms()
        .iter()
        .map(|&(w, xi)| {
            let z = xi * h;
            let (m0, m1) = exp_moments(z);
            let decay = (-z).exp();
            Mode { decay, readout: w * decay, left: h * m1, right: h * (m0 - m1) }
        })
        .collect();
    let q = modes.len();
    let mut acc = vec![Complex64::default(); q * d];

    let mut f_prev: CVector = op * y0;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.clone());
    let mut far = vec![Complex64::default(); d];
    for n in 0..steps {
        far.iter_mut().for_each(|z| *z = Complex64::default());
        for (mode, hq) in modes.iter().zip(acc.chunks(d)) {
            axpy(&mut far, mode.readout, hq);
        }
        // last interval: left node weight α, new point weight one
        let mut rhs = y0 + to_vector(&far);
        rhs += &f_prev * Complex64::from(c * a);
        let y = factor.solve(&rhs)?;
        check(n + 1, &y)?;
        let f_new: CVector = op * &y;
        for (mode, hq) in modes.iter().zip(acc.chunks_mut(d)) {
            for ((hv, fl), fr) in hq.iter_mut().zip(f_prev.iter()).zip(f_new.iter()) {
                *hv = *hv * mode.decay + fl * mode.left + fr * mode.right;
            }
        }
        f_prev = f_new;
        out.push(y);
    }
    Ok(out)
}
