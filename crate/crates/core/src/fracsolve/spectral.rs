//! Spectral evaluation of E_α(t^α 𝓛) for diagonalisable generators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::{unvectorize, CMatrix, CVector, DensityMatrix, GkslGenerator, StateDeviation};
use crate::specfun::{mittag_leffler, mittag_leffler_complex, FractionalOrder};

pub const MAX_EIGENBASIS_CONDITION: f64 = 1e8;

/// Eigenvectors of an upper-triangular matrix by back substitution.
/// Near-equal diagonal entries get a floored denominator, so a defective
/// block shows up as a blown-up column rather than a division by zero.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let floor = scale * f64::EPSILON;
    let mut v = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        v[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::default();
            for i in (j + 1)..=k {
                s += t[(j, i)] * v[(i, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < floor {
                denom = Complex64::new(floor, 0.0);
            }
            v[(j, k)] = -s / denom;
        }
        let norm = v.column(k).norm();
        v.column_mut(k).unscale_mut(norm);
    }
    v
}

/// Eigendecomposition of a superoperator, reusable across times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    alpha: FractionalOrder,
    dim: usize,
    eigenvalues: Vec<Complex64>,
    vectors: CMatrix,
    condition: f64,
}

impl SpectralPropagator {
    pub fn new(gen: &GkslGenerator, alpha: FractionalOrder) -> Result<Self> {
        let s = gen.superoperator().matrix().clone();
        let (q, t) = s.schur().unpack();
        let eigenvalues: Vec<Complex64> = t.diagonal().iter().copied().collect();
        let vectors = q * triangular_eigenvectors(&t);
        let sv = vectors.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition < MAX_EIGENBASIS_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        Ok(SpectralPropagator { alpha, dim: gen.dim(), eigenvalues, vectors, condition })
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    fn ml(&self, z: Complex64) -> Result<Complex64> {
        if z.im.abs() <= 1e-13 * z.norm().max(1.0) {
            Ok(Complex64::new(mittag_leffler(self.alpha, z.re)?, 0.0))
        } else {
            mittag_leffler_complex(self.alpha, z)
        }
    }

    /// Σ_j E_α(λ_j t^α) Π_j ρ(0).
    pub fn apply(&self, t: f64, init: &DensityMatrix) -> Result<DensityMatrix> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
        }
        if init.dim() != self.dim {
            return Err(Error::validation(format!(
                "state dimension {} does not match generator dimension {}",
                init.dim(),
                self.dim
            )));
        }
        if t == 0.0 {
            return Ok(init.clone());
        }
        let ta = t.powf(self.alpha.value());
        let coeffs = self
            .vectors
            .clone()
            .lu()
            .solve(&init.to_vec())
            .ok_or_else(|| Error::Internal("eigenbasis solve failed".into()))?;
        let mut scaled = CVector::zeros(coeffs.len());
        for (j, (&c, &lambda)) in coeffs.iter().zip(&self.eigenvalues).enumerate() {
            scaled[j] = c * self.ml(lambda * ta)?;
        }
        let m = unvectorize(&(&self.vectors * scaled), self.dim);
        let dev = StateDeviation::of(&m);
        if !(dev.worst() <= 1e-7) {
            return Err(Error::Accuracy {
                what: format!("spectral propagation at t = {t}"),
                achieved: dev.worst(),
                required: 1e-7,
            });
        }
        Ok(DensityMatrix::from_unchecked(m))
    }
}

/// ρ(t) = E_α(t^α 𝓛) ρ(0) through the eigendecomposition of 𝓛.
pub fn ml_propagate(
    gen: &GkslGenerator,
    alpha: FractionalOrder,
    t: f64,
    init: &DensityMatrix,
) -> Result<DensityMatrix> {
    SpectralPropagator::new(gen, alpha)?.apply(t, init)
}
