use num_complex::Complex64;

use super::{hermitian_eigenvalues, unvectorize, CMatrix, DensityMatrix, GkslGenerator, StateDeviation, C0, C1};
use crate::error::{Error, Result};

/// Matrix of a linear map on d×d matrices, acting on column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

/// −i(I⊗H − Hᵀ⊗I) + Σ γ [conj(L)⊗L − ½(I⊗L†L + (L†L)ᵀ⊗I)]
pub fn build_superoperator(gen: &GkslGenerator) -> Superoperator {
    let d = gen.dim();
    let id = CMatrix::identity(d, d);
    let h = gen.hamiltonian();
    let mi = Complex64::new(0.0, -1.0);
    let mut m = (id.kronecker(h) - h.transpose().kronecker(&id)) * mi;
    for ch in gen.channels() {
        let l = &ch.jump;
        let ldl = l.adjoint() * l;
        let g = Complex64::new(ch.rate, 0.0);
        let half = Complex64::new(0.5 * ch.rate, 0.0);
        m += l.conjugate().kronecker(l) * g;
        m -= (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * half;
    }
    Superoperator { dim: d, matrix: m }
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::validation(format!("superoperator for dimension {dim} must be {0}x{0}", dim * dim)));
        }
        Ok(Superoperator { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// exp(u M) by scaling and squaring with a Padé core.
    pub fn propagator(&self, u: f64) -> CMatrix {
        if u == 0.0 {
            return CMatrix::identity(self.dim * self.dim, self.dim * self.dim);
        }
        (&self.matrix * Complex64::new(u, 0.0)).exp()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * super::vectorize(rho)), self.dim)
    }

    /// e^{uM} ρ, re-validated as a density matrix.
    pub fn semigroup_apply(&self, u: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if !(u >= 0.0) {
            return Err(Error::domain(format!("semigroup parameter must be >= 0, got {u}")));
        }
        if rho.dim() != self.dim {
            return Err(Error::validation(format!(
                "state dimension {} does not match generator dimension {}",
                rho.dim(),
                self.dim
            )));
        }
        if u == 0.0 {
            return Ok(rho.clone());
        }
        let out = unvectorize(&(self.propagator(u) * rho.to_vec()), self.dim);
        let dev = StateDeviation::of(&out);
        if dev.worst() > 1e-7 {
            return Err(Error::Instability {
                step: 0,
                detail: format!("semigroup output left the state space by {:.3e}", dev.worst()),
            });
        }
        Ok(DensityMatrix::from_unchecked(out))
    }
}

/// Trace-preservation defect and smallest Choi eigenvalue of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub trace_defect: f64,
    pub min_choi_eigenvalue: f64,
}

impl CptpReport {
    pub fn is_cptp(&self, tol: f64) -> bool {
        self.trace_defect <= tol && self.min_choi_eigenvalue >= -tol
    }
}

/// Diagnostics of Φ = exp(uM).
pub fn cptp_diagnostics(superop: &Superoperator, u: f64) -> Result<CptpReport> {
    if !(u >= 0.0) {
        return Err(Error::domain(format!("map parameter must be >= 0, got {u}")));
    }
    map_diagnostics(&superop.propagator(u), superop.dim())
}

/// Choi matrix Σ E_ij ⊗ Φ(E_ij) of a column-stacked map and its diagnostics.
pub fn map_diagnostics(map: &CMatrix, dim: usize) -> Result<CptpReport> {
    if dim > 8 {
        return Err(Error::domain(format!("Choi diagnostics are limited to d <= 8, got {dim}")));
    }
    let d2 = dim * dim;
    if map.nrows() != d2 || map.ncols() != d2 {
        return Err(Error::validation("map shape does not match dimension"));
    }
    let mut choi = CMatrix::zeros(d2, d2);
    let mut trace_defect = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            // Φ(E_ij) is column i + d·j of the map
            let col = map.column(i + dim * j);
            let mut tr = C0;
            for a in 0..dim {
                for b in 0..dim {
                    choi[(i * dim + a, j * dim + b)] = col[a + dim * b];
                }
                tr += col[a + dim * a];
            }
            let want = if i == j { C1 } else { C0 };
            trace_defect = trace_defect.max((tr - want).norm());
        }
    }
    let min = hermitian_eigenvalues(&choi).first().copied().unwrap_or(0.0);
    Ok(CptpReport { trace_defect, min_choi_eigenvalue: min })
}
