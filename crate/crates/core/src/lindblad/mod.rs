//! Density matrices, GKSL generators and their superoperators.
//!
//! States are vectorized by stacking columns: `vec(ρ)[i + d·j] = ρ[(i, j)]`,
//! so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

mod io;
mod superop;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use io::{GeneratorFile, StateFile};
pub use superop::{build_superoperator, cptp_diagnostics, map_diagnostics, CptpReport, Superoperator};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const C1: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub const STATE_TOL_HERMITIAN: f64 = 1e-12;
pub const STATE_TOL_TRACE: f64 = 1e-12;
pub const STATE_TOL_EIGEN: f64 = 1e-10;

/// How far a matrix is from being a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDeviation {
    /// max |ρ_ij − conj(ρ_ji)|
    pub hermiticity: f64,
    /// |tr ρ − 1|
    pub trace: f64,
    /// smallest eigenvalue of the Hermitian part
    pub min_eigenvalue: f64,
}

impl StateDeviation {
    pub fn of(m: &CMatrix) -> Self {
        let herm = hermiticity_defect(m);
        let trace = (m.trace() - C1).norm();
        let min_eigenvalue = min_hermitian_eigenvalue(m);
        StateDeviation { hermiticity: herm, trace, min_eigenvalue }
    }

    /// Largest violation, comparable against a single tolerance.
    pub fn worst(&self) -> f64 {
        self.hermiticity.max(self.trace).max(-self.min_eigenvalue)
    }

    pub fn within(&self, herm: f64, trace: f64, eig: f64) -> bool {
        self.hermiticity <= herm && self.trace <= trace && self.min_eigenvalue >= -eig
    }
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part (m + m†)/2, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a general complex matrix, read off its Schur form.
pub fn general_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

pub(crate) fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// A d×d Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates at the default tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, STATE_TOL_HERMITIAN, STATE_TOL_TRACE, STATE_TOL_EIGEN)
    }

    pub fn with_tolerance(m: CMatrix, herm: f64, trace: f64, eig: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::validation(format!(
                "density matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.is_finite()) {
            return Err(Error::validation("density matrix has non-finite entries"));
        }
        let dev = StateDeviation::of(&m);
        if !dev.within(herm, trace, eig) {
            return Err(Error::validation(format!(
                "not a density matrix: hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
                dev.hermiticity, dev.trace, dev.min_eigenvalue
            )));
        }
        Ok(DensityMatrix { m })
    }

    /// Row-major entries.
    pub fn from_entries(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::validation(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = CVector::from_column_slice(psi);
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::validation("zero state vector"));
        }
        let v = v / Complex64::new(n, 0.0);
        Self::new(&v * v.adjoint())
    }

    /// The |+⟩⟨+| qubit state.
    pub fn plus() -> Self {
        let h = Complex64::new(0.5, 0.0);
        DensityMatrix { m: CMatrix::from_element(2, 2, h) }
    }

    pub(crate) fn from_unchecked(m: CMatrix) -> Self {
        DensityMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// tr(O ρ).
    pub fn expectation(&self, observable: &CMatrix) -> Complex64 {
        (observable * &self.m).trace()
    }

    /// Column-stacked vector.
    pub fn to_vec(&self) -> CVector {
        vectorize(&self.m)
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<Complex64> {
        self.m.transpose().iter().copied().collect()
    }
}

/// Column-stacking vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// One dissipative channel γ·(L ρ L† − ½{L†L, ρ}).
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub jump: CMatrix,
    pub rate: f64,
}

/// Hamiltonian plus dissipative channels of a Markovian master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslGenerator {
    hamiltonian: CMatrix,
    channels: Vec<Channel>,
}

impl GkslGenerator {
    pub fn new(hamiltonian: CMatrix, channels: Vec<Channel>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if d == 0 || hamiltonian.ncols() != d {
            return Err(Error::validation("Hamiltonian must be square and non-empty"));
        }
        let herm = hermiticity_defect(&hamiltonian);
        if herm > 1e-12 {
            return Err(Error::validation(format!("Hamiltonian is not Hermitian (defect {herm:.3e})")));
        }
        for (k, ch) in channels.iter().enumerate() {
            if ch.jump.nrows() != d || ch.jump.ncols() != d {
                return Err(Error::validation(format!(
                    "jump operator {k} has shape {}x{}, expected {d}x{d}",
                    ch.jump.nrows(),
                    ch.jump.ncols()
                )));
            }
            if !(ch.rate >= 0.0) || !ch.rate.is_finite() {
                return Err(Error::validation(format!("channel {k} has invalid rate {}", ch.rate)));
            }
        }
        Ok(GkslGenerator { hamiltonian, channels })
    }

    /// Skips rate validation, for building non-physical maps in tests.
    #[cfg(test)]
    pub(crate) fn new_unchecked(hamiltonian: CMatrix, channels: Vec<Channel>) -> Self {
        GkslGenerator { hamiltonian, channels }
    }

    /// H = (ε/2)σ_z with a single σ_z channel at rate γ. The coherence
    /// u = ρ₁₀ then obeys u̇ = (iε − 2γ)u.
    pub fn dephasing_qubit(epsilon: f64, gamma: f64) -> Result<Self> {
        let channels = if gamma > 0.0 {
            vec![Channel { jump: pauli_z(), rate: gamma }]
        } else if gamma == 0.0 {
            Vec::new()
        } else {
            return Err(Error::validation(format!("dephasing rate must be >= 0, got {gamma}")));
        };
        Self::new(pauli_z() * Complex64::new(0.5 * epsilon, 0.0), channels)
    }

    /// H = (ε/2)σ_z with no dissipation.
    pub fn liouville_qubit(epsilon: f64) -> Result<Self> {
        Self::dephasing_qubit(epsilon, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn superoperator(&self) -> Superoperator {
        build_superoperator(self)
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C0, C1, C1, C0])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[C0, -i, i, C0])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C1, C0, C0, -C1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation_rejects_bad_states() {
        assert!(DensityMatrix::from_entries(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).is_err());
        assert!(DensityMatrix::from_entries(2, &[c(0.5, 0.0), c(0.2, 0.1), c(0.2, 0.1), c(0.5, 0.0)]).is_err());
        // trace one but an eigenvalue of -0.5
        assert!(DensityMatrix::from_entries(2, &[c(0.5, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]).is_err());
        assert!(DensityMatrix::from_entries(2, &[c(1.0, 0.0)]).is_err());
        let ok = DensityMatrix::from_entries(2, &[c(0.5, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.5, 0.0)]).unwrap();
        assert_eq!(ok.dim(), 2);
    }

    #[test]
    fn vectorization_round_trip_and_convention() {
        let m = CMatrix::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        let v = vectorize(&m);
        assert_eq!(v[1 + 3 * 2], m[(1, 2)]);
        assert_eq!(unvectorize(&v, 3), m);
        let a = CMatrix::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0 - i as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| c(j as f64 - 0.5, (i + j) as f64));
        let lhs = vectorize(&(&a * &m * &b));
        let rhs = b.transpose().kronecker(&a) * vectorize(&m);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn generator_validation() {
        let nonherm = CMatrix::from_row_slice(2, 2, &[C0, C1, C0, C0]);
        assert!(GkslGenerator::new(nonherm, vec![]).is_err());
        let bad_rate = Channel { jump: pauli_z(), rate: -0.1 };
        assert!(GkslGenerator::new(pauli_z(), vec![bad_rate]).is_err());
        let wrong_shape = Channel { jump: CMatrix::identity(3, 3), rate: 1.0 };
        assert!(GkslGenerator::new(pauli_z(), vec![wrong_shape]).is_err());
        assert!(GkslGenerator::dephasing_qubit(1.0, -1.0).is_err());
    }

    #[test]
    fn pure_states() {
        let psi = [c(1.0, 0.0), c(0.0, 1.0)];
        let rho = DensityMatrix::pure(&psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((rho.entry(1, 0) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((rho.expectation(&pauli_y()).re - 1.0).abs() < 1e-15);
    }
}
