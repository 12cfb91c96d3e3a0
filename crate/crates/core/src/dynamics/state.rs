use nalgebra::{Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numeric::{C64, ZERO};
use crate::tim::{block_coefficients, mixing_angle, mode_gap};

/// Tolerance used for the trace, Hermiticity and positivity checks.
pub const VALIDITY_TOL: f64 = 1e-10;

/// Density matrix of one momentum mode in the basis `|0⟩, |k⟩, |−k⟩, |k,−k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    rho: Matrix4<C64>,
}

impl ModeState {
    /// Wraps `rho` after checking it is a valid density matrix.
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        let state = ModeState { rho };
        state.check(VALIDITY_TOL)?;
        Ok(state)
    }

    pub(crate) fn from_matrix_unchecked(rho: Matrix4<C64>) -> Self {
        ModeState { rho }
    }

    /// Diagonal state with eigen-populations `pops` (ground, `|k⟩`, `|−k⟩`, top)
    /// of `H_k(h)`.
    pub fn from_eigen_populations(k: f64, h: f64, pops: [f64; 4]) -> Result<Self> {
        let diag = Matrix4::from_diagonal(&pops.into()).map(|p: f64| C64::new(p, 0.0));
        let v = mode_eigenbasis(k, h);
        Self::new(v * diag * v.transpose())
    }

    pub fn rho(&self) -> &Matrix4<C64> {
        &self.rho
    }

    pub fn into_inner(self) -> Matrix4<C64> {
        self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// `max |ρ − ρ†|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part of `ρ`.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.rho + self.rho.adjoint()).scale(0.5);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks trace, Hermiticity and positivity against `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if !((tr.re - 1.0).abs() <= tol && tr.im.abs() <= tol) {
            return Err(Error::invalid("rho", format!("trace is {tr}, expected 1")));
        }
        let herm = self.hermiticity_error();
        if !(herm <= tol) {
            return Err(Error::invalid("rho", format!("not Hermitian (deviation {herm:.3e})")));
        }
        let min = self.min_eigenvalue();
        if !(min >= -tol) {
            return Err(Error::invalid("rho", format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `Tr(H_k(h) ρ)`.
    pub fn energy(&self, k: f64, h: f64) -> f64 {
        let (z, x) = block_coefficients(k, h);
        z * (self.rho[(0, 0)].re - self.rho[(3, 3)].re) + 2.0 * x * self.rho[(0, 3)].re
    }

    /// State expressed in the eigenbasis of `H_k(h)`.
    pub fn in_eigenbasis(&self, k: f64, h: f64) -> Matrix4<C64> {
        let v = mode_eigenbasis(k, h);
        v.transpose() * self.rho * v
    }

    /// Populations of the eigenstates of `H_k(h)`, ordered ground, `|k⟩`, `|−k⟩`, top.
    pub fn eigen_populations(&self, k: f64, h: f64) -> [f64; 4] {
        let r = self.in_eigenbasis(k, h);
        [r[(0, 0)].re, r[(1, 1)].re, r[(2, 2)].re, r[(3, 3)].re]
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &ModeState) -> f64 {
        let diff = self.rho - other.rho;
        let herm = (diff + diff.adjoint()).scale(0.5);
        0.5 * SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .sum::<f64>()
    }
}

/// Real orthogonal matrix whose columns are the eigenvectors of `H_k(h)`
/// with energies `−ε_k, 0, 0, ε_k`.
pub fn mode_eigenbasis(k: f64, h: f64) -> Matrix4<C64> {
    let half = 0.5 * mixing_angle(k, h);
    let (s, c) = half.sin_cos();
    let mut v = Matrix4::from_element(ZERO);
    v[(0, 0)] = C64::new(c, 0.0);
    v[(3, 0)] = C64::new(-s, 0.0);
    v[(1, 1)] = C64::new(1.0, 0.0);
    v[(2, 2)] = C64::new(1.0, 0.0);
    v[(0, 3)] = C64::new(s, 0.0);
    v[(3, 3)] = C64::new(c, 0.0);
    v
}

/// Eigenvalues of `H_k(h)` in the order used by [`mode_eigenbasis`].
pub fn mode_energies(k: f64, h: f64) -> [f64; 4] {
    let e = mode_gap(k, h);
    [-e, 0.0, 0.0, e]
}
