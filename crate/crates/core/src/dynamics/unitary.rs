//! Unitary ramps of a single mode.
//!
//! Only the `{|0⟩, |k,−k⟩}` block evolves, so a ramp is an SU(2) propagator
//! on that block. It is built from fourth-order Magnus steps sampled at the
//! two Gauss points. Each step is an exact SU(2) exponential, so the
//! propagator is unitary to rounding for any step size.
//! Accuracy is certified by comparing `N` and `N/2` steps.

use nalgebra::{Matrix2, Matrix4};

use crate::dynamics::state::{mode_eigenbasis, ModeState};
use crate::error::{Error, Result};
use crate::numeric::{C64, ONE, ZERO};
use crate::tim::{block_coefficients, mode_gap};

/// Linear field ramp `h(t) = h_start + (h_end − h_start) t/τ` on `[0, τ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampProtocol {
    pub h_start: f64,
    pub h_end: f64,
    pub tau: f64,
    /// Fixed initial substep count; the step rule is used when absent.
    pub steps: Option<usize>,
}

impl RampProtocol {
    pub fn new(h_start: f64, h_end: f64, tau: f64) -> Result<Self> {
        let ramp = RampProtocol {
            h_start,
            h_end,
            tau,
            steps: None,
        };
        ramp.validate()?;
        Ok(ramp)
    }

    pub fn with_steps(mut self, steps: usize) -> Result<Self> {
        self.steps = Some(steps);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_start.is_finite() && self.h_end.is_finite()) {
            return Err(Error::invalid("h", "ramp endpoints must be finite"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau", format!("must be positive, got {}", self.tau)));
        }
        if self.steps == Some(0) {
            return Err(Error::invalid("integrator.steps", "must be at least 1"));
        }
        Ok(())
    }

    #[inline]
    pub fn rate(&self) -> f64 {
        (self.h_end - self.h_start) / self.tau
    }

    #[inline]
    pub fn field_at(&self, t: f64) -> f64 {
        self.h_start + (self.h_end - self.h_start) * (t / self.tau)
    }
}

/// Step control shared by the time integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Largest phase `‖H‖·dt` accumulated in one step.
    pub phase_step: f64,
    /// Lower bound on the number of steps per stroke.
    pub min_steps: usize,
    /// Largest accepted discrepancy between the `N`- and `N/2`-step results.
    pub tolerance: f64,
    /// Number of step doublings attempted before giving up.
    pub max_refinements: u32,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            phase_step: 0.5,
            min_steps: 200,
            tolerance: 1e-7,
            max_refinements: 4,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.phase_step > 0.0 && self.phase_step.is_finite()) {
            return Err(Error::invalid("integrator.phase_step", "must be positive"));
        }
        if self.min_steps < 2 {
            return Err(Error::invalid("integrator.min_steps", "must be at least 2"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("integrator.tolerance", "must be positive"));
        }
        Ok(())
    }

    /// Initial even step count for a stroke of length `duration` whose
    /// generator norm never exceeds `norm`.
    pub(crate) fn initial_steps(&self, duration: f64, norm: f64, fixed: Option<usize>) -> usize {
        let n = match fixed {
            Some(n) => n,
            None => {
                let by_phase = (duration * norm / self.phase_step).ceil();
                (by_phase.min(1e12) as usize).max(self.min_steps)
            }
        };
        (n.max(2) + 1) & !1
    }
}

/// Field vector `(x, y, z)` of the block Hamiltonian `f·σ` at time `t`.
pub(crate) trait BlockDrive {
    fn field(&self, t: f64) -> [f64; 3];
    /// Upper bound on `|f(t)|` over the ramp.
    fn max_norm(&self) -> f64;
}

pub(crate) struct BareDrive {
    k: f64,
    ramp: RampProtocol,
}

impl BareDrive {
    pub(crate) fn new(k: f64, ramp: RampProtocol) -> Self {
        BareDrive { k, ramp }
    }
}

impl BlockDrive for BareDrive {
    #[inline]
    fn field(&self, t: f64) -> [f64; 3] {
        let (z, x) = block_coefficients(self.k, self.ramp.field_at(t));
        [x, 0.0, z]
    }

    fn max_norm(&self) -> f64 {
        // ε_k(h) is convex in h, so the maximum sits at an endpoint.
        mode_gap(self.k, self.ramp.h_start).max(mode_gap(self.k, self.ramp.h_end))
    }
}

/// SU(2) propagator of the `{|0⟩, |k,−k⟩}` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPropagator {
    pub matrix: Matrix2<C64>,
    /// Number of Magnus steps behind `matrix`.
    pub steps: usize,
}

impl BlockPropagator {
    pub fn identity() -> Self {
        BlockPropagator {
            matrix: Matrix2::identity(),
            steps: 0,
        }
    }

    /// Full 4×4 propagator, identity on `|k⟩` and `|−k⟩`.
    pub fn embed(&self) -> Matrix4<C64> {
        let u = &self.matrix;
        let mut m = Matrix4::from_element(ZERO);
        m[(0, 0)] = u[(0, 0)];
        m[(0, 3)] = u[(0, 1)];
        m[(3, 0)] = u[(1, 0)];
        m[(3, 3)] = u[(1, 1)];
        m[(1, 1)] = ONE;
        m[(2, 2)] = ONE;
        m
    }

    /// `U ρ U†`.
    pub fn apply(&self, state: &ModeState) -> ModeState {
        let u = self.embed();
        let rho = u * state.rho() * u.adjoint();
        ModeState::from_matrix_unchecked(hermitize(rho))
    }
}

pub(crate) fn hermitize(rho: Matrix4<C64>) -> Matrix4<C64> {
    (rho + rho.adjoint()).scale(0.5)
}

/// `exp(−i θ n̂·σ)` for `w = |w| n̂` and `θ = |w| dt`.
#[inline]
fn su2_exp(w: [f64; 3], dt: f64) -> Matrix2<C64> {
    let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let (s, c) = (norm * dt).sin_cos();
    let f = if norm > 0.0 { s / norm } else { dt };
    let (x, y, z) = (w[0] * f, w[1] * f, w[2] * f);
    Matrix2::new(C64::new(c, -z), C64::new(-y, -x), C64::new(y, -x), C64::new(c, z))
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

fn magnus_propagate<D: BlockDrive>(drive: &D, tau: f64, steps: usize) -> Matrix2<C64> {
    let dt = tau / steps as f64;
    let (c1, c2) = (0.5 - GAUSS_OFFSET, 0.5 + GAUSS_OFFSET);
    let skew = 3f64.sqrt() * dt / 6.0;
    let mut u = Matrix2::<C64>::identity();
    for j in 0..steps {
        let t = j as f64 * dt;
        let a = drive.field(t + c1 * dt);
        let b = drive.field(t + c2 * dt);
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let w = [
            0.5 * (a[0] + b[0]) - skew * cross[0],
            0.5 * (a[1] + b[1]) - skew * cross[1],
            0.5 * (a[2] + b[2]) - skew * cross[2],
        ];
        u = su2_exp(w, dt) * u;
    }
    u
}

fn max_abs_diff(a: &Matrix2<C64>, b: &Matrix2<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn block_propagator<D: BlockDrive>(
    drive: &D,
    ramp: &RampProtocol,
    settings: &IntegratorSettings,
    stage: &'static str,
) -> Result<BlockPropagator> {
    ramp.validate()?;
    settings.validate()?;
    let mut steps = settings.initial_steps(ramp.tau, drive.max_norm(), ramp.steps);
    let mut coarse = magnus_propagate(drive, ramp.tau, steps / 2);
    let mut refinements = 0;
    loop {
        let fine = magnus_propagate(drive, ramp.tau, steps);
        let discrepancy = max_abs_diff(&fine, &coarse);
        if discrepancy <= settings.tolerance {
            return Ok(BlockPropagator { matrix: fine, steps });
        }
        if refinements >= settings.max_refinements {
            return Err(Error::StepSize {
                stage,
                steps,
                discrepancy,
                tolerance: settings.tolerance,
            });
        }
        refinements += 1;
        coarse = fine;
        steps *= 2;
    }
}

/// Propagator of the uncontrolled ramp for mode `k`.
pub fn ramp_propagator(k: f64, ramp: &RampProtocol, settings: &IntegratorSettings) -> Result<BlockPropagator> {
    block_propagator(&BareDrive::new(k, *ramp), ramp, settings, "unitary ramp")
}

/// Von Neumann evolution of one mode under the linear ramp.
pub fn evolve_unitary(
    state: &ModeState,
    k: f64,
    ramp: &RampProtocol,
    settings: &IntegratorSettings,
) -> Result<ModeState> {
    Ok(ramp_propagator(k, ramp, settings)?.apply(state))
}

/// Ideal adiabatic transport from the eigenbasis of `H_k(h_from)` to that of
/// `H_k(h_to)`. Coherences between non-degenerate levels are dropped; the
/// degenerate `{|k⟩, |−k⟩}` block is kept as is.
pub fn adiabatic_map(state: &ModeState, k: f64, h_from: f64, h_to: f64) -> ModeState {
    let mut r = state.in_eigenbasis(k, h_from);
    for i in 0..4 {
        for j in 0..4 {
            let degenerate = i == j || (i == 1 && j == 2) || (i == 2 && j == 1);
            if !degenerate {
                r[(i, j)] = ZERO;
            }
        }
    }
    let v = mode_eigenbasis(k, h_to);
    ModeState::from_matrix_unchecked(hermitize(v * r * v.transpose()))
}
