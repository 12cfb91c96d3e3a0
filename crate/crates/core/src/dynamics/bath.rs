//! Bath-coupled strokes of a single mode.
//!
//! Jumps connect each adjacent pair of non-degenerate eigenlevels
//! (`E₀↔E₁`, `E₀↔E₂`, `E₁↔E₃`, `E₂↔E₃`), all at the gap `ε_k`. The
//! spectral function is flat, `G(ε) = G0` above the cutoff and zero below,
//! with the upward rate fixed by `G(−ε) = e^{−ε/T} G(ε)`.

use nalgebra::Matrix4;

use crate::dynamics::state::{mode_eigenbasis, mode_energies, ModeState};
use crate::dynamics::unitary::{hermitize, IntegratorSettings};
use crate::error::{Error, Result};
use crate::numeric::{C64, ZERO};
use crate::tim::mode_gap;

/// Temperature plus spectral function with a hard lower cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub temperature: f64,
    pub g0: f64,
    pub delta_cut: f64,
}

impl BathSpec {
    pub fn new(temperature: f64, g0: f64, delta_cut: f64) -> Result<Self> {
        let bath = BathSpec {
            temperature,
            g0,
            delta_cut,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::invalid(
                "T",
                format!("must be positive, got {}", self.temperature),
            ));
        }
        if !(self.g0 > 0.0 && self.g0.is_finite()) {
            return Err(Error::invalid("bath.G0", format!("must be positive, got {}", self.g0)));
        }
        if !(self.delta_cut >= 0.0) {
            return Err(Error::invalid(
                "cutoff",
                format!("must be non-negative, got {}", self.delta_cut),
            ));
        }
        Ok(())
    }

    /// `G(Δ)` for a transition of energy `Δ` (negative for absorption from the bath).
    pub fn spectral(&self, delta: f64) -> f64 {
        let gap = delta.abs();
        if gap < self.delta_cut {
            return 0.0;
        }
        if delta >= 0.0 {
            self.g0
        } else {
            self.g0 * (-gap / self.temperature).exp()
        }
    }

    /// Whether a mode with level spacing `gap` exchanges energy with the bath.
    #[inline]
    pub fn couples(&self, gap: f64) -> bool {
        !(gap < self.delta_cut)
    }
}

/// How a bath stroke is carried out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DissipationMode {
    /// The stroke runs to its steady state.
    Instantaneous,
    /// Lindblad evolution for the given duration.
    Timed(f64),
}

/// Eigen-populations `(e^{βε}, 1, 1, e^{−βε})/Z`, evaluated without overflow.
pub fn thermal_populations(gap: f64, temperature: f64) -> [f64; 4] {
    let x = (-gap / temperature).exp();
    let z = 1.0 + 2.0 * x + x * x;
    [1.0 / z, x / z, x / z, x * x / z]
}

/// Gibbs state of mode `k` at field `h` and temperature `T`.
pub fn thermal_state(k: f64, h: f64, temperature: f64) -> Result<ModeState> {
    if !(temperature > 0.0) {
        return Err(Error::invalid("T", format!("must be positive, got {temperature}")));
    }
    let pops = thermal_populations(mode_gap(k, h), temperature);
    let v = mode_eigenbasis(k, h);
    let d = Matrix4::from_diagonal(&pops.into()).map(|p: f64| C64::new(p, 0.0));
    Ok(ModeState::from_matrix_unchecked(hermitize(v * d * v.transpose())))
}

const PAIRS: [(usize, usize); 4] = [(0, 1), (0, 2), (1, 3), (2, 3)];

/// Per-step phase for the explicit Runge–Kutta integrator.
const RK4_PHASE_STEP: f64 = 0.1;

/// Right-hand side of the master equation in the eigenbasis.
struct Lindbladian {
    energies: [f64; 4],
    /// Total outflow rate of each level.
    loss: [f64; 4],
    down: f64,
    up: f64,
}

impl Lindbladian {
    fn new(gap: f64, bath: &BathSpec, energies: [f64; 4]) -> Self {
        let down = bath.spectral(gap);
        let up = bath.spectral(-gap);
        let mut loss = [0.0; 4];
        for &(lo, hi) in &PAIRS {
            loss[hi] += down;
            loss[lo] += up;
        }
        Lindbladian {
            energies,
            loss,
            down,
            up,
        }
    }

    fn rate_scale(&self) -> f64 {
        let spread = self.energies[3] - self.energies[0];
        spread + self.loss.iter().copied().fold(0.0, f64::max)
    }

    fn apply(&self, rho: &Matrix4<C64>) -> Matrix4<C64> {
        let mut out = Matrix4::from_element(ZERO);
        for i in 0..4 {
            for j in 0..4 {
                let omega = self.energies[i] - self.energies[j];
                let damp = 0.5 * (self.loss[i] + self.loss[j]);
                out[(i, j)] = rho[(i, j)] * C64::new(-damp, -omega);
            }
        }
        for &(lo, hi) in &PAIRS {
            out[(lo, lo)] += rho[(hi, hi)] * self.down;
            out[(hi, hi)] += rho[(lo, lo)] * self.up;
        }
        out
    }

    fn rk4(&self, rho: &Matrix4<C64>, duration: f64, steps: usize) -> Matrix4<C64> {
        let dt = duration / steps as f64;
        let mut r = *rho;
        for _ in 0..steps {
            let k1 = self.apply(&r);
            let k2 = self.apply(&(r + k1.scale(0.5 * dt)));
            let k3 = self.apply(&(r + k2.scale(0.5 * dt)));
            let k4 = self.apply(&(r + k3.scale(dt)));
            r += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
        }
        r
    }
}

/// One bath stroke at fixed field `h`.
///
/// A mode whose gap lies below `bath.delta_cut` is returned unchanged.
pub fn dissipative_stroke(
    state: &ModeState,
    k: f64,
    h: f64,
    bath: &BathSpec,
    mode: DissipationMode,
    settings: &IntegratorSettings,
) -> Result<ModeState> {
    bath.validate()?;
    let gap = mode_gap(k, h);
    if !bath.couples(gap) {
        return Ok(state.clone());
    }
    match mode {
        DissipationMode::Instantaneous => thermal_state(k, h, bath.temperature),
        DissipationMode::Timed(duration) => {
            if !(duration >= 0.0 && duration.is_finite()) {
                return Err(Error::invalid(
                    "tau_bath",
                    format!("must be non-negative, got {duration}"),
                ));
            }
            if duration == 0.0 {
                return Ok(state.clone());
            }
            settings.validate()?;
            let generator = Lindbladian::new(gap, bath, mode_energies(k, h));
            let v = mode_eigenbasis(k, h);
            let start = v.transpose() * state.rho() * v;
            let rk4_settings = IntegratorSettings {
                phase_step: RK4_PHASE_STEP,
                ..*settings
            };
            let mut steps = rk4_settings.initial_steps(duration, generator.rate_scale(), None);
            let mut coarse = generator.rk4(&start, duration, steps / 2);
            let mut refinements = 0;
            loop {
                let fine = generator.rk4(&start, duration, steps);
                let discrepancy = fine
                    .iter()
                    .zip(coarse.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                if discrepancy <= settings.tolerance {
                    let rho = hermitize(v * fine * v.transpose());
                    return Ok(ModeState::from_matrix_unchecked(rho));
                }
                if refinements >= settings.max_refinements {
                    return Err(Error::StepSize {
                        stage: "bath stroke",
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
    }
}
