//! Counterdiabatic (shortcut-to-adiabaticity) ramps.
//!
//! For the block `H = z σ^z + x σ^x` with mixing angle `θ_k`, the term
//! `H_CD = −(θ̇_k/2) σ^y` cancels every non-adiabatic transition. The
//! truncated variant keeps only the first `M` harmonics `sin(mk)` of the
//! momentum profile of `θ̇_k/2`, the free-fermion image of an `M`-range
//! spin interaction.

use crate::dynamics::state::ModeState;
use crate::dynamics::unitary::{
    block_propagator, BareDrive, BlockDrive, BlockPropagator, IntegratorSettings, RampProtocol,
};
use crate::error::{Error, Result};
use crate::tim::{block_coefficients, ModeGrid};

/// Exact counterdiabatic coefficient `θ̇_k/2 = (ḣ/2)(−sin k)/((h − cos k)² + sin²k)`.
#[inline]
pub fn cd_field(k: f64, h: f64, hdot: f64) -> f64 {
    let (s, c) = k.sin_cos();
    let d = (h - c) * (h - c) + s * s;
    0.5 * hdot * (-s) / d
}

/// Profile `−sin k/((h − cos k)² + sin²k)`, i.e. `cd_field` per unit `ḣ/2`.
#[inline]
fn cd_profile(k: f64, h: f64) -> f64 {
    let (s, c) = k.sin_cos();
    -s / ((h - c) * (h - c) + s * s)
}

/// Least-squares projection onto `{sin(mk)}`, `m = 1..=M`, over a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SineProjection {
    momenta: Vec<f64>,
    harmonics: usize,
}

impl SineProjection {
    pub fn new(grid: &ModeGrid, harmonics: usize) -> Result<Self> {
        if harmonics == 0 || harmonics > grid.len() {
            return Err(Error::invalid(
                "sta.truncation",
                format!("must lie in 1..={}, got {harmonics}", grid.len()),
            ));
        }
        Ok(SineProjection {
            momenta: grid.momenta().to_vec(),
            harmonics,
        })
    }

    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    /// Weights `w_j` with `P[f](k) = Σ_j w_j f(k_j)`.
    ///
    /// The sines are mutually orthogonal on the grid, so each coefficient is
    /// an independent ratio of grid sums.
    pub fn weights(&self, k: f64) -> Vec<f64> {
        let mut w = vec![0.0; self.momenta.len()];
        for m in 1..=self.harmonics {
            let mf = m as f64;
            let norm: f64 = self.momenta.iter().map(|&kj| (mf * kj).sin().powi(2)).sum();
            let scale = (mf * k).sin() / norm;
            for (wj, &kj) in w.iter_mut().zip(&self.momenta) {
                *wj += scale * (mf * kj).sin();
            }
        }
        w
    }

    /// Projection of `f` sampled on the grid, evaluated at `k`.
    pub fn project(&self, k: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.weights(k)
            .iter()
            .zip(&self.momenta)
            .map(|(w, &kj)| w * f(kj))
            .sum()
    }
}

/// Counterdiabatic control applied during a ramp.
#[derive(Debug, Clone, PartialEq)]
pub enum CounterdiabaticDrive {
    Exact,
    Truncated(SineProjection),
}

enum Profile {
    Exact,
    Truncated { weights: Vec<f64>, momenta: Vec<f64> },
}

struct StaDrive {
    bare: BareDrive,
    k: f64,
    ramp: RampProtocol,
    profile: Profile,
}

impl StaDrive {
    fn new(k: f64, ramp: RampProtocol, drive: &CounterdiabaticDrive) -> Self {
        let profile = match drive {
            CounterdiabaticDrive::Exact => Profile::Exact,
            CounterdiabaticDrive::Truncated(p) => Profile::Truncated {
                weights: p.weights(k),
                momenta: p.momenta.clone(),
            },
        };
        StaDrive {
            bare: BareDrive::new(k, ramp),
            k,
            ramp,
            profile,
        }
    }

    fn control(&self, h: f64) -> f64 {
        let half_rate = 0.5 * self.ramp.rate();
        match &self.profile {
            Profile::Exact => cd_field(self.k, h, self.ramp.rate()),
            Profile::Truncated { weights, momenta } => {
                half_rate
                    * weights
                        .iter()
                        .zip(momenta)
                        .map(|(w, &kj)| w * cd_profile(kj, h))
                        .sum::<f64>()
            }
        }
    }
}

impl BlockDrive for StaDrive {
    #[inline]
    fn field(&self, t: f64) -> [f64; 3] {
        let h = self.ramp.field_at(t);
        let (z, x) = block_coefficients(self.k, h);
        [x, -self.control(h), z]
    }

    fn max_norm(&self) -> f64 {
        let (lo, hi) = if self.ramp.h_start <= self.ramp.h_end {
            (self.ramp.h_start, self.ramp.h_end)
        } else {
            (self.ramp.h_end, self.ramp.h_start)
        };
        // |profile(k, h)| ≤ sin k / (sin²k + dist(cos k, [lo, hi])²)
        let bound = |kj: f64| {
            let (s, c) = kj.sin_cos();
            let dist = if c < lo {
                lo - c
            } else if c > hi {
                c - hi
            } else {
                0.0
            };
            s / (s * s + dist * dist)
        };
        let half_rate = 0.5 * self.ramp.rate().abs();
        let control = match &self.profile {
            Profile::Exact => half_rate * bound(self.k),
            Profile::Truncated { weights, momenta } => {
                half_rate
                    * weights
                        .iter()
                        .zip(momenta)
                        .map(|(w, &kj)| w.abs() * bound(kj))
                        .sum::<f64>()
            }
        };
        self.bare.max_norm().hypot(control)
    }
}

/// Propagator of the counterdiabatically assisted ramp for mode `k`.
pub fn sta_propagator(
    k: f64,
    ramp: &RampProtocol,
    drive: &CounterdiabaticDrive,
    settings: &IntegratorSettings,
) -> Result<BlockPropagator> {
    block_propagator(&StaDrive::new(k, *ramp, drive), ramp, settings, "counterdiabatic ramp")
}

/// Von Neumann evolution under `H_k(h(t)) + H_CD(t)`.
pub fn evolve_sta(
    state: &ModeState,
    k: f64,
    ramp: &RampProtocol,
    drive: &CounterdiabaticDrive,
    settings: &IntegratorSettings,
) -> Result<ModeState> {
    Ok(sta_propagator(k, ramp, drive, settings)?.apply(state))
}
