//! Momentum-mode structure of the transverse-field Ising chain and the
//! Kibble–Zurek freeze-out scales used to place bath cutoffs.
//!
//! After Jordan–Wigner fermionization each momentum pair `(k, -k)` spans a
//! four-dimensional space, ordered here as `|0⟩, |k⟩, |−k⟩, |k,−k⟩`. Only the
//! `{|0⟩, |k,−k⟩}` block carries dynamics; `|±k⟩` sit at zero energy.
//! Units: `J = 1`, so the critical field is `h = 1`.

use std::f64::consts::PI;

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::numeric::{C64, ZERO};

/// Critical transverse field of the chain with `J = 1`.
pub const CRITICAL_FIELD: f64 = 1.0;

/// Correlation-length exponent `nu` and dynamical exponent `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponents {
    pub nu: f64,
    pub z: f64,
}

impl CriticalExponents {
    /// Ising universality class.
    pub const TIM: CriticalExponents = CriticalExponents { nu: 1.0, z: 1.0 };

    pub fn new(nu: f64, z: f64) -> Result<Self> {
        let exps = CriticalExponents { nu, z };
        exps.validate()?;
        Ok(exps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid("nu", format!("must be positive, got {}", self.nu)));
        }
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(Error::invalid("z", format!("must be positive, got {}", self.z)));
        }
        Ok(())
    }

    #[inline]
    pub fn nu_z(&self) -> f64 {
        self.nu * self.z
    }
}

impl Default for CriticalExponents {
    fn default() -> Self {
        Self::TIM
    }
}

/// Momenta of the even-parity (antiperiodic) sector of an `L`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    sites: usize,
    momenta: Vec<f64>,
}

impl ModeGrid {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `k_n = (2n − 1)π/L` for `n = 1..=L/2`, ascending.
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

pub fn mode_grid(sites: usize) -> Result<ModeGrid> {
    if sites < 2 || !sites.is_multiple_of(2) {
        return Err(Error::invalid(
            "L",
            format!("chain length must be even and at least 2, got {sites}"),
        ));
    }
    let momenta = (1..=sites / 2)
        .map(|n| (2 * n - 1) as f64 * PI / sites as f64)
        .collect();
    Ok(ModeGrid { sites, momenta })
}

/// Single-mode Hamiltonian in the ordered basis `|0⟩, |k⟩, |−k⟩, |k,−k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeHamiltonian {
    pub k: f64,
    pub h: f64,
    pub matrix: Matrix4<C64>,
}

pub fn mode_hamiltonian(k: f64, h: f64) -> ModeHamiltonian {
    let (z, x) = block_coefficients(k, h);
    let mut matrix = Matrix4::from_element(ZERO);
    matrix[(0, 0)] = C64::new(z, 0.0);
    matrix[(3, 3)] = C64::new(-z, 0.0);
    matrix[(0, 3)] = C64::new(x, 0.0);
    matrix[(3, 0)] = C64::new(x, 0.0);
    ModeHamiltonian { k, h, matrix }
}

/// `(σ^z, σ^x)` coefficients of the `{|0⟩, |k,−k⟩}` block:
/// `−2(h − cos k)` and `2 sin k`.
#[inline]
pub(crate) fn block_coefficients(k: f64, h: f64) -> (f64, f64) {
    (-2.0 * (h - k.cos()), 2.0 * k.sin())
}

/// Gap between adjacent non-degenerate levels, `ε_k = 2√((h − cos k)² + sin²k)`.
#[inline]
pub fn mode_gap(k: f64, h: f64) -> f64 {
    2.0 * (h - k.cos()).hypot(k.sin())
}

/// Bogoliubov angle `θ_k` with `tan θ_k = sin k / (h − cos k)`, in `(0, π)`
/// for `k ∈ (0, π)`.
#[inline]
pub fn mixing_angle(k: f64, h: f64) -> f64 {
    k.sin().atan2(h - k.cos())
}

/// Time, measured from the start of a ramp `h2 → h1` of duration `tau`,
/// at which the critical mode stops following adiabatically.
pub fn kz_freezeout_time(h1: f64, h2: f64, tau: f64, exps: CriticalExponents) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", format!("must be positive, got {tau}")));
    }
    if h1 == h2 {
        return Err(Error::invalid("h1", "ramp endpoints must differ"));
    }
    exps.validate()?;
    let span = h1 - h2;
    let nu_z = exps.nu_z();
    let t_c = tau * (CRITICAL_FIELD - h2) / span;
    Ok(t_c + (tau / span) * (nu_z * span / tau).powf(1.0 / (1.0 + nu_z)))
}

/// How the lower spectral cutoff `Δ*` of the decaying bath is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffRule {
    /// `Δ* = C1 (νz (h1 − h2)/τ)^{νz/(1+νz)}`, for `h2` at the critical point.
    KzCritical { c1: f64 },
    /// `Δ* = C2 |h2 − h_c|^{νz} + C3`, τ-independent, for `h2` away from it.
    NonCritical { c2: f64, c3: f64 },
    /// Fixed `Δ*`.
    Constant { value: f64 },
}

/// Cutoff rule plus the factor `γ` that scales `Δ*` for the energizing bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    pub rule: CutoffRule,
    pub gamma: f64,
}

impl CutoffPolicy {
    pub fn kz_critical(c1: f64, gamma: f64) -> Self {
        CutoffPolicy {
            rule: CutoffRule::KzCritical { c1 },
            gamma,
        }
    }

    pub fn non_critical(c2: f64, c3: f64, gamma: f64) -> Self {
        CutoffPolicy {
            rule: CutoffRule::NonCritical { c2, c3 },
            gamma,
        }
    }

    pub fn constant(value: f64, gamma: f64) -> Self {
        CutoffPolicy {
            rule: CutoffRule::Constant { value },
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        match self.rule {
            CutoffRule::KzCritical { c1 } if !(c1 > 0.0 && c1.is_finite()) => {
                Err(Error::invalid("cutoff.C1", format!("must be positive, got {c1}")))
            }
            CutoffRule::NonCritical { c2, c3 } if !(c2 > 0.0 && c2.is_finite() && c3.is_finite()) => {
                Err(Error::invalid("cutoff.C2", format!("must be positive, got {c2}")))
            }
            CutoffRule::Constant { value } if !(value >= 0.0 && value.is_finite()) => Err(Error::invalid(
                "cutoff.value",
                format!("must be non-negative, got {value}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Lower cutoff `Δ*` of the decaying bath. The energizing bath uses `γΔ*`.
pub fn kz_cutoff(policy: &CutoffPolicy, h1: f64, h2: f64, tau: f64, exps: CriticalExponents) -> Result<f64> {
    policy.validate()?;
    exps.validate()?;
    let nu_z = exps.nu_z();
    match policy.rule {
        CutoffRule::KzCritical { c1 } => {
            if !(tau > 0.0) {
                return Err(Error::invalid("tau", format!("must be positive, got {tau}")));
            }
            let rate = nu_z * (h1 - h2).abs() / tau;
            let exponent = nu_z / (1.0 + nu_z);
            // Keep the Ising case bit-exact with a plain square root.
            let scale = if exponent == 0.5 {
                rate.sqrt()
            } else {
                rate.powf(exponent)
            };
            Ok(c1 * scale)
        }
        CutoffRule::NonCritical { c2, c3 } => {
            let distance = (h2 - CRITICAL_FIELD).abs();
            if distance == 0.0 && c3 == 0.0 {
                return Err(Error::DegenerateCutoff(
                    "non-critical rule with h2 at the critical point and C3 = 0 gives Δ* = 0".into(),
                ));
            }
            let gap_scale = if nu_z == 1.0 { distance } else { distance.powf(nu_z) };
            Ok(c2 * gap_scale + c3)
        }
        CutoffRule::Constant { value } => Ok(value),
    }
}
