use std::fmt;
use std::str::FromStr;

use crate::dynamics::IntegratorSettings;
use crate::ed::Boundary;
use crate::error::{Error, Result};
use crate::tim::{kz_cutoff, CriticalExponents, CutoffPolicy};

/// Working medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Transverse-field Ising chain, solved mode by mode.
    Tim,
    /// Ising chain with an extra longitudinal field, solved by dense diagonalization.
    Ltim(LtimParams),
}

/// Couplings of the non-integrable chain besides the ramped transverse field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtimParams {
    pub j: f64,
    pub bz: f64,
    pub boundary: Boundary,
    /// Filter the energizing stroke too, with cutoff `γΔ*`.
    pub both_strokes: bool,
}

impl Default for LtimParams {
    /// `J = 1` with `B_z = 1.12`, which puts the critical transverse field
    /// at `B_x ≈ 0.75`.
    fn default() -> Self {
        LtimParams {
            j: 1.0,
            bz: 1.12,
            boundary: Boundary::Open,
            both_strokes: false,
        }
    }
}

/// Counterdiabatic control used by the STA variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaMode {
    Exact,
    /// Keep `M` sine harmonics of the momentum profile.
    Truncated(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Bare,
    Adiabatic,
    Sta(StaMode),
    /// Spectral cutoffs on both bath strokes.
    Beqe,
    /// Spectral cutoff on the decaying stroke only.
    BeqeSingleStroke,
}

impl Variant {
    pub fn is_gated(&self) -> bool {
        matches!(self, Variant::Beqe | Variant::BeqeSingleStroke)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Bare => f.write_str("bare"),
            Variant::Adiabatic => f.write_str("adiabatic"),
            Variant::Sta(StaMode::Exact) => f.write_str("sta"),
            Variant::Sta(StaMode::Truncated(m)) => write!(f, "sta-{m}"),
            Variant::Beqe => f.write_str("beqe"),
            Variant::BeqeSingleStroke => f.write_str("beqe-single-stroke"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `bare`, `adiabatic`, `sta`, `sta-exact`, `sta-<M>`, `beqe`
    /// and `beqe-single-stroke`.
    fn from_str(s: &str) -> Result<Self> {
        let v = match s {
            "bare" => Variant::Bare,
            "adiabatic" => Variant::Adiabatic,
            "sta" | "sta-exact" => Variant::Sta(StaMode::Exact),
            "beqe" => Variant::Beqe,
            "beqe-single-stroke" => Variant::BeqeSingleStroke,
            other => match other.strip_prefix("sta-").map(str::parse::<usize>) {
                Some(Ok(m)) if m > 0 => Variant::Sta(StaMode::Truncated(m)),
                _ => return Err(Error::invalid("variants", format!("unknown variant `{other}`"))),
            },
        };
        Ok(v)
    }
}

/// How the two bath strokes are carried out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathMode {
    /// Each stroke reaches its steady state.
    Instantaneous,
    /// Lindblad evolution for `tau_hot` / `tau_cold` with spectral amplitude `g0`.
    Timed { g0: f64 },
}

/// Every parameter of one engine run.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleConfig {
    pub model: Model,
    pub sites: usize,
    pub h1: f64,
    pub h2: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau_hot: f64,
    pub tau_cold: f64,
    pub variant: Variant,
    pub cutoff: Option<CutoffPolicy>,
    pub exponents: CriticalExponents,
    pub bath: BathMode,
    pub integrator: IntegratorSettings,
    /// Fixed step count for the unitary strokes instead of the adaptive rule.
    pub steps: Option<usize>,
    /// Passes of the stroke map; results describe the last one.
    pub cycles: usize,
}

impl CycleConfig {
    /// Transverse-Ising engine with instantaneous baths and `τ1 = τ2 = τ`.
    pub fn tim(sites: usize, h1: f64, h2: f64, t_hot: f64, t_cold: f64, tau: f64, variant: Variant) -> Self {
        CycleConfig {
            model: Model::Tim,
            sites,
            h1,
            h2,
            t_hot,
            t_cold,
            tau1: tau,
            tau2: tau,
            tau_hot: 0.0,
            tau_cold: 0.0,
            variant,
            cutoff: None,
            exponents: CriticalExponents::TIM,
            bath: BathMode::Instantaneous,
            integrator: IntegratorSettings::default(),
            steps: None,
            cycles: 1,
        }
    }

    pub fn with_cutoff(mut self, cutoff: CutoffPolicy) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau1 = tau;
        self.tau2 = tau;
        self
    }

    /// Checks parameter ranges. Degenerate cycles (`h1 = h2`, equal
    /// temperatures) are accepted and simply produce no work.
    pub fn validate(&self) -> Result<()> {
        let paired = matches!(self.model, Model::Tim);
        if self.sites < 2 || (paired && !self.sites.is_multiple_of(2)) {
            let need = if paired { "even and at least 2" } else { "at least 2" };
            return Err(Error::invalid("L", format!("must be {need}, got {}", self.sites)));
        }
        for (name, v) in [("h1", self.h1), ("h2", self.h2)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [("T_hot", self.t_hot), ("T_cold", self.t_cold)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.variant != Variant::Adiabatic {
            for (name, v) in [("tau1", self.tau1), ("tau2", self.tau2)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(name, format!("must be positive, got {v}")));
                }
            }
        }
        for (name, v) in [("tau_hot", self.tau_hot), ("tau_cold", self.tau_cold)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if self.cycles == 0 {
            return Err(Error::invalid("cycles", "must be at least 1"));
        }
        if let BathMode::Timed { g0 } = self.bath {
            if !(g0 > 0.0 && g0.is_finite()) {
                return Err(Error::invalid("bath.G0", format!("must be positive, got {g0}")));
            }
        }
        if let Some(n) = self.steps {
            if n == 0 {
                return Err(Error::invalid("integrator.steps", "must be at least 1"));
            }
        }
        self.exponents.validate()?;
        self.integrator.validate()?;
        match (&self.cutoff, self.variant.is_gated()) {
            (Some(c), _) => c.validate()?,
            (None, true) => {
                return Err(Error::invalid(
                    "cutoff.kind",
                    format!("required by variant {}", self.variant),
                ))
            }
            (None, false) => {}
        }
        match self.model {
            Model::Tim => {
                if let Variant::Sta(StaMode::Truncated(m)) = self.variant {
                    if m > self.sites / 2 {
                        return Err(Error::invalid(
                            "sta.truncation",
                            format!("must lie in 1..={}, got {m}", self.sites / 2),
                        ));
                    }
                }
            }
            Model::Ltim(p) => {
                if self.sites > crate::ed::MAX_SITES {
                    return Err(Error::invalid(
                        "L",
                        format!(
                            "dense model supports at most {} sites, got {}",
                            crate::ed::MAX_SITES,
                            self.sites
                        ),
                    ));
                }
                if !(p.j.is_finite() && p.bz.is_finite()) {
                    return Err(Error::invalid("ltim.J", "couplings must be finite"));
                }
                if matches!(self.variant, Variant::Sta(_)) {
                    return Err(Error::invalid(
                        "variants",
                        "the dense model has no counterdiabatic variant",
                    ));
                }
            }
        }
        Ok(())
    }

    /// `(Δ*, hot-side cutoff)` seen by the two bath strokes of this variant.
    pub fn stroke_cutoffs(&self) -> Result<(f64, f64)> {
        let Some(policy) = self.cutoff.as_ref().filter(|_| self.variant.is_gated()) else {
            return Ok((0.0, 0.0));
        };
        let cold = kz_cutoff(policy, self.h1, self.h2, self.tau1, self.exponents)?;
        let hot_gated = match (self.variant, self.model) {
            (Variant::Beqe, Model::Tim) => true,
            (Variant::Beqe, Model::Ltim(p)) => p.both_strokes,
            _ => false,
        };
        let hot = if hot_gated {
            policy.gamma * kz_cutoff(policy, self.h1, self.h2, self.tau2, self.exponents)?
        } else {
            0.0
        };
        Ok((cold, hot))
    }

    /// `τ1 + τ2 + τ_hot + τ_cold`.
    pub fn total_time(&self) -> f64 {
        self.tau1 + self.tau2 + self.tau_hot + self.tau_cold
    }
}
