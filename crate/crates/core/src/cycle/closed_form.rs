//! Infinitely slow ramps with fully thermalizing baths, evaluated without
//! time evolution.

use crate::cycle::config::CycleConfig;
use crate::error::Result;
use crate::numeric::compensated_sum;
use crate::tim::{mode_gap, mode_grid};

/// Totals of the ideal adiabatic engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticTotals {
    pub w: f64,
    pub eta: f64,
    pub q_in: f64,
    pub q_out: f64,
}

/// `Tr(H ρ_th)/ε = (e^{−βε} − e^{βε})/Z = −tanh(βε/2)`.
#[inline]
pub(crate) fn thermal_energy_per_gap(gap: f64, temperature: f64) -> f64 {
    -(0.5 * gap / temperature).tanh()
}

/// `(Q_in^k, Q_out^k)` of the adiabatic engine for mode `k`.
pub fn adiabatic_mode_heats(k: f64, config: &CycleConfig) -> (f64, f64) {
    let (e1, e2) = (mode_gap(k, config.h1), mode_gap(k, config.h2));
    let hot = thermal_energy_per_gap(e1, config.t_hot);
    let cold = thermal_energy_per_gap(e2, config.t_cold);
    (e1 * (hot - cold), e2 * (cold - hot))
}

/// Work, efficiency and heats of the adiabatic engine summed over the mode grid.
pub fn adiabatic_closed_form(config: &CycleConfig) -> Result<AdiabaticTotals> {
    let grid = mode_grid(config.sites)?;
    let heats: Vec<(f64, f64)> = grid
        .momenta()
        .iter()
        .map(|&k| adiabatic_mode_heats(k, config))
        .collect();
    let q_in = compensated_sum(heats.iter().map(|h| h.0));
    let q_out = compensated_sum(heats.iter().map(|h| h.1));
    let w = -(q_in + q_out);
    Ok(AdiabaticTotals {
        w,
        eta: efficiency(w, q_in),
        q_in,
        q_out,
    })
}

/// `sinh x/(2 + cosh x)` for `x ≥ 0`, written to stay finite for large `x`.
fn engine_ratio(x: f64) -> f64 {
    let e1 = (-x).exp();
    let e2 = e1 * e1;
    (1.0 - e2) / (1.0 + 4.0 * e1 + e2)
}

/// Whether mode `k` absorbs heat from the hot bath in the adiabatic engine.
pub fn is_engine_mode(k: f64, config: &CycleConfig) -> bool {
    let hot = 0.5 * mode_gap(k, config.h1) / config.t_hot;
    let cold = 0.5 * mode_gap(k, config.h2) / config.t_cold;
    engine_ratio(hot) < engine_ratio(cold)
}

/// `P = −W/τ_total`.
pub fn power(w: f64, config: &CycleConfig) -> f64 {
    let total = config.total_time();
    if w == 0.0 {
        0.0
    } else {
        -w / total
    }
}

/// `η = −W/Q_in`, or NaN when no heat enters.
pub fn efficiency(w: f64, q_in: f64) -> f64 {
    if q_in > 0.0 {
        -w / q_in
    } else {
        f64::NAN
    }
}
