//! Four-stroke Otto cycle: thermalize at `h1`, ramp to `h2`, cool, ramp back
//! and reheat, with optional spectral cutoffs on the bath strokes.

pub mod closed_form;
pub mod config;
pub mod run;
pub mod sweep;

pub use closed_form::{
    adiabatic_closed_form, adiabatic_mode_heats, efficiency, is_engine_mode, power, AdiabaticTotals,
};
pub use config::{BathMode, CycleConfig, LtimParams, Model, StaMode, Variant};
pub use run::{run_cycle, run_variants, CycleResult, ModeRecord};
pub use sweep::{sweep_tau, SweepRow};
