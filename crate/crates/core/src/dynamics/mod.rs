//! Single-mode dynamics: unitary ramps with and without counterdiabatic
//! control, the ideal adiabatic map, and bath strokes with spectral cutoffs.

pub mod bath;
pub mod sta;
pub mod state;
pub mod unitary;

pub use bath::{dissipative_stroke, thermal_populations, thermal_state, BathSpec, DissipationMode};
pub use sta::{cd_field, evolve_sta, sta_propagator, CounterdiabaticDrive, SineProjection};
pub use state::{mode_eigenbasis, mode_energies, ModeState, VALIDITY_TOL};
pub use unitary::{adiabatic_map, evolve_unitary, ramp_propagator, BlockPropagator, IntegratorSettings, RampProtocol};
