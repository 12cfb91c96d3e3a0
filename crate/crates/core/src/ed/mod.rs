//! Dense treatment of the Ising chain with transverse and longitudinal
//! fields, which has no free-fermion solution.

pub mod cycle;
pub mod hamiltonian;
pub mod levels;
pub mod propagate;

pub use cycle::run_ltim_cycle;
pub(crate) use cycle::{run_ltim_variants, sweep_ltim};
pub use hamiltonian::{ltim_hamiltonian, sorted_eigen, Boundary, DenseModel, DenseParts, MAX_SITES};
pub use levels::{gap_filtered_thermalize, gibbs, LevelPopulations};
pub use propagate::{check_density, converged_propagators, evolve_dense, propagate_fixed, DenseUnitary};
