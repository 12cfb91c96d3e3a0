use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Tolerance on `Σ p = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Occupations of the eigenlevels of a dense Hamiltonian, ascending in energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPopulations {
    energies: Vec<f64>,
    populations: Vec<f64>,
}

impl LevelPopulations {
    pub fn new(energies: Vec<f64>, populations: Vec<f64>) -> Result<Self> {
        if energies.len() != populations.len() || energies.is_empty() {
            return Err(Error::invalid(
                "populations",
                format!(
                    "expected one population per level, got {} for {}",
                    populations.len(),
                    energies.len()
                ),
            ));
        }
        if energies.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::invalid("energies", "must be finite and ascending"));
        }
        if let Some(p) = populations.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::invalid("populations", format!("must be non-negative, got {p}")));
        }
        let total = compensated_sum(populations.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid("populations", format!("must sum to 1, got {total}")));
        }
        Ok(LevelPopulations { energies, populations })
    }

    pub(crate) fn from_parts_unchecked(energies: Vec<f64>, populations: Vec<f64>) -> Self {
        LevelPopulations { energies, populations }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `Σ_i E_i p_i`.
    pub fn mean_energy(&self) -> f64 {
        compensated_sum(self.energies.iter().zip(&self.populations).map(|(e, p)| e * p))
    }
}

/// Boltzmann weights over a run of ascending energies, normalized to `mass`.
fn boltzmann(energies: &[f64], temperature: f64, mass: f64) -> Vec<f64> {
    let base = energies[0];
    let w: Vec<f64> = energies.iter().map(|e| (-(e - base) / temperature).exp()).collect();
    let z = compensated_sum(w.iter().copied());
    w.into_iter().map(|x| mass * x / z).collect()
}

/// Gibbs distribution over ascending `energies`. Degenerate levels share weight equally.
pub fn gibbs(energies: &[f64], temperature: f64) -> Result<LevelPopulations> {
    if !(temperature > 0.0) {
        return Err(Error::invalid("T", format!("must be positive, got {temperature}")));
    }
    if energies.is_empty() || energies.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("energies", "must be non-empty, finite and ascending"));
    }
    Ok(LevelPopulations::from_parts_unchecked(
        energies.to_vec(),
        boltzmann(energies, temperature, 1.0),
    ))
}

/// Thermalization restricted to level gaps of at least `delta_star`.
///
/// Consecutive levels linked by such gaps form blocks. Each block of two or
/// more levels relaxes to Boltzmann ratios while keeping its total
/// population; a level with no qualifying gap on either side keeps its
/// population. A gap exactly equal to `delta_star` counts as coupled.
pub fn gap_filtered_thermalize(pops: &LevelPopulations, temperature: f64, delta_star: f64) -> Result<LevelPopulations> {
    if !(temperature > 0.0) {
        return Err(Error::invalid("T", format!("must be positive, got {temperature}")));
    }
    if delta_star == 0.0 {
        return Err(Error::DegenerateCutoff(
            "Δ* = 0 leaves every level coupled; use full thermalization instead".into(),
        ));
    }
    if !(delta_star > 0.0) {
        return Err(Error::invalid(
            "delta_star",
            format!("must be positive, got {delta_star}"),
        ));
    }
    let e = &pops.energies;
    let mut out = pops.populations.clone();
    let mut start = 0;
    while start < e.len() {
        let mut end = start + 1;
        while end < e.len() && !(e[end] - e[end - 1] < delta_star) {
            end += 1;
        }
        if end - start > 1 {
            let mass = compensated_sum(pops.populations[start..end].iter().copied());
            out[start..end].copy_from_slice(&boltzmann(&e[start..end], temperature, mass));
        }
        start = end;
    }
    Ok(LevelPopulations::from_parts_unchecked(e.clone(), out))
}
