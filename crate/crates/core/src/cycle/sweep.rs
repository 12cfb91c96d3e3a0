use rayon::prelude::*;

use crate::cycle::config::{CycleConfig, Model, Variant};
use crate::cycle::run::{run_variants, CycleResult};
use crate::error::{Error, Result};

/// One `(variant, τ)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub variant: Variant,
    pub tau: f64,
    pub outcome: Result<CycleResult>,
}

pub(crate) fn validate_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::invalid("tau_grid", "must not be empty"));
    }
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::invalid(
            "tau_grid",
            format!("durations must be positive, got {t}"),
        ));
    }
    Ok(())
}

/// Runs every variant at every `τ1 = τ2 = τ`. Rows are grouped by variant
/// in the order given and ascend in `τ` within each group. A failing point
/// is recorded in its row and the sweep continues.
pub fn sweep_tau(config: &CycleConfig, taus: &[f64], variants: &[Variant]) -> Result<Vec<SweepRow>> {
    validate_taus(taus)?;
    if variants.is_empty() {
        return Err(Error::invalid("variants", "must not be empty"));
    }
    // by_tau[τ][variant]
    let by_tau: Vec<Vec<Result<CycleResult>>> = match config.model {
        Model::Tim => taus
            .par_iter()
            .map(|&tau| run_variants(&config.clone().with_tau(tau), variants))
            .collect(),
        Model::Ltim(_) => crate::ed::sweep_ltim(config, taus, variants),
    };
    let mut columns: Vec<Vec<Result<CycleResult>>> = variants.iter().map(|_| Vec::new()).collect();
    for row in by_tau {
        for (col, r) in columns.iter_mut().zip(row) {
            col.push(r);
        }
    }
    Ok(variants
        .iter()
        .zip(columns)
        .flat_map(|(&variant, col)| {
            taus.iter()
                .zip(col)
                .map(move |(&tau, outcome)| SweepRow { variant, tau, outcome })
        })
        .collect())
}
