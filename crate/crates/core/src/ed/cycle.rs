//! Otto cycle of the dense model on eigenlevel populations.
//!
//! The bath strokes leave the state diagonal in the energy basis, so each
//! ramp only enters through its transition probabilities between the
//! eigenlevels at the two endpoint fields.

use nalgebra::{DMatrix, DVector};

use crate::cycle::{CycleConfig, CycleResult, Model, Variant};
use crate::ed::hamiltonian::{sorted_eigen, DenseParts};
use crate::ed::levels::{gap_filtered_thermalize, gibbs, LevelPopulations};
use crate::ed::propagate::converged_propagators;
use crate::error::{Error, Result};

struct Spectrum {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl Spectrum {
    fn at(parts: &DenseParts, bx: f64) -> Self {
        let (energies, vectors) = sorted_eigen(parts.at(bx));
        Spectrum { energies, vectors }
    }
}

/// `P[a][b]` for the compression (`h1 → h2`) and expansion (`h2 → h1`) ramps.
#[derive(Clone)]
struct Transfer {
    down: DMatrix<f64>,
    up: DMatrix<f64>,
}

fn parts_of(config: &CycleConfig) -> Result<DenseParts> {
    match config.model {
        Model::Ltim(p) => DenseParts::new(config.sites, p.j, p.bz, p.boundary),
        Model::Tim => Err(Error::invalid("model", "expected the dense model")),
    }
}

fn apply(transfer: &DMatrix<f64>, pops: &LevelPopulations, energies: &[f64]) -> LevelPopulations {
    let p = transfer * DVector::from_column_slice(pops.populations());
    // Clamp round-off below zero so downstream checks see valid populations.
    LevelPopulations::from_parts_unchecked(energies.to_vec(), p.iter().map(|x| x.max(0.0)).collect())
}

fn bath(pops: &LevelPopulations, energies: &[f64], temperature: f64, cutoff: f64) -> Result<LevelPopulations> {
    if cutoff > 0.0 {
        gap_filtered_thermalize(pops, temperature, cutoff)
    } else {
        gibbs(energies, temperature)
    }
}

fn run_pass(config: &CycleConfig, e1: &Spectrum, e2: &Spectrum, transfer: Option<&Transfer>) -> Result<CycleResult> {
    let cutoffs = config.stroke_cutoffs()?;
    let ramp = |t: Option<&DMatrix<f64>>, p: &LevelPopulations, target: &Spectrum| match t {
        Some(m) => apply(m, p, &target.energies),
        None => LevelPopulations::from_parts_unchecked(target.energies.clone(), p.populations().to_vec()),
    };
    let mut b = gibbs(&e1.energies, config.t_hot)?;
    let mut energies = [0.0; 5];
    for _ in 0..config.cycles {
        let c = ramp(transfer.map(|t| &t.down), &b, e2);
        let d = bath(&c, &e2.energies, config.t_cold, cutoffs.0)?;
        let a = ramp(transfer.map(|t| &t.up), &d, e1);
        let b_next = bath(&a, &e1.energies, config.t_hot, cutoffs.1)?;
        energies = [
            a.mean_energy(),
            b.mean_energy(),
            c.mean_energy(),
            d.mean_energy(),
            b_next.mean_energy(),
        ];
        b = b_next;
    }
    Ok(CycleResult::from_energies(config, cutoffs, energies, Vec::new()))
}

fn probabilities(
    parts: &DenseParts,
    from: &Spectrum,
    to: &Spectrum,
    b0: f64,
    b1: f64,
    taus: &[f64],
    config: &CycleConfig,
) -> Vec<Result<DMatrix<f64>>> {
    converged_propagators(parts, b0, b1, taus, config.integrator.tolerance, config.steps, |u| {
        u.transition_probabilities(&from.vectors, &to.vectors)
    })
    .into_iter()
    .map(|u| u.map(|u| u.transition_probabilities(&from.vectors, &to.vectors)))
    .collect()
}

/// Results indexed `[τ][variant]` for `τ1 = τ2 = τ`.
pub(crate) fn sweep_ltim(config: &CycleConfig, taus: &[f64], variants: &[Variant]) -> Vec<Vec<Result<CycleResult>>> {
    let fail = |e: Error| {
        taus.iter()
            .map(|_| variants.iter().map(|_| Err(e.clone())).collect())
            .collect()
    };
    let parts = match parts_of(config) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let (e1, e2) = (Spectrum::at(&parts, config.h1), Spectrum::at(&parts, config.h2));
    let dynamic = variants.iter().any(|v| *v != Variant::Adiabatic);
    let transfers: Vec<Result<Transfer>> = if dynamic {
        probabilities(&parts, &e1, &e2, config.h1, config.h2, taus, config)
            .into_iter()
            .map(|p| {
                p.map(|down| Transfer {
                    up: down.transpose(),
                    down,
                })
            })
            .collect()
    } else {
        taus.iter()
            .map(|_| Err(Error::invalid("variants", "no ramp requested")))
            .collect()
    };
    taus.iter()
        .zip(&transfers)
        .map(|(&tau, transfer)| {
            variants
                .iter()
                .map(|&v| {
                    let c = config.clone().with_tau(tau).with_variant(v);
                    c.validate()?;
                    match v {
                        Variant::Adiabatic => run_pass(&c, &e1, &e2, None),
                        _ => run_pass(&c, &e1, &e2, Some(transfer.as_ref().map_err(Clone::clone)?)),
                    }
                })
                .collect()
        })
        .collect()
}

/// Runs several variants of one dense engine with shared ramps.
pub(crate) fn run_ltim_variants(config: &CycleConfig, variants: &[Variant]) -> Vec<Result<CycleResult>> {
    if config.tau1 == config.tau2 {
        return sweep_ltim(config, &[config.tau1], variants)
            .pop()
            .expect("one duration");
    }
    let transfer = (|| -> Result<(Spectrum, Spectrum, Option<Transfer>)> {
        let parts = parts_of(config)?;
        let (e1, e2) = (Spectrum::at(&parts, config.h1), Spectrum::at(&parts, config.h2));
        if !variants.iter().any(|v| *v != Variant::Adiabatic) {
            return Ok((e1, e2, None));
        }
        config.validate()?;
        let down = probabilities(&parts, &e1, &e2, config.h1, config.h2, &[config.tau1], config)
            .pop()
            .expect("one duration")?;
        let up = probabilities(&parts, &e2, &e1, config.h2, config.h1, &[config.tau2], config)
            .pop()
            .expect("one duration")?;
        Ok((e1, e2, Some(Transfer { down, up })))
    })();
    variants
        .iter()
        .map(|&v| {
            let (e1, e2, t) = transfer.as_ref().map_err(Clone::clone)?;
            let c = config.clone().with_variant(v);
            c.validate()?;
            match v {
                Variant::Adiabatic => run_pass(&c, e1, e2, None),
                _ => run_pass(&c, e1, e2, Some(t.as_ref().expect("ramps computed"))),
            }
        })
        .collect()
}

/// Runs the configured dense engine.
pub fn run_ltim_cycle(config: &CycleConfig) -> Result<CycleResult> {
    if !matches!(config.model, Model::Ltim(_)) {
        return Err(Error::invalid("model", "expected the dense model"));
    }
    run_ltim_variants(config, &[config.variant]).pop().expect("one variant")
}
