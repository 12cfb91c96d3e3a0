use rayon::prelude::*;

use crate::cycle::closed_form::{efficiency, is_engine_mode, power};
use crate::cycle::config::{BathMode, CycleConfig, Model, StaMode, Variant};
use crate::dynamics::{
    adiabatic_map, dissipative_stroke, ramp_propagator, sta_propagator, thermal_state, BathSpec, BlockPropagator,
    CounterdiabaticDrive, DissipationMode, ModeState, RampProtocol, SineProjection,
};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::tim::{mode_gap, mode_grid, ModeGrid};

/// Heat and work of one momentum mode over the final pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRecord {
    pub k: f64,
    pub gap_h1: f64,
    pub gap_h2: f64,
    pub q_in: f64,
    pub q_out: f64,
    pub w: f64,
    pub frozen_hot: bool,
    pub frozen_cold: bool,
    /// Adiabatic-limit classification from the gap inequality.
    pub engine_mode: bool,
}

/// Energies, heats and figures of merit of one run.
///
/// `e_b` is the energy at the start of the final pass and `e_b_next` the
/// energy after its closing hot stroke, so `q_in = e_b_next − e_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub variant: Variant,
    pub tau1: f64,
    pub tau2: f64,
    /// Cutoff of the decaying bath (zero when ungated).
    pub cold_cutoff: f64,
    /// Cutoff of the energizing bath (zero when ungated).
    pub hot_cutoff: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_c: f64,
    pub e_d: f64,
    pub e_b_next: f64,
    pub q_in: f64,
    pub q_out: f64,
    pub w: f64,
    pub eta: f64,
    pub power: f64,
    /// Per-mode breakdown, ascending in `k`; empty for the dense model.
    pub per_mode: Vec<ModeRecord>,
}

impl CycleResult {
    /// `Q_in > 0`, `Q_out < 0` and `W < 0`.
    pub fn is_engine(&self) -> bool {
        self.q_in > 0.0 && self.q_out < 0.0 && self.w < 0.0
    }

    /// Assembles totals from stroke energies; `W = −(Q_in + Q_out)` exactly.
    pub(crate) fn from_energies(
        config: &CycleConfig,
        cutoffs: (f64, f64),
        energies: [f64; 5],
        per_mode: Vec<ModeRecord>,
    ) -> Self {
        let [e_a, _, e_c, e_d, e_b_next] = energies;
        let q_in = e_b_next - e_a;
        let q_out = e_d - e_c;
        Self::from_heats(config, cutoffs, energies, q_in, q_out, per_mode)
    }

    fn from_heats(
        config: &CycleConfig,
        cutoffs: (f64, f64),
        [e_a, e_b, e_c, e_d, e_b_next]: [f64; 5],
        q_in: f64,
        q_out: f64,
        per_mode: Vec<ModeRecord>,
    ) -> Self {
        let w = -(q_in + q_out);
        CycleResult {
            variant: config.variant,
            tau1: config.tau1,
            tau2: config.tau2,
            cold_cutoff: cutoffs.0,
            hot_cutoff: cutoffs.1,
            e_a,
            e_b,
            e_c,
            e_d,
            e_b_next,
            q_in,
            q_out,
            w,
            eta: efficiency(w, q_in),
            power: power(w, config),
            per_mode,
        }
    }
}

/// Runs the configured engine.
pub fn run_cycle(config: &CycleConfig) -> Result<CycleResult> {
    run_variants(config, &[config.variant])
        .pop()
        .expect("one variant in, one result out")
}

/// Runs several variants of the same engine, sharing ramp propagators
/// between variants that use the same unitary strokes.
pub fn run_variants(config: &CycleConfig, variants: &[Variant]) -> Vec<Result<CycleResult>> {
    match config.model {
        Model::Tim => run_tim_variants(config, variants),
        Model::Ltim(_) => crate::ed::run_ltim_variants(config, variants),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RampKind {
    Bare,
    Adiabatic,
    Sta(StaMode),
}

impl RampKind {
    fn of(variant: Variant) -> Self {
        match variant {
            Variant::Adiabatic => RampKind::Adiabatic,
            Variant::Sta(m) => RampKind::Sta(m),
            Variant::Bare | Variant::Beqe | Variant::BeqeSingleStroke => RampKind::Bare,
        }
    }
}

#[derive(Debug, Clone)]
enum Stroke {
    Adiabatic,
    Unitary(BlockPropagator),
}

/// Compression (`h1 → h2`) and expansion (`h2 → h1`) strokes of one mode.
#[derive(Debug, Clone)]
struct StrokePair {
    down: Stroke,
    up: Stroke,
}

fn transposed(p: &BlockPropagator) -> BlockPropagator {
    BlockPropagator {
        matrix: p.matrix.transpose(),
        steps: p.steps,
    }
}

fn stroke_pair(
    k: f64,
    config: &CycleConfig,
    kind: RampKind,
    projection: Option<&SineProjection>,
) -> Result<StrokePair> {
    if kind == RampKind::Adiabatic {
        return Ok(StrokePair {
            down: Stroke::Adiabatic,
            up: Stroke::Adiabatic,
        });
    }
    let ramp = |from: f64, to: f64, tau: f64| -> Result<RampProtocol> {
        let r = RampProtocol::new(from, to, tau)?;
        match config.steps {
            Some(n) => r.with_steps(n),
            None => Ok(r),
        }
    };
    let drive = match kind {
        RampKind::Sta(StaMode::Exact) => Some(CounterdiabaticDrive::Exact),
        RampKind::Sta(StaMode::Truncated(_)) => Some(CounterdiabaticDrive::Truncated(
            projection.expect("projection for truncated drive").clone(),
        )),
        _ => None,
    };
    let propagate = |r: &RampProtocol| match &drive {
        None => ramp_propagator(k, r, &config.integrator),
        Some(d) => sta_propagator(k, r, d, &config.integrator),
    };
    let down = propagate(&ramp(config.h1, config.h2, config.tau1)?)?;
    // The block Hamiltonian is real symmetric up to a σ^y term odd in ḣ, so
    // the time-reversed ramp is generated by the transposed propagator.
    let up = if config.tau1 == config.tau2 {
        transposed(&down)
    } else {
        propagate(&ramp(config.h2, config.h1, config.tau2)?)?
    };
    Ok(StrokePair {
        down: Stroke::Unitary(down),
        up: Stroke::Unitary(up),
    })
}

fn apply_stroke(stroke: &Stroke, state: &ModeState, k: f64, h_from: f64, h_to: f64) -> ModeState {
    match stroke {
        Stroke::Adiabatic => adiabatic_map(state, k, h_from, h_to),
        Stroke::Unitary(p) => p.apply(state),
    }
}

struct ModeTrace {
    record: ModeRecord,
    energies: [f64; 5],
}

fn run_mode(k: f64, config: &CycleConfig, pair: &StrokePair, cutoffs: (f64, f64)) -> Result<ModeTrace> {
    let (h1, h2) = (config.h1, config.h2);
    let g0 = match config.bath {
        BathMode::Timed { g0 } => g0,
        BathMode::Instantaneous => 1.0,
    };
    let (hot_mode, cold_mode) = match config.bath {
        BathMode::Timed { .. } => (
            DissipationMode::Timed(config.tau_hot),
            DissipationMode::Timed(config.tau_cold),
        ),
        BathMode::Instantaneous => (DissipationMode::Instantaneous, DissipationMode::Instantaneous),
    };
    let cold_bath = BathSpec::new(config.t_cold, g0, cutoffs.0)?;
    let hot_bath = BathSpec::new(config.t_hot, g0, cutoffs.1)?;
    let (gap_h1, gap_h2) = (mode_gap(k, h1), mode_gap(k, h2));

    let mut b = thermal_state(k, h1, config.t_hot)?;
    let mut energies = [0.0; 5];
    for _ in 0..config.cycles {
        let c = apply_stroke(&pair.down, &b, k, h1, h2);
        let d = dissipative_stroke(&c, k, h2, &cold_bath, cold_mode, &config.integrator)?;
        let a = apply_stroke(&pair.up, &d, k, h2, h1);
        let b_next = dissipative_stroke(&a, k, h1, &hot_bath, hot_mode, &config.integrator)?;
        energies = [
            a.energy(k, h1),
            b.energy(k, h1),
            c.energy(k, h2),
            d.energy(k, h2),
            b_next.energy(k, h1),
        ];
        b = b_next;
    }
    let [e_a, _, e_c, e_d, e_b_next] = energies;
    let (q_in, q_out) = (e_b_next - e_a, e_d - e_c);
    Ok(ModeTrace {
        record: ModeRecord {
            k,
            gap_h1,
            gap_h2,
            q_in,
            q_out,
            w: -(q_in + q_out),
            frozen_hot: !hot_bath.couples(gap_h1),
            frozen_cold: !cold_bath.couples(gap_h2),
            engine_mode: is_engine_mode(k, config),
        },
        energies,
    })
}

fn assemble(config: &CycleConfig, cutoffs: (f64, f64), traces: Vec<ModeTrace>) -> CycleResult {
    let mut energies = [0.0; 5];
    for (i, e) in energies.iter_mut().enumerate() {
        *e = compensated_sum(traces.iter().map(|t| t.energies[i]));
    }
    let q_in = compensated_sum(traces.iter().map(|t| t.record.q_in));
    let q_out = compensated_sum(traces.iter().map(|t| t.record.q_out));
    let per_mode = traces.into_iter().map(|t| t.record).collect();
    CycleResult::from_heats(config, cutoffs, energies, q_in, q_out, per_mode)
}

struct Prepared {
    config: CycleConfig,
    cutoffs: (f64, f64),
    kind: RampKind,
}

fn prepare(config: &CycleConfig, variant: Variant) -> Result<Prepared> {
    let config = config.clone().with_variant(variant);
    config.validate()?;
    let cutoffs = config.stroke_cutoffs()?;
    Ok(Prepared {
        kind: RampKind::of(variant),
        config,
        cutoffs,
    })
}

fn run_tim_variants(config: &CycleConfig, variants: &[Variant]) -> Vec<Result<CycleResult>> {
    let grid = match mode_grid(config.sites) {
        Ok(g) => g,
        Err(e) => return variants.iter().map(|_| Err(e.clone())).collect(),
    };
    let prepared: Vec<Result<Prepared>> = variants.iter().map(|&v| prepare(config, v)).collect();
    let mut kinds: Vec<RampKind> = Vec::new();
    for p in prepared.iter().flatten() {
        if !kinds.contains(&p.kind) {
            kinds.push(p.kind);
        }
    }
    let projections = match truncated_projections(&grid, &kinds) {
        Ok(p) => p,
        Err(e) => return variants.iter().map(|_| Err(e.clone())).collect(),
    };

    // traces[mode][variant]
    let traces: Vec<Vec<Result<ModeTrace>>> = grid
        .momenta()
        .par_iter()
        .map(|&k| {
            let pairs: Vec<Result<StrokePair>> = kinds
                .iter()
                .zip(&projections)
                .map(|(&kind, proj)| stroke_pair(k, config, kind, proj.as_ref()))
                .collect();
            prepared
                .iter()
                .map(|p| {
                    let p = p.as_ref().map_err(Clone::clone)?;
                    let slot = kinds.iter().position(|&kd| kd == p.kind).expect("kind registered");
                    let pair = pairs[slot].as_ref().map_err(Clone::clone)?;
                    run_mode(k, &p.config, pair, p.cutoffs)
                })
                .collect()
        })
        .collect();

    let mut by_variant: Vec<Vec<ModeTrace>> = variants.iter().map(|_| Vec::with_capacity(grid.len())).collect();
    let mut failures: Vec<Option<Error>> = vec![None; variants.len()];
    for row in traces {
        for (i, t) in row.into_iter().enumerate() {
            match t {
                Ok(t) => by_variant[i].push(t),
                Err(e) => {
                    failures[i].get_or_insert(e);
                }
            }
        }
    }
    prepared
        .into_iter()
        .zip(by_variant)
        .zip(failures)
        .map(|((p, traces), failure)| {
            let p = p?;
            match failure {
                Some(e) => Err(e),
                None => Ok(assemble(&p.config, p.cutoffs, traces)),
            }
        })
        .collect()
}

fn truncated_projections(grid: &ModeGrid, kinds: &[RampKind]) -> Result<Vec<Option<SineProjection>>> {
    kinds
        .iter()
        .map(|kind| match kind {
            RampKind::Sta(StaMode::Truncated(m)) => SineProjection::new(grid, *m).map(Some),
            _ => Ok(None),
        })
        .collect()
}
