#![allow(dead_code)]

use critical_otto::dynamics::{
    adiabatic_map, dissipative_stroke, evolve_sta, evolve_unitary, BathSpec, CounterdiabaticDrive, DissipationMode,
    IntegratorSettings, ModeState, RampProtocol, VALIDITY_TOL,
};
use critical_otto::ed::{gap_filtered_thermalize, LevelPopulations};
use critical_otto::numeric::C64;
use nalgebra::Matrix4;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use std::f64::consts::PI;

pub fn random_state(entries: [(f64, f64); 16]) -> ModeState {
    let a = Matrix4::from_iterator(entries.iter().map(|&(re, im)| C64::new(re, im)));
    let rho = a * a.adjoint() + Matrix4::identity().scale(1e-3);
    let tr = rho.trace();
    ModeState::new(rho / tr).unwrap()
}

#[derive(Debug, Clone)]
pub enum Op {
    Ramp { h0: f64, h1: f64, tau: f64 },
    Sta { h0: f64, h1: f64, tau: f64 },
    Adiabatic { h0: f64, h1: f64 },
    Thermalize { h: f64, t: f64, cut: f64 },
    Relax { h: f64, t: f64, cut: f64, dur: f64 },
}

pub fn op() -> impl Strategy<Value = Op> {
    let field = 0.0..6.0f64;
    prop_oneof![
        (field.clone(), field.clone(), 0.1..20.0f64).prop_map(|(h0, h1, tau)| Op::Ramp { h0, h1, tau }),
        (field.clone(), field.clone(), 0.1..20.0f64).prop_map(|(h0, h1, tau)| Op::Sta { h0, h1, tau }),
        (field.clone(), field.clone()).prop_map(|(h0, h1)| Op::Adiabatic { h0, h1 }),
        (field.clone(), 0.05..30.0f64, 0.0..4.0f64).prop_map(|(h, t, cut)| Op::Thermalize { h, t, cut }),
        (field, 0.05..30.0f64, 0.0..4.0f64, 0.0..3.0f64).prop_map(|(h, t, cut, dur)| Op::Relax { h, t, cut, dur }),
    ]
}

pub fn apply(op: &Op, s: &ModeState, k: f64) -> ModeState {
    let settings = IntegratorSettings::default();
    match *op {
        Op::Ramp { h0, h1, tau } => evolve_unitary(s, k, &RampProtocol::new(h0, h1, tau).unwrap(), &settings).unwrap(),
        Op::Sta { h0, h1, tau } => evolve_sta(
            s,
            k,
            &RampProtocol::new(h0, h1, tau).unwrap(),
            &CounterdiabaticDrive::Exact,
            &settings,
        )
        .unwrap(),
        Op::Adiabatic { h0, h1 } => adiabatic_map(s, k, h0, h1),
        Op::Thermalize { h, t, cut } => {
            let bath = BathSpec::new(t, 1.0, cut).unwrap();
            dissipative_stroke(s, k, h, &bath, DissipationMode::Instantaneous, &settings).unwrap()
        }
        Op::Relax { h, t, cut, dur } => {
            let bath = BathSpec::new(t, 1.0, cut).unwrap();
            dissipative_stroke(s, k, h, &bath, DissipationMode::Timed(dur), &settings).unwrap()
        }
    }
}

/// Random initial state, momentum and a chain of 100 operations.
pub fn chain() -> impl Strategy<Value = ([(f64, f64); 16], f64, Vec<Op>)> {
    (
        prop::array::uniform16((-1.0..1.0f64, -1.0..1.0f64)),
        0.001..PI,
        prop::collection::vec(op(), 100),
    )
}

pub fn check_chain(entries: [(f64, f64); 16], k: f64, ops: &[Op]) -> Result<(), TestCaseError> {
    let mut s = random_state(entries);
    for op in ops {
        s = apply(op, &s, k);
        prop_assert!(s.check(VALIDITY_TOL).is_ok(), "{op:?}: {:?}", s.check(VALIDITY_TOL));
    }
    Ok(())
}

pub fn blocks(energies: &[f64], cut: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=energies.len() {
        if i == energies.len() || energies[i] - energies[i - 1] < cut {
            out.push(start..i);
            start = i;
        }
    }
    out
}

pub fn spectrum() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..14).prop_flat_map(|n| {
        (
            prop::collection::vec((0.0..10.0f64, prop::bool::weighted(0.15)), n),
            prop::collection::vec(0.0..1.0f64, n),
        )
            .prop_map(|(raw, w)| {
                let mut e: Vec<f64> = Vec::with_capacity(raw.len());
                for (x, tie) in raw {
                    // Some exact degeneracies.
                    e.push(if tie && !e.is_empty() { e[e.len() - 1] } else { x });
                }
                e.sort_by(f64::total_cmp);
                let total: f64 = w.iter().sum::<f64>() + 1e-9;
                let p = w.iter().map(|x| (x + 1e-9 / w.len() as f64) / total).collect();
                (e, p)
            })
    })
}

/// Conservation, block ratios, frozen invariance and idempotence.
pub fn check_gap_filter(energies: &[f64], pops: &[f64], t: f64, cut: f64) -> Result<(), TestCaseError> {
    let input = LevelPopulations::new(energies.to_vec(), pops.to_vec()).unwrap();
    let out = gap_filtered_thermalize(&input, t, cut).unwrap();
    let p = out.populations();
    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    prop_assert!(p.iter().all(|x| *x >= 0.0));
    for b in blocks(energies, cut) {
        if b.len() == 1 {
            prop_assert_eq!(p[b.start].to_bits(), pops[b.start].to_bits());
            continue;
        }
        let mass_in: f64 = pops[b.clone()].iter().sum();
        let mass_out: f64 = p[b.clone()].iter().sum();
        prop_assert!((mass_in - mass_out).abs() <= 1e-12);
        for i in b.start + 1..b.end {
            let want = (-(energies[i] - energies[i - 1]) / t).exp();
            prop_assert!((p[i] / p[i - 1] - want).abs() <= 1e-10 * want, "ratio at {i}");
        }
    }
    let again = gap_filtered_thermalize(&out, t, cut).unwrap();
    for (a, b) in again.populations().iter().zip(p) {
        prop_assert!((a - b).abs() <= 1e-14);
    }
    Ok(())
}
