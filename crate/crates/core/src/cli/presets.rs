//! Ready-made runs for each figure-style product.

use std::path::Path;

use crate::cli::config::{ConfigError, Product, RunManifest};
use crate::cycle::{CycleConfig, LtimParams, Model, StaMode, Variant};
use crate::numeric::geometric_grid;
use crate::tim::CutoffPolicy;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 8] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"];

/// 40 geometric points on `[5, 5000]`.
pub fn default_tau_grid() -> Vec<f64> {
    geometric_grid(5.0, 5000.0, 40)
}

const STANDARD: [Variant; 4] = [
    Variant::Bare,
    Variant::Sta(StaMode::Exact),
    Variant::Adiabatic,
    Variant::Beqe,
];

/// Critical engine on 1000 sites: `h1 = 10`, `h2 = 1`, `T_H = 20`, `T_C = 1`.
fn critical(cutoff: CutoffPolicy) -> CycleConfig {
    CycleConfig::tim(1000, 10.0, 1.0, 20.0, 1.0, 5.0, Variant::Bare).with_cutoff(cutoff)
}

/// Engine crossing the critical point, `h2 < 1`, with `Δ* = 2|1 − h2| + C3`.
fn crossing(h2: f64, c3: f64) -> CycleConfig {
    let mut c = critical(CutoffPolicy::non_critical(2.0, c3, 6.5));
    c.h2 = h2;
    c
}

fn with_power_strokes(mut c: CycleConfig) -> CycleConfig {
    c.tau_hot = 2.0;
    c.tau_cold = 2.0;
    c
}

/// Manifests for the named preset with outputs under `out_dir`.
pub fn preset(name: &str, out_dir: &Path) -> Result<Vec<RunManifest>, ConfigError> {
    let sweep = |file: &str, config: CycleConfig, variants: &[Variant]| RunManifest {
        config,
        tau_grid: default_tau_grid(),
        variants: variants.to_vec(),
        output: out_dir.join(file),
        preset: Some(name.to_owned()),
        product: Product::Sweep,
    };
    let constant = |value: f64, gamma: f64| critical(CutoffPolicy::constant(value, gamma));
    let manifests = match name {
        "fig3" => vec![sweep(
            "fig3.csv",
            critical(CutoffPolicy::kz_critical(1.0, 6.5)),
            &STANDARD,
        )],
        "fig4" => vec![RunManifest {
            config: critical(CutoffPolicy::kz_critical(1.0, 6.5)).with_variant(Variant::Adiabatic),
            // The adiabatic map does not depend on the duration.
            tau_grid: vec![1.0],
            variants: vec![Variant::Adiabatic],
            output: out_dir.join("fig4.csv"),
            preset: Some(name.to_owned()),
            product: Product::Modes,
        }],
        "fig5" => vec![
            sweep("fig5_delta_2.1.csv", constant(2.1, 9.0), &STANDARD),
            sweep("fig5_delta_0.3.csv", constant(0.3, 62.0), &STANDARD),
        ],
        "fig6" => vec![sweep(
            "fig6.csv",
            constant(0.3, 62.0),
            &[
                Variant::Bare,
                Variant::Adiabatic,
                Variant::Beqe,
                Variant::BeqeSingleStroke,
            ],
        )],
        "fig7" => vec![
            sweep("fig7_h2_0.5.csv", crossing(0.5, 0.02), &STANDARD),
            sweep("fig7_h2_0.8.csv", crossing(0.8, 0.08), &STANDARD),
        ],
        "fig8" => vec![
            sweep("fig8_delta_2.1.csv", with_power_strokes(constant(2.1, 9.0)), &STANDARD),
            sweep("fig8_delta_0.3.csv", with_power_strokes(constant(0.3, 62.0)), &STANDARD),
        ],
        "fig9" => vec![
            sweep("fig9_h2_0.5.csv", with_power_strokes(crossing(0.5, 0.02)), &STANDARD),
            sweep("fig9_h2_0.8.csv", with_power_strokes(crossing(0.8, 0.08)), &STANDARD),
        ],
        "fig10" => {
            let mut c = CycleConfig::tim(6, 10.0, 0.75, 500.0, 0.1, 5.0, Variant::Bare)
                .with_cutoff(CutoffPolicy::kz_critical(1.0, 6.5));
            c.model = Model::Ltim(LtimParams::default());
            vec![sweep("fig10.csv", c, &[Variant::Bare, Variant::Beqe])]
        }
        other => {
            return Err(ConfigError::invalid(
                "preset",
                format!("unknown preset `{other}`, expected one of {}", PRESETS.join(", ")),
            ))
        }
    };
    for m in &manifests {
        m.validate()?;
    }
    Ok(manifests)
}
