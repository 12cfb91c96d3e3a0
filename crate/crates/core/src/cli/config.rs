//! TOML run documents.
//!
//! Nested tables and dotted keys are equivalent: `[cutoff] kind = "constant"`
//! and `cutoff.kind = "constant"` name the same key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::cycle::{BathMode, CycleConfig, LtimParams, Model, StaMode, Variant};
use crate::ed::Boundary;
use crate::numeric::geometric_grid;
use crate::tim::{CutoffPolicy, CutoffRule};
use crate::Error;

/// Problem with a run document, naming the offending key.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax(String),
    Unknown(String),
    Missing(String),
    Invalid { key: String, reason: String },
}

impl ConfigError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// The key the error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Syntax(_) => None,
            ConfigError::Unknown(k) | ConfigError::Missing(k) | ConfigError::Invalid { key: k, .. } => Some(k),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax(m) => write!(f, "malformed document: {m}"),
            ConfigError::Unknown(k) => write!(f, "unknown key `{k}`"),
            ConfigError::Missing(k) => write!(f, "missing required key `{k}`"),
            ConfigError::Invalid { key, reason } => write!(f, "invalid `{key}`: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => ConfigError::invalid(name, reason),
            Error::DegenerateCutoff(m) => ConfigError::invalid("cutoff.C3", m),
            other => ConfigError::invalid("integrator", other.to_string()),
        }
    }
}

/// Table a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    /// One row per `(variant, τ)`.
    Sweep,
    /// Per-mode heats of a single run of the free-fermion engine.
    Modes,
}

/// Everything needed to produce one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: CycleConfig,
    pub tau_grid: Vec<f64>,
    pub variants: Vec<Variant>,
    pub output: PathBuf,
    pub preset: Option<String>,
    pub product: Product,
}

impl RunManifest {
    /// Checks the grid, the variants and every per-variant configuration.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tau_grid.is_empty() {
            return Err(ConfigError::invalid("tau_grid", "must not be empty"));
        }
        if let Some(t) = self.tau_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(ConfigError::invalid(
                "tau_grid",
                format!("durations must be positive, got {t}"),
            ));
        }
        if self.tau_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::invalid("tau_grid", "must be strictly increasing"));
        }
        if self.variants.is_empty() {
            return Err(ConfigError::invalid("variants", "must list at least one variant"));
        }
        let c = &self.config;
        if !(c.h1 > c.h2) {
            return Err(ConfigError::invalid(
                "h2",
                format!("must be below h1 = {}, got {}", c.h1, c.h2),
            ));
        }
        for &v in &self.variants {
            c.clone().with_variant(v).with_tau(self.tau_grid[0]).validate()?;
        }
        if self.product == Product::Modes {
            if c.model != Model::Tim {
                return Err(ConfigError::invalid("model", "mode profiles need model = \"tim\""));
            }
            if self.variants.len() != 1 || self.tau_grid.len() != 1 {
                return Err(ConfigError::invalid(
                    "variants",
                    "mode profiles need exactly one variant and one duration",
                ));
            }
        }
        Ok(())
    }
}

/// Flattened view of the document that hands out keys one at a time and
/// reports whatever is left over.
struct Doc(BTreeMap<String, toml::Value>);

impl Doc {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_owned()))?;
        let mut map = BTreeMap::new();
        flatten("", table, &mut map);
        Ok(Doc(map))
    }

    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.0.remove(key)
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(x)),
            Some(toml::Value::Integer(i)) => Ok(Some(i as f64)),
            Some(v) => Err(ConfigError::invalid(
                key,
                format!("expected a number, got {}", v.type_str()),
            )),
        }
    }

    fn req_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?.ok_or_else(|| ConfigError::Missing(key.into()))
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) => usize::try_from(i)
                .map(Some)
                .map_err(|_| ConfigError::invalid(key, format!("must be non-negative, got {i}"))),
            Some(v) => Err(ConfigError::invalid(
                key,
                format!("expected an integer, got {}", v.type_str()),
            )),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(ConfigError::invalid(
                key,
                format!("expected a string, got {}", v.type_str()),
            )),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(b)) => Ok(Some(b)),
            Some(v) => Err(ConfigError::invalid(
                key,
                format!("expected true or false, got {}", v.type_str()),
            )),
        }
    }

    /// Fails with the first key in `keys` that is still present.
    fn reject(&mut self, keys: &[&str], reason: &str) -> Result<(), ConfigError> {
        match keys.iter().find(|k| self.0.contains_key(**k)) {
            Some(k) => Err(ConfigError::invalid(*k, reason)),
            None => Ok(()),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.0.into_keys().next() {
            Some(k) => Err(ConfigError::Unknown(k)),
            None => Ok(()),
        }
    }
}

fn flatten(prefix: &str, table: toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            v => {
                out.insert(key, v);
            }
        }
    }
}

fn tau_grid(doc: &mut Doc) -> Result<Vec<f64>, ConfigError> {
    if let Some(v) = doc.take("tau_grid") {
        let toml::Value::Array(items) = v else {
            return Err(ConfigError::invalid(
                "tau_grid",
                "expected an array or a {start, stop, points} table",
            ));
        };
        return items
            .into_iter()
            .map(|x| match x {
                toml::Value::Float(f) => Ok(f),
                toml::Value::Integer(i) => Ok(i as f64),
                other => Err(ConfigError::invalid(
                    "tau_grid",
                    format!("expected numbers, got {}", other.type_str()),
                )),
            })
            .collect();
    }
    let start = doc.f64("tau_grid.start")?;
    let stop = doc.f64("tau_grid.stop")?;
    let points = doc.usize("tau_grid.points")?;
    match (start, stop, points) {
        (None, None, None) => Err(ConfigError::Missing("tau_grid".into())),
        (Some(a), Some(b), Some(n)) => {
            if !(a > 0.0 && b > a && b.is_finite()) {
                return Err(ConfigError::invalid(
                    "tau_grid.stop",
                    format!("need 0 < start < stop, got {a} and {b}"),
                ));
            }
            Ok(geometric_grid(a, b, n))
        }
        (None, ..) => Err(ConfigError::Missing("tau_grid.start".into())),
        (_, None, _) => Err(ConfigError::Missing("tau_grid.stop".into())),
        (.., None) => Err(ConfigError::Missing("tau_grid.points".into())),
    }
}

fn variants(doc: &mut Doc, truncation: Option<usize>) -> Result<Vec<Variant>, ConfigError> {
    let Some(v) = doc.take("variants") else {
        return Ok(vec![Variant::Bare]);
    };
    let toml::Value::Array(items) = v else {
        return Err(ConfigError::invalid("variants", "expected an array of names"));
    };
    items
        .into_iter()
        .map(|item| {
            let toml::Value::String(name) = item else {
                return Err(ConfigError::invalid("variants", "expected an array of names"));
            };
            match (name.as_str(), truncation) {
                ("sta", Some(m)) => Ok(Variant::Sta(StaMode::Truncated(m))),
                _ => name.parse::<Variant>().map_err(ConfigError::from),
            }
        })
        .collect()
}

fn cutoff(doc: &mut Doc, gamma: f64) -> Result<CutoffPolicy, ConfigError> {
    let kind = doc.string("cutoff.kind")?.unwrap_or_else(|| "kz-critical".into());
    let rule = match kind.as_str() {
        "kz-critical" => {
            doc.reject(
                &["cutoff.C2", "cutoff.C3", "cutoff.value"],
                "not used by cutoff.kind = \"kz-critical\"",
            )?;
            CutoffRule::KzCritical {
                c1: doc.f64("cutoff.C1")?.unwrap_or(1.0),
            }
        }
        "non-critical" => {
            doc.reject(
                &["cutoff.C1", "cutoff.value"],
                "not used by cutoff.kind = \"non-critical\"",
            )?;
            CutoffRule::NonCritical {
                c2: doc.req_f64("cutoff.C2")?,
                c3: doc.req_f64("cutoff.C3")?,
            }
        }
        "constant" => {
            doc.reject(
                &["cutoff.C1", "cutoff.C2", "cutoff.C3"],
                "not used by cutoff.kind = \"constant\"",
            )?;
            CutoffRule::Constant {
                value: doc.req_f64("cutoff.value")?,
            }
        }
        other => {
            return Err(ConfigError::invalid(
                "cutoff.kind",
                format!("expected kz-critical, non-critical or constant, got `{other}`"),
            ))
        }
    };
    let policy = CutoffPolicy { rule, gamma };
    policy.validate()?;
    Ok(policy)
}

/// Parses and validates a run document. The output path defaults to
/// `sweep.csv`; callers override it.
pub fn parse_config(text: &str) -> Result<RunManifest, ConfigError> {
    let mut doc = Doc::parse(text)?;
    let model_name = doc.string("model")?.unwrap_or_else(|| "tim".into());
    let sites = doc.usize("L")?.ok_or_else(|| ConfigError::Missing("L".into()))?;
    let h1 = doc.req_f64("h1")?;
    let h2 = doc.req_f64("h2")?;
    let t_hot = doc.req_f64("T_hot")?;
    let t_cold = doc.req_f64("T_cold")?;
    let taus = tau_grid(&mut doc)?;
    let truncation = doc.usize("sta.truncation")?;
    let variants = variants(&mut doc, truncation)?;

    let mut config = CycleConfig::tim(
        sites,
        h1,
        h2,
        t_hot,
        t_cold,
        taus.first().copied().unwrap_or(1.0),
        Variant::Bare,
    );
    config.variant = variants.first().copied().unwrap_or(Variant::Bare);
    config.tau_hot = doc.f64("tau_hot")?.unwrap_or(0.0);
    config.tau_cold = doc.f64("tau_cold")?.unwrap_or(0.0);
    config.cycles = doc.usize("cycles")?.unwrap_or(1);
    config.steps = doc.usize("integrator.steps")?;

    config.model = match model_name.as_str() {
        "tim" => {
            doc.reject(
                &["boundary", "ltim.Bz", "ltim.J", "ltim.both_strokes"],
                "only applies to model = \"ltim\"",
            )?;
            Model::Tim
        }
        "ltim" => {
            let mut p = LtimParams::default();
            if let Some(b) = doc.string("boundary")? {
                p.boundary = b
                    .parse::<Boundary>()
                    .map_err(|e| ConfigError::invalid("boundary", e.to_string()))?;
            }
            p.j = doc.f64("ltim.J")?.unwrap_or(p.j);
            p.bz = doc.f64("ltim.Bz")?.unwrap_or(p.bz);
            p.both_strokes = doc.bool("ltim.both_strokes")?.unwrap_or(false);
            Model::Ltim(p)
        }
        other => {
            return Err(ConfigError::invalid(
                "model",
                format!("expected tim or ltim, got `{other}`"),
            ))
        }
    };

    let bath_mode = doc.string("bath.mode")?.unwrap_or_else(|| "instantaneous".into());
    config.bath = match bath_mode.as_str() {
        "instantaneous" => {
            doc.reject(&["bath.G0"], "only applies to bath.mode = \"timed\"")?;
            BathMode::Instantaneous
        }
        "timed" => BathMode::Timed {
            g0: doc.f64("bath.G0")?.unwrap_or(1.0),
        },
        other => {
            return Err(ConfigError::invalid(
                "bath.mode",
                format!("expected instantaneous or timed, got `{other}`"),
            ))
        }
    };

    let hot_gated = variants.iter().any(|v| match config.model {
        Model::Tim => *v == Variant::Beqe,
        Model::Ltim(p) => *v == Variant::Beqe && p.both_strokes,
    });
    let gamma = match doc.f64("gamma")? {
        Some(g) => g,
        None if hot_gated => return Err(ConfigError::Missing("gamma".into())),
        // Only the decaying stroke is filtered, so the factor is unused.
        None => 1.0,
    };
    let wants_cutoff = variants.iter().any(Variant::is_gated) || doc.0.keys().any(|k| k.starts_with("cutoff."));
    if wants_cutoff {
        config.cutoff = Some(cutoff(&mut doc, gamma)?);
    }
    doc.finish()?;

    let manifest = RunManifest {
        config,
        tau_grid: taus,
        variants,
        output: PathBuf::from("sweep.csv"),
        preset: None,
        product: Product::Sweep,
    };
    manifest.validate()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "L = 8\nh1 = 10\nh2 = 1\nT_hot = 20\nT_cold = 1\ntau_grid = [5.0, 50.0]\n";

    #[test]
    fn minimal_document_gets_defaults() {
        let m = parse_config(MINIMAL).unwrap();
        assert_eq!(m.config.model, Model::Tim);
        assert_eq!(m.config.sites, 8);
        assert_eq!(m.tau_grid, vec![5.0, 50.0]);
        assert_eq!(m.variants, vec![Variant::Bare]);
        assert_eq!(m.config.bath, BathMode::Instantaneous);
        assert_eq!(m.config.cutoff, None);
        assert_eq!(m.config.cycles, 1);
        assert_eq!(m.product, Product::Sweep);
    }

    #[test]
    fn gated_variant_defaults_to_unit_c1() {
        let m = parse_config(&format!("{MINIMAL}variants = [\"beqe\", \"sta\"]\ngamma = 6.5\n")).unwrap();
        assert_eq!(m.config.cutoff, Some(CutoffPolicy::kz_critical(1.0, 6.5)));
        assert_eq!(m.variants[1], Variant::Sta(StaMode::Exact));
    }

    #[test]
    fn nested_and_dotted_keys_agree() {
        let dotted = parse_config(&format!(
            "{MINIMAL}cutoff.kind = \"constant\"\ncutoff.value = 0.3\ngamma = 62\n"
        ))
        .unwrap();
        let nested = parse_config(&format!(
            "{MINIMAL}gamma = 62\n[cutoff]\nkind = \"constant\"\nvalue = 0.3\n"
        ))
        .unwrap();
        assert_eq!(dotted, nested);
        assert_eq!(dotted.config.cutoff, Some(CutoffPolicy::constant(0.3, 62.0)));
    }

    #[test]
    fn geometric_grid_table() {
        let text = MINIMAL.replace(
            "tau_grid = [5.0, 50.0]",
            "tau_grid = { start = 5, stop = 5000, points = 40 }",
        );
        let m = parse_config(&text).unwrap();
        assert_eq!(m.tau_grid.len(), 40);
        assert_eq!(m.tau_grid[0], 5.0);
    }

    #[test]
    fn truncation_applies_to_plain_sta() {
        let m = parse_config(&format!(
            "{MINIMAL}variants = [\"sta\", \"sta-exact\"]\nsta.truncation = 2\n"
        ))
        .unwrap();
        assert_eq!(
            m.variants,
            vec![Variant::Sta(StaMode::Truncated(2)), Variant::Sta(StaMode::Exact)]
        );
    }

    #[test]
    fn dense_model_keys() {
        let text =
            format!("{MINIMAL}model = \"ltim\"\nboundary = \"periodic\"\nltim.Bz = 0.4\n").replace("L = 8", "L = 5");
        let m = parse_config(&text).unwrap();
        let Model::Ltim(p) = m.config.model else { panic!() };
        assert_eq!((p.boundary, p.bz, p.j), (Boundary::Periodic, 0.4, 1.0));
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            (format!("{MINIMAL}colour = 3\n"), "colour"),
            (MINIMAL.replace("h2 = 1", "h2 = 10"), "h2"),
            (MINIMAL.replace("T_cold = 1\n", ""), "T_cold"),
            (format!("{MINIMAL}variants = [\"beqe\"]\n"), "gamma"),
            (format!("{MINIMAL}variants = [\"warp\"]\n"), "variants"),
            (format!("{MINIMAL}cutoff.kind = \"constant\"\n"), "cutoff.value"),
            (format!("{MINIMAL}cutoff.C2 = 2\n"), "cutoff.C2"),
            (format!("{MINIMAL}boundary = \"open\"\n"), "boundary"),
            (format!("{MINIMAL}cutoff.wobble = 1\n"), "cutoff.wobble"),
            (MINIMAL.replace("[5.0, 50.0]", "[50.0, 5.0]"), "tau_grid"),
            (MINIMAL.replace("[5.0, 50.0]", "[]"), "tau_grid"),
            (MINIMAL.replace("L = 8", "L = 7"), "L"),
            (MINIMAL.replace("L = 8", "L = \"8\""), "L"),
        ];
        for (text, key) in cases {
            let e = parse_config(&text).unwrap_err();
            assert_eq!(e.key(), Some(key), "{e}");
            assert!(e.to_string().contains(key));
        }
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(parse_config("L = = 3"), Err(ConfigError::Syntax(_))));
    }
}
