use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::CliError;
use crate::anneal::{AnnealConfig, SearchConfig, TransportSpace};
use crate::basis::{Parity, SectorSpec, MAX_SPINS};
use crate::error::Result as CoreResult;
use crate::model::{
    dynamic_j2_protocol, join_protocol_with, reverse_protocol, simultaneous_protocol_with, BlochVector, Coupling,
    ProtocolSpec,
};

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }

            pub fn from_name(s: &str) -> Option<Self> {
                match s { $($text => Some($name::$variant),)+ _ => None }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(ExperimentKind {
    Spectrum => "spectrum",
    GapScan => "gap-scan",
    FidelityCurve => "fidelity-curve",
    AnnealTime => "anneal-time",
    Transport => "transport",
    DegeneracyCheck => "degeneracy-check",
});

named_enum!(ModelFamily {
    J1J2 => "j1j2",
    Xxz => "xxz",
    Xyz => "xyz",
    Ising => "ising",
    Custom => "custom",
});

named_enum!(ProtocolKind {
    Join => "join",
    Unjoin => "unjoin",
    DynamicJ2 => "dynamic-j2",
    UnjoinDynamic => "unjoin-dynamic",
    Simultaneous => "simultaneous",
});

named_enum!(SectorChoice {
    Default => "default",
    Upper => "upper",
    Full => "full",
    Even => "even",
    Odd => "odd",
});

impl ModelFamily {
    /// Name of the swept parameter, used both as the config key and in
    /// messages.
    pub fn param_key(self) -> &'static str {
        match self {
            ModelFamily::J1J2 | ModelFamily::Ising => "J2",
            ModelFamily::Xxz => "ratio",
            ModelFamily::Xyz => "delta",
            ModelFamily::Custom => "param",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Stem for data files; defaults to the experiment name.
    pub prefix: Option<String>,
    pub manifest: String,
    /// Write gnuplot scripts next to the data.
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { prefix: None, manifest: "manifest.json".into(), plots: true }
    }
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelFamily,
    pub protocol: ProtocolKind,
    pub n_values: Vec<usize>,
    pub j1: f64,
    /// Values of the swept parameter (J2, Z/X ratio or XYZ delta).
    pub params: Vec<f64>,
    /// Fixed next-nearest strength for the xxz and xyz families.
    pub nnn: f64,
    pub tau: Vec<f64>,
    pub s: Vec<f64>,
    pub bloch: Vec<BlochVector>,
    pub levels: usize,
    pub sector: SectorChoice,
    pub search: SearchConfig,
    pub solver: AnnealConfig,
    pub transport_space: TransportSpace,
    pub protocol_spec: Option<ProtocolSpec>,
    pub output: OutputConfig,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

/// One point of the `(N, param)` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n_spins: usize,
    /// `None` for custom protocols, which have no sweep axis.
    pub param: Option<f64>,
}

const KEYS: &[&str] = &[
    "experiment",
    "model",
    "protocol",
    "N",
    "J1",
    "J2",
    "ratio",
    "delta",
    "nnn",
    "tau",
    "s",
    "bloch",
    "levels",
    "sector",
    "search",
    "solver",
    "transport_space",
    "protocol_spec",
    "output",
    "workers",
    "seed",
];

fn invalid(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Validation { field: field.to_string(), message: msg.into() }
}

struct Fields(Map<String, Value>);

impl Fields {
    fn take<T: serde::de::DeserializeOwned>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.remove(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v).map(Some).map_err(|e| invalid(key, e.to_string())),
        }
    }

    fn named<E>(&mut self, key: &str, parse: fn(&str) -> Option<E>, all: &[E]) -> Result<Option<E>, CliError>
    where
        E: fmt::Display,
    {
        let Some(text) = self.take::<String>(key)? else { return Ok(None) };
        match parse(&text) {
            Some(v) => Ok(Some(v)),
            None => {
                let names: Vec<String> = all.iter().map(|v| v.to_string()).collect();
                Err(invalid(key, format!("unknown value {text:?}, expected one of {}", names.join(", "))))
            }
        }
    }
}

/// Parse and validate a JSON experiment configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    parse_config_as(text, None)
}

/// Like [`parse_config`], with the experiment kind supplied by the caller
/// (the CLI subcommand); a conflicting `experiment` field is rejected.
pub fn parse_config_as(text: &str, kind: Option<ExperimentKind>) -> Result<ExperimentConfig, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let Value::Object(map) = value else {
        return Err(CliError::Parse { line: 1, column: 1, message: "top level must be a JSON object".into() });
    };
    if let Some(key) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(invalid(key, "unknown field"));
    }
    let mut f = Fields(map);

    let experiment = match (f.named("experiment", ExperimentKind::from_name, ExperimentKind::ALL)?, kind) {
        (Some(a), Some(b)) if a != b => return Err(invalid("experiment", format!("config says {a}, command says {b}"))),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(invalid("experiment", "missing")),
    };
    let model = f.named("model", ModelFamily::from_name, ModelFamily::ALL)?.unwrap_or(ModelFamily::J1J2);
    let protocol = f.named("protocol", ProtocolKind::from_name, ProtocolKind::ALL)?.unwrap_or(ProtocolKind::Join);
    let protocol_spec: Option<ProtocolSpec> = f.take("protocol_spec")?;

    let key = model.param_key();
    for other in ["J2", "ratio", "delta"] {
        if other != key && f.0.contains_key(other) {
            return Err(invalid(other, format!("the {model} family sweeps {key}")));
        }
    }
    let params: Vec<f64> = f.take(key)?.unwrap_or_default();
    let n_values: Vec<usize> = f.take("N")?.unwrap_or_default();

    let cfg = ExperimentConfig {
        experiment,
        model,
        protocol,
        n_values,
        j1: f.take("J1")?.unwrap_or(1.0),
        params,
        nnn: f.take("nnn")?.unwrap_or(0.0),
        tau: f.take("tau")?.unwrap_or_default(),
        s: f.take("s")?.unwrap_or_else(|| vec![1.0]),
        bloch: f.take("bloch")?.unwrap_or_else(|| BlochVector::cardinal().to_vec()),
        levels: f.take("levels")?.unwrap_or(6),
        sector: f.named("sector", SectorChoice::from_name, SectorChoice::ALL)?.unwrap_or(SectorChoice::Default),
        search: f.take("search")?.unwrap_or_default(),
        solver: f.take("solver")?.unwrap_or_default(),
        transport_space: f.take("transport_space")?.unwrap_or_default(),
        protocol_spec,
        output: f.take("output")?.unwrap_or_default(),
        workers: f.take("workers")?,
        seed: f.take("seed")?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn finite_grid(field: &str, values: &[f64], lo: f64, hi: f64) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(invalid(field, "grid is empty"));
    }
    match values.iter().find(|v| !v.is_finite() || **v < lo || **v > hi) {
        Some(v) => Err(invalid(field, format!("value {v} outside [{lo}, {hi}]"))),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.model == ModelFamily::Custom {
            let p = self.protocol_spec.as_ref().ok_or_else(|| invalid("protocol_spec", "required for custom models"))?;
            p.validate().map_err(|e| invalid("protocol_spec", e.to_string()))?;
            if !self.n_values.is_empty() || !self.params.is_empty() {
                return Err(invalid("N", "custom models take N from protocol_spec and have no sweep"));
            }
        } else {
            if self.protocol_spec.is_some() {
                return Err(invalid("protocol_spec", "only used with the custom model"));
            }
            if self.n_values.is_empty() {
                return Err(invalid("N", "grid is empty"));
            }
            if let Some(n) = self.n_values.iter().find(|&&n| !(3..=MAX_SPINS).contains(&n)) {
                return Err(invalid("N", format!("{n} outside 3..={MAX_SPINS}")));
            }
            finite_grid(self.model.param_key(), &self.params, f64::MIN, f64::MAX)?;
            if self.model == ModelFamily::Xxz && self.params.iter().any(|&r| r < 0.0) {
                return Err(invalid("ratio", "Z/X ratio must be non-negative"));
            }
            let dynamic = matches!(self.protocol, ProtocolKind::DynamicJ2 | ProtocolKind::UnjoinDynamic);
            if dynamic && self.model != ModelFamily::J1J2 {
                return Err(invalid("protocol", format!("{} needs the j1j2 model", self.protocol)));
            }
            if self.nnn != 0.0 && !matches!(self.model, ModelFamily::Xxz | ModelFamily::Xyz) {
                return Err(invalid("nnn", "only the xxz and xyz families take a fixed next-nearest strength"));
            }
            if !self.j1.is_finite() {
                return Err(invalid("J1", "must be finite"));
            }
            for &n in &self.n_values {
                self.build_protocol(GridPoint { n_spins: n, param: Some(self.params[0]) })
                    .map_err(|e| invalid("N", format!("N = {n}: {e}")))?;
            }
        }
        match self.experiment {
            ExperimentKind::FidelityCurve | ExperimentKind::Transport => finite_grid("tau", &self.tau, 0.0, f64::MAX)?,
            ExperimentKind::GapScan | ExperimentKind::Spectrum | ExperimentKind::DegeneracyCheck => {
                finite_grid("s", &self.s, 0.0, 1.0)?
            }
            ExperimentKind::AnnealTime => {}
        }
        if self.experiment == ExperimentKind::Transport && self.bloch.is_empty() {
            return Err(invalid("bloch", "grid is empty"));
        }
        if self.levels == 0 {
            return Err(invalid("levels", "must be positive"));
        }
        self.search.validate().map_err(|e| invalid("search", e.to_string()))?;
        let s = &self.solver;
        if !(s.eigen.tol > 0.0 && s.degeneracy_threshold > 0.0 && s.eigen.krylov_dim >= 2 && s.eigen.max_iterations > 0) {
            return Err(invalid("solver", "tolerances and iteration limits must be positive"));
        }
        s.propagator.validate().map_err(|e| invalid("solver", e.to_string()))?;
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be positive"));
        }
        let prefix = self.prefix();
        if prefix.is_empty() || prefix.contains(['/', '\\']) || self.output.manifest.contains(['/', '\\']) {
            return Err(invalid("output", "file names must be plain names inside the output directory"));
        }
        Ok(())
    }

    pub fn prefix(&self) -> String {
        self.output.prefix.clone().unwrap_or_else(|| self.experiment.name().to_string())
    }

    /// Grid points in output order: N outer, parameter inner.
    pub fn grid(&self) -> Vec<GridPoint> {
        if self.model == ModelFamily::Custom {
            let n = self.protocol_spec.as_ref().map_or(0, |p| p.n_spins);
            return vec![GridPoint { n_spins: n, param: None }];
        }
        self.n_values
            .iter()
            .flat_map(|&n| self.params.iter().map(move |&x| GridPoint { n_spins: n, param: Some(x) }))
            .collect()
    }

    fn couplings(&self, x: f64) -> (Coupling, Coupling) {
        match self.model {
            ModelFamily::J1J2 | ModelFamily::Custom => (Coupling::isotropic(self.j1), Coupling::isotropic(x)),
            ModelFamily::Ising => (Coupling::ising(self.j1), Coupling::ising(x)),
            ModelFamily::Xxz => (Coupling::xxz(self.j1, x), Coupling::xxz(self.nnn, x)),
            ModelFamily::Xyz => (Coupling::xyz(x).scaled(self.j1), Coupling::xyz(x).scaled(self.nnn)),
        }
    }

    pub fn build_protocol(&self, point: GridPoint) -> CoreResult<ProtocolSpec> {
        if let Some(p) = &self.protocol_spec {
            return Ok(p.clone());
        }
        let n = point.n_spins;
        let x = point.param.unwrap_or(0.0);
        let (nn, nnn) = self.couplings(x);
        Ok(match self.protocol {
            ProtocolKind::Join => join_protocol_with(n, nn, nnn)?,
            ProtocolKind::Unjoin => reverse_protocol(&join_protocol_with(n, nn, nnn)?),
            ProtocolKind::DynamicJ2 => dynamic_j2_protocol(n, self.j1, x)?,
            ProtocolKind::UnjoinDynamic => reverse_protocol(&dynamic_j2_protocol(n, self.j1, x)?),
            ProtocolKind::Simultaneous => simultaneous_protocol_with(n, nn, nnn)?,
        })
    }

    pub fn sector_for(&self, p: &ProtocolSpec) -> SectorSpec {
        let n = p.n_spins;
        let conserving = p.conserves_magnetization();
        match self.sector {
            SectorChoice::Default => crate::anneal::default_sector(p),
            SectorChoice::Upper if conserving => SectorSpec::magnetization(n, n.div_ceil(2)),
            SectorChoice::Upper | SectorChoice::Odd => SectorSpec::parity(n, Parity::Odd),
            SectorChoice::Even => SectorSpec::parity(n, Parity::Even),
            SectorChoice::Full => SectorSpec::full(n),
        }
    }

    /// Solver settings with the seed override applied.
    pub fn anneal_config(&self) -> AnnealConfig {
        let mut c = self.solver;
        if let Some(seed) = self.seed {
            c.eigen.seed = seed;
        }
        c
    }

    /// JSON form of the configuration; parses back to an equal value.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("experiment".into(), self.experiment.name().into());
        m.insert("model".into(), self.model.name().into());
        m.insert("protocol".into(), self.protocol.name().into());
        if self.model != ModelFamily::Custom {
            m.insert("N".into(), serde_json::json!(self.n_values));
            m.insert(self.model.param_key().into(), serde_json::json!(self.params));
        }
        m.insert("J1".into(), self.j1.into());
        m.insert("nnn".into(), self.nnn.into());
        m.insert("tau".into(), serde_json::json!(self.tau));
        m.insert("s".into(), serde_json::json!(self.s));
        m.insert("bloch".into(), serde_json::json!(self.bloch));
        m.insert("levels".into(), self.levels.into());
        m.insert("sector".into(), self.sector.name().into());
        m.insert("search".into(), serde_json::json!(self.search));
        m.insert("solver".into(), serde_json::json!(self.solver));
        m.insert("transport_space".into(), serde_json::json!(self.transport_space));
        if let Some(p) = &self.protocol_spec {
            m.insert("protocol_spec".into(), serde_json::json!(p));
        }
        m.insert("output".into(), serde_json::json!(self.output));
        if let Some(w) = self.workers {
            m.insert("workers".into(), w.into());
        }
        if let Some(s) = self.seed {
            m.insert("seed".into(), s.into());
        }
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(r#"{"experiment":"anneal-time","model":"j1j2","protocol":"join","N":[9],"J2":[0.0,0.2,0.4]}"#)
            .unwrap();
        assert_eq!(c.search.target, 0.9);
        assert_eq!(c.search.tau_cap, 1e5);
        assert_eq!(c.j1, 1.0);
        assert_eq!(c.grid().len(), 3);
    }

    #[test]
    fn field_errors() {
        let field = |text: &str| match parse_config(text) {
            Err(CliError::Validation { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field(r#"{"experiment":"anneal-time","N":[9],"J2":[]}"#), "J2");
        assert_eq!(field(r#"{"experiment":"anneal-time","protocol":"teleport2","N":[9],"J2":[0.1]}"#), "protocol");
        assert_eq!(field(r#"{"experiment":"anneal-time","N":[9],"J2":[0.1],"colour":1}"#), "colour");
        assert_eq!(field(r#"{"experiment":"anneal-time","model":"xxz","N":[9],"J2":[0.1]}"#), "J2");
        assert_eq!(field(r#"{"experiment":"anneal-time","protocol":"simultaneous","N":[3],"J2":[0.1]}"#), "N");
        assert_eq!(field(r#"{"experiment":"transport","N":[5],"J2":[0.1]}"#), "tau");
        let parse = parse_config("{\n  \"experiment\": ,\n}");
        assert!(matches!(parse, Err(CliError::Parse { line: 2, .. })), "{parse:?}");
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config(
            r#"{"experiment":"transport","model":"xyz","protocol":"simultaneous","N":[5,7],"delta":[0.3],
                "tau":[10,20],"seed":7,"solver":{"eigen":{"tol":1e-11}}}"#,
        )
        .unwrap();
        let again = parse_config(&c.to_json().to_string()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.anneal_config().eigen.seed, 7);
    }
}
