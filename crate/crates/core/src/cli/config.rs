//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, lists are comma separated
//! (optionally bracketed). Four-vectors are contravariant `[x0, x1, …]` with
//! `x0 = ct`; vectors given with fewer than `d+1` entries are an error, the
//! built-in defaults are zero padded when `d = 3`.

use std::fmt;
use std::path::Path;

use serde_json::{Map, Value};

use super::report::{json_f64, json_list};
use crate::locality::MeasurementEvent;
use crate::minkowski::{DomainSpec, FourVector};
use crate::nr_limit::NrCompareConfig;
use crate::propagator::{KernelParams, QuadConfig, SliceLattice, SpatialDomain};

/// Raised while reading or validating a configuration; always exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        match &self.key {
            Some(k) => write!(f, "`{k}`: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<crate::Error> for ConfigError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParameter { name, reason } => ConfigError::at(&name, reason),
            other => Self {
                key: None,
                line: None,
                message: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Float,
    Int,
    Bool,
    List,
    /// A four-vector; length `d+1`.
    Vector,
    Text(&'static [&'static str]),
}

#[derive(Debug, Clone, PartialEq)]
enum Setting {
    Float(f64),
    Int(usize),
    Bool(bool),
    List(Vec<f64>),
    Text(String),
}

struct KeySpec {
    key: &'static str,
    kind: Kind,
    default: &'static str,
}

const fn k(key: &'static str, kind: Kind, default: &'static str) -> KeySpec {
    KeySpec { key, kind, default }
}

const FORMS: &[&str] = &["sqrt", "quadratic"];
const DOMAINS: &[&str] = &["unbounded", "light-cone-ball"];

/// Every recognised key, in echo order.
const SCHEMA: &[KeySpec] = &[
    k("m0", Kind::Float, "1"),
    k("c", Kind::Float, "1"),
    k("hbar", Kind::Float, "1"),
    k("epsilon", Kind::Float, "1e-3"),
    k("n_slices", Kind::Int, "2"),
    k("d", Kind::Int, "1"),
    k("nt", Kind::Int, "11"),
    k("nx", Kind::Int, "21"),
    k("dt", Kind::Float, "0.1"),
    k("dx", Kind::Float, "0.1"),
    k("t0", Kind::Float, "0"),
    k("x0", Kind::Float, "-1"),
    k("eta", Kind::Float, "1e-2"),
    k("t_max_tol", Kind::Float, "1e-10"),
    k("quad_order", Kind::Int, "16"),
    k("quad_panel_width", Kind::Float, "1"),
    k("quad_max_extent", Kind::Float, "1e7"),
    k("quad_domain", Kind::Text(DOMAINS), "unbounded"),
    k("richardson", Kind::Bool, "false"),
    k("allow_reverse", Kind::Bool, "false"),
    k("delta_rev", Kind::Float, "0"),
    k("flow.form", Kind::Text(FORMS), "sqrt"),
    k("flow.x", Kind::Vector, "0, 0"),
    k("flow.p", Kind::Vector, "1.25, 0.75"),
    k("flow.gauge", Kind::Vector, "0, 0"),
    k("flow.tau_span", Kind::Float, "10"),
    k("flow.steps", Kind::Int, "1000"),
    k("flow.rapidity", Kind::Float, "0.7"),
    k("action.velocity", Kind::Vector, "1.25, 0.75"),
    k("action.nodes", Kind::Int, "11"),
    k("action.h", Kind::Float, "0.1"),
    k("action.wiggle", Kind::Float, "0"),
    k("action.rapidity", Kind::Float, "0.7"),
    k("kernel.dx", Kind::Vector, "0.1, 0.05"),
    k("compose.pairs", Kind::Int, "8"),
    k("ft.eps_grid", Kind::List, "1e-3, 2e-3, 5e-3, 1e-2"),
    k("evolve.modes", Kind::Vector, "1, 1"),
    k("evolve.steps", Kind::Int, "1"),
    k("kg.p", Kind::Vector, "1.25, 0.75"),
    k("kg.grid_points", Kind::Int, "20"),
    k("kg.k_max", Kind::Float, "2"),
    k("kg.off_shell", Kind::Float, "0.1"),
    k("dirac.samples", Kind::Int, "1000"),
    k("dirac.p", Kind::Vector, "1.25, 0.75"),
    k("dirac.gauge", Kind::Vector, "0.1, 0.2"),
    k("loc.e1", Kind::Vector, "0.3, -0.5"),
    k("loc.e2", Kind::Vector, "0.3, 0.5"),
    k("loc.strength", Kind::Float, "0.05"),
    k("loc.weight", Kind::Float, "1"),
    k("cs.delta_rev_grid", Kind::List, "0, 0.05, 0.1, 0.125, 0.2, 0.25, 0.3"),
    k("nr.c_grid", Kind::List, "2, 4, 8"),
    k("nr.t_total", Kind::Float, "1"),
    k("nr.endpoints", Kind::List, "-1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75"),
    k("nr.n_slices", Kind::Int, "2"),
    k("nr.eta", Kind::Float, "0.2"),
    k("nr.dx", Kind::Float, "0.025"),
    k("nr.half_width", Kind::Float, "6"),
];

fn parse_value(spec: &KeySpec, raw: &str) -> Result<Setting, ConfigError> {
    let raw = raw.trim();
    let float = |s: &str| -> Result<f64, ConfigError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| ConfigError::at(spec.key, format!("`{s}` is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError::at(spec.key, "must be finite"))
        }
    };
    Ok(match spec.kind {
        Kind::Float => Setting::Float(float(raw)?),
        Kind::Int => Setting::Int(
            raw.parse()
                .map_err(|_| ConfigError::at(spec.key, format!("`{raw}` is not a non-negative integer")))?,
        ),
        Kind::Bool => Setting::Bool(match raw {
            "true" => true,
            "false" => false,
            _ => return Err(ConfigError::at(spec.key, "expected `true` or `false`")),
        }),
        Kind::List | Kind::Vector => {
            let inner = raw.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(raw);
            if inner.trim().is_empty() {
                return Err(ConfigError::at(spec.key, "list must not be empty"));
            }
            Setting::List(inner.split(',').map(float).collect::<Result<_, _>>()?)
        }
        Kind::Text(options) => {
            if !options.contains(&raw) {
                return Err(ConfigError::at(spec.key, format!("expected one of {options:?}")));
            }
            Setting::Text(raw.to_string())
        }
    })
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: Vec<Setting>,
    /// Notes recorded at load time, echoed into every report.
    pub warnings: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::parse("").expect("defaults are valid")
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        key: None,
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    RunConfig::parse(&text)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut given: Vec<Option<Setting>> = vec![None; SCHEMA.len()];
        for (n, line) in text.lines().enumerate() {
            let with_line = |mut e: ConfigError| {
                e.line = Some(n + 1);
                e
            };
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, raw) = body.split_once('=').ok_or_else(|| {
                with_line(ConfigError {
                    key: None,
                    line: None,
                    message: "expected `key = value`".into(),
                })
            })?;
            let key = key.trim();
            let pos = SCHEMA
                .iter()
                .position(|s| s.key == key)
                .ok_or_else(|| with_line(ConfigError::at(key, "unknown key")))?;
            if given[pos].is_some() {
                return Err(with_line(ConfigError::at(key, "given twice")));
            }
            given[pos] = Some(parse_value(&SCHEMA[pos], raw).map_err(with_line)?);
        }
        let mut values = Vec::with_capacity(SCHEMA.len());
        let mut explicit = Vec::with_capacity(SCHEMA.len());
        for (spec, g) in SCHEMA.iter().zip(given) {
            explicit.push(g.is_some());
            values.push(match g {
                Some(v) => v,
                None => parse_value(spec, spec.default).expect("schema defaults parse"),
            });
        }
        let mut cfg = Self {
            values,
            warnings: Vec::new(),
        };
        cfg.pad_default_vectors(&explicit);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides one key as if it had been written in the file.
    pub fn with(mut self, key: &str, raw: &str) -> Result<Self, ConfigError> {
        let pos = SCHEMA
            .iter()
            .position(|s| s.key == key)
            .ok_or_else(|| ConfigError::at(key, "unknown key"))?;
        self.values[pos] = parse_value(&SCHEMA[pos], raw)?;
        self.warnings.clear();
        self.validate()?;
        Ok(self)
    }

    fn pad_default_vectors(&mut self, explicit: &[bool]) {
        let d = self.usize("d");
        for (i, spec) in SCHEMA.iter().enumerate() {
            if spec.kind == Kind::Vector && !explicit[i] {
                if let Setting::List(v) = &mut self.values[i] {
                    v.resize(d + 1, 0.0);
                }
            }
        }
    }

    fn get(&self, key: &str) -> &Setting {
        let pos = SCHEMA
            .iter()
            .position(|s| s.key == key)
            .unwrap_or_else(|| panic!("unknown config key {key}"));
        &self.values[pos]
    }

    pub fn f64(&self, key: &str) -> f64 {
        match self.get(key) {
            Setting::Float(v) => *v,
            other => panic!("{key} is not a float: {other:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        match self.get(key) {
            Setting::Int(v) => *v,
            other => panic!("{key} is not an integer: {other:?}"),
        }
    }

    pub fn bool(&self, key: &str) -> bool {
        match self.get(key) {
            Setting::Bool(v) => *v,
            other => panic!("{key} is not a flag: {other:?}"),
        }
    }

    pub fn list(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Setting::List(v) => v,
            other => panic!("{key} is not a list: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Setting::Text(v) => v,
            other => panic!("{key} is not text: {other:?}"),
        }
    }

    pub fn vector(&self, key: &str) -> FourVector {
        FourVector::new(self.list(key)).expect("validated at load")
    }

    pub fn params(&self) -> crate::Result<KernelParams> {
        KernelParams::new(
            self.f64("m0"),
            self.f64("c"),
            self.f64("hbar"),
            self.f64("epsilon"),
            self.f64("eta"),
        )
    }

    pub fn spec(&self) -> crate::Result<DomainSpec> {
        DomainSpec::new(self.f64("c"), self.bool("allow_reverse"))
    }

    pub fn lattice(&self) -> crate::Result<SliceLattice> {
        let d = self.usize("d");
        let mut origin = vec![self.f64("x0"); d + 1];
        origin[0] = self.f64("c") * self.f64("t0");
        SliceLattice::new(
            self.usize("nt"),
            self.usize("nx"),
            self.f64("dt"),
            self.f64("dx"),
            self.f64("c"),
            FourVector::new(&origin)?,
        )
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            order: self.usize("quad_order"),
            panel_width: self.f64("quad_panel_width"),
            tail_tol: self.f64("t_max_tol"),
            max_extent: self.f64("quad_max_extent"),
            domain: match self.text("quad_domain") {
                "light-cone-ball" => SpatialDomain::LightConeBall,
                _ => SpatialDomain::Unbounded,
            },
            richardson: self.bool("richardson"),
        }
    }

    pub fn event(&self, key: &str) -> crate::Result<MeasurementEvent> {
        MeasurementEvent::new(self.vector(key), self.f64("loc.strength"), self.f64("loc.weight"))
    }

    pub fn nr(&self) -> NrCompareConfig {
        NrCompareConfig {
            c_grid: self.list("nr.c_grid").to_vec(),
            m0: self.f64("m0"),
            hbar: self.f64("hbar"),
            t_total: self.f64("nr.t_total"),
            endpoints: self.list("nr.endpoints").to_vec(),
            n_slices: self.usize("nr.n_slices"),
            eta: self.f64("nr.eta"),
            dx: self.f64("nr.dx"),
            half_width: self.f64("nr.half_width"),
        }
    }

    fn validate(&mut self) -> Result<(), ConfigError> {
        let d = self.usize("d");
        if d != 1 && d != 3 {
            return Err(ConfigError::at("d", "must be 1 or 3"));
        }
        for key in ["nt", "nx", "n_slices", "flow.steps", "evolve.steps", "compose.pairs", "kg.grid_points", "dirac.samples"] {
            if self.usize(key) == 0 {
                return Err(ConfigError::at(key, "must be at least 1"));
            }
        }
        if self.usize("action.nodes") < 3 {
            return Err(ConfigError::at("action.nodes", "must be at least 3"));
        }
        for key in ["flow.tau_span", "action.h", "kg.k_max", "kg.off_shell"] {
            if !(self.f64(key) > 0.0) {
                return Err(ConfigError::at(key, "must be > 0"));
            }
        }
        for key in ["delta_rev", "action.wiggle"] {
            if self.f64(key) < 0.0 {
                return Err(ConfigError::at(key, "must be ≥ 0"));
            }
        }
        for spec in SCHEMA.iter().filter(|s| s.kind == Kind::Vector) {
            if self.list(spec.key).len() != d + 1 {
                return Err(ConfigError::at(spec.key, format!("expected {} components for d = {d}", d + 1)));
            }
        }
        if self.list("ft.eps_grid").iter().any(|&e| !(e > 0.0)) {
            return Err(ConfigError::at("ft.eps_grid", "entries must be > 0"));
        }
        if self.list("cs.delta_rev_grid").iter().any(|&e| e < 0.0) {
            return Err(ConfigError::at("cs.delta_rev_grid", "entries must be ≥ 0"));
        }
        if self.list("evolve.modes").iter().any(|m| m.fract() != 0.0) {
            return Err(ConfigError::at("evolve.modes", "entries must be integers"));
        }

        // owning modules re-validate their own ranges
        KernelParams::new(self.f64("m0"), self.f64("c"), self.f64("hbar"), self.f64("epsilon"), 0.0)
            .map_err(ConfigError::from)?;
        if !(self.f64("eta").is_finite() && (0.0..1.0).contains(&self.f64("eta"))) {
            return Err(ConfigError::at("eta", "must lie in [0, 1)"));
        }
        self.params()?;
        self.spec()?;
        self.lattice()?;
        self.quad().validate()?;
        if !(self.f64("loc.strength").abs() <= crate::locality::MAX_STRENGTH) {
            return Err(ConfigError::at(
                "loc.strength",
                format!("|strength| must not exceed {}", crate::locality::MAX_STRENGTH),
            ));
        }
        self.event("loc.e1")?;
        self.event("loc.e2")?;
        self.nr().validate()?;

        if self.f64("eta") == 0.0 {
            self.warnings
                .push("eta = 0: the Fresnel checks (ft-check, st-check) will not converge".into());
        }
        Ok(())
    }

    /// The resolved configuration as an ordered JSON object.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (spec, v) in SCHEMA.iter().zip(&self.values) {
            let j = match v {
                Setting::Float(x) => json_f64(*x),
                Setting::Int(n) => Value::from(*n as u64),
                Setting::Bool(b) => Value::Bool(*b),
                Setting::List(xs) => json_list(xs),
                Setting::Text(s) => Value::String(s.clone()),
            };
            m.insert(spec.key.to_string(), j);
        }
        Value::Object(m)
    }

    /// Every recognised key with its default, for `--help`-style listings.
    pub fn documented_keys() -> impl Iterator<Item = (&'static str, &'static str)> {
        SCHEMA.iter().map(|s| (s.key, s.default))
    }
}
