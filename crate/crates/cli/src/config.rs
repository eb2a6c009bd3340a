use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{violation, CliError, CliResult};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// One experiment: a command, its parameters, and the run controls.
/// After [`ExperimentConfig::validated`] the parameter map holds every
/// default explicitly, so the echo in a report is enough to re-run it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plot: Option<String>,
}

const RESERVED: [&str; 7] = ["command", "params", "seed", "budget", "out", "csv", "plot"];

impl ExperimentConfig {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            params: BTreeMap::new(),
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            out: None,
            csv: None,
            plot: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Reads a config object. Parameters may sit at the top level, as in
    /// `{"command": "gamma-hilbert", "n": 2, "m": 4}`, or inside `params`.
    pub fn from_json_str(text: &str) -> CliResult<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| violation("$", e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| violation("$", "expected an object"))?;
        let command = match obj.get("command") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(violation("$.command", "expected a string")),
            None => return Err(violation("$.command", "missing field")),
        };
        let mut config = Self::new(command);
        config.seed = read_u64(obj, "seed")?.unwrap_or(DEFAULT_SEED);
        config.budget = read_u64(obj, "budget")?.unwrap_or(DEFAULT_BUDGET);
        config.out = read_string(obj, "out")?;
        config.csv = read_string(obj, "csv")?;
        config.plot = read_string(obj, "plot")?;
        match obj.get("params") {
            None => {}
            Some(Value::Object(inner)) => {
                for (k, v) in inner {
                    config.params.insert(k.clone(), v.clone());
                }
            }
            Some(_) => return Err(violation("$.params", "expected an object")),
        }
        for (k, v) in obj {
            if !RESERVED.contains(&k.as_str()) {
                config.params.insert(k.clone(), v.clone());
            }
        }
        Ok(config)
    }

    /// Checks the parameters against the command's schema and fills in
    /// defaults, with numbers in canonical form.
    pub fn validated(&self) -> CliResult<Self> {
        let schema = schema(&self.command).ok_or_else(|| CliError::UnknownCommand(self.command.clone()))?;
        for key in self.params.keys() {
            if !schema.iter().any(|p| p.key == key) {
                return Err(violation(format!("$.{key}"), "unknown parameter for this command"));
            }
        }
        let mut params = BTreeMap::new();
        for spec in schema {
            let path = format!("$.{}", spec.key);
            let value = match (self.params.get(spec.key), &spec.default) {
                (Some(v), _) => spec.kind.canonical(v, &path)?,
                (None, Fallback::Required) => return Err(violation(path, "missing required parameter")),
                (None, Fallback::Absent) => continue,
                (None, Fallback::Value(v)) => v(),
            };
            params.insert(spec.key.to_string(), value);
        }
        Ok(Self { params, ..self.clone() })
    }
}

fn read_u64(obj: &Map<String, Value>, key: &str) -> CliResult<Option<u64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v.as_u64().map(Some).ok_or_else(|| violation(format!("$.{key}"), "expected a nonnegative integer")),
    }
}

fn read_string(obj: &Map<String, Value>, key: &str) -> CliResult<Option<String>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(violation(format!("$.{key}"), "expected a string")),
    }
}

/// Turns a command-line value into a JSON scalar: integers and reals become
/// numbers, anything else stays a string.
pub fn parse_scalar(text: &str) -> Value {
    if let Ok(u) = text.parse::<u64>() {
        return Value::from(u);
    }
    if let Ok(i) = text.parse::<i64>() {
        return Value::from(i);
    }
    match text.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::from(text),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    /// Integer `>= 1`.
    Count,
    /// Integer `>= 0`.
    Index,
    /// Even integer `>= 2`.
    Even,
    /// Real number, or `inf`.
    Real,
    Choice(&'static [&'static str]),
    /// Free text such as a file path or a norm spec.
    Text,
}

impl Kind {
    fn canonical(&self, v: &Value, path: &str) -> CliResult<Value> {
        let int = || v.as_u64().ok_or_else(|| violation(path, "expected a nonnegative integer"));
        match self {
            Kind::Index => Ok(Value::from(int()?)),
            Kind::Count => match int()? {
                0 => Err(violation(path, "must be at least 1")),
                u => Ok(Value::from(u)),
            },
            Kind::Even => match int()? {
                u if u == 0 || u % 2 != 0 => Err(violation(path, format!("must be even and positive, got {u}"))),
                u => Ok(Value::from(u)),
            },
            Kind::Real => match v {
                Value::Number(n) => Ok(Value::from(n.as_f64().expect("json numbers are finite"))),
                Value::String(s) if s == "inf" => Ok(Value::from("inf")),
                _ => Err(violation(path, "expected a number or \"inf\"")),
            },
            Kind::Choice(options) => match v.as_str() {
                Some(s) if options.contains(&s) => Ok(Value::from(s)),
                _ => Err(violation(path, format!("expected one of {}", options.join(", ")))),
            },
            Kind::Text => v.as_str().map(Value::from).ok_or_else(|| violation(path, "expected a string")),
        }
    }
}

pub enum Fallback {
    Required,
    Absent,
    Value(fn() -> Value),
}

pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Fallback,
}

const fn req(key: &'static str, kind: Kind) -> ParamSpec {
    ParamSpec { key, kind, default: Fallback::Required }
}

const fn opt(key: &'static str, kind: Kind) -> ParamSpec {
    ParamSpec { key, kind, default: Fallback::Absent }
}

const fn def(key: &'static str, kind: Kind, value: fn() -> Value) -> ParamSpec {
    ParamSpec { key, kind, default: Fallback::Value(value) }
}

pub const SUITES: [&str; 5] = ["harmonic", "smoothing", "cotype", "embeddings", "all"];
pub const EMBED_KINDS: [&str; 3] = ["frechet", "sparse", "grid-torus"];
pub const BOUNDS: [&str; 2] = ["lemma-6-3", "lemma-6-7"];
pub const PLOTS: [&str; 2] = ["gamma-vs-m", "distortion-vs-n"];

pub const COMMANDS: [&str; 11] = [
    "gamma-hilbert",
    "gamma-search",
    "gamma-exhaustive",
    "bq",
    "mod-check",
    "verify",
    "embed",
    "extract-grid",
    "moduli-check",
    "bounds",
    "plot",
];

fn two() -> Value {
    Value::from(2.0)
}

/// Accepted parameters of each command.
pub fn schema(command: &str) -> Option<Vec<ParamSpec>> {
    use Kind::*;
    let p = || def("p", Real, two);
    let q = || def("q", Real, two);
    Some(match command {
        "gamma-hilbert" => vec![req("n", Count), req("m", Even)],
        "gamma-search" => vec![req("n", Count), req("m", Even), p(), q(), req("space", Text)],
        "gamma-exhaustive" => vec![req("n", Count), req("m", Even), p(), q()],
        "bq" => vec![req("n", Count), req("m", Even), req("ell", Even), opt("space", Text)],
        "mod-check" => vec![
            req("n", Count),
            req("m", Even),
            def("a", Index, || Value::from(1)),
            def("r", Index, || Value::from(2)),
            def("trials", Count, || Value::from(100)),
            opt("space", Text),
        ],
        "verify" => vec![
            req("suite", Choice(&SUITES)),
            def("trials", Count, || Value::from(100)),
            def("norm", Text, || Value::from("lp:2:2")),
        ],
        "embed" => vec![
            req("kind", Choice(&EMBED_KINDS)),
            req("m", Count),
            def("n", Count, || Value::from(1)),
            def("eps", Real, || Value::from(0.25)),
        ],
        "extract-grid" => vec![req("n", Count), req("m", Even), opt("s", Count), def("alpha", Real, || Value::from(1.0))],
        "moduli-check" => vec![
            req("n", Count),
            req("m", Even),
            p(),
            q(),
            def("r", Real, two),
            def("s", Real, || Value::from(1.0)),
            def("trials", Count, || Value::from(10)),
            opt("space", Text),
        ],
        "bounds" => vec![
            req("which", Choice(&BOUNDS)),
            req("n", Real),
            opt("n0", Real),
            opt("ell0", Real),
            opt("q", Real),
            opt("k", Real),
        ],
        "plot" => vec![
            req("kind", Choice(&PLOTS)),
            opt("n", Count),
            opt("m", Even),
            def("n_max", Count, || Value::from(8)),
            def("m_max", Even, || Value::from(32)),
        ],
        _ => return None,
    })
}

/// Typed access to a validated parameter map.
pub struct Params<'a>(pub &'a BTreeMap<String, Value>);

impl Params<'_> {
    pub fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn usize(&self, key: &str) -> usize {
        self.0[key].as_u64().expect("validated integer") as usize
    }

    pub fn opt_usize(&self, key: &str) -> Option<usize> {
        self.has(key).then(|| self.usize(key))
    }

    pub fn f64(&self, key: &str) -> f64 {
        match &self.0[key] {
            Value::String(_) => f64::INFINITY,
            v => v.as_f64().expect("validated number"),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Option<f64> {
        self.has(key).then(|| self.f64(key))
    }

    pub fn str(&self, key: &str) -> &str {
        self.0[key].as_str().expect("validated string")
    }

    pub fn opt_str(&self, key: &str) -> Option<&str> {
        self.0.get(key).and_then(Value::as_str)
    }
}
