//! Run configurations: strict JSON parsing, defaults and validation.

use std::f64::consts::PI;
use std::fmt;

use ccch_core::dynamics::{Formulation, PdeParams};
use ccch_core::experiments::{ConservationParams, HoelderParams, NonuniformParams};
use ccch_core::norms::NormRequest;
use ccch_core::peakon::Domain;
use ccch_core::spectral::GridSpec;
use clap::ValueEnum;
use serde::de::{self, DeserializeOwned, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("config error at `{path}`: {msg}")]
    Field { path: String, msg: String },
    #[error("config error: {0}")]
    Invalid(String),
}

fn field_err(path: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn core_err(e: ccch_core::Error) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Peakon,
    Norms,
    ExpNonuniform,
    ExpHoelder,
    ExpConservation,
    CheckPeakon,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Peakon => "peakon",
            Command::Norms => "norms",
            Command::ExpNonuniform => "exp-nonuniform",
            Command::ExpHoelder => "exp-hoelder",
            Command::ExpConservation => "exp-conservation",
            Command::CheckPeakon => "check-peakon",
        }
    }

    fn parse_name(s: &str) -> Option<Self> {
        Command::value_variants()
            .iter()
            .copied()
            .find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// JSON value that rejects duplicate object keys.
struct Strict(Value);

impl<'de> Deserialize<'de> for Strict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(StrictVisitor).map(Strict)
    }
}

struct StrictVisitor;

impl<'de> Visitor<'de> for StrictVisitor {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a JSON value")
    }

    fn visit_bool<E>(self, v: bool) -> Result<Value, E> {
        Ok(Value::Bool(v))
    }

    fn visit_i64<E>(self, v: i64) -> Result<Value, E> {
        Ok(Value::from(v))
    }

    fn visit_u64<E>(self, v: u64) -> Result<Value, E> {
        Ok(Value::from(v))
    }

    fn visit_f64<E>(self, v: f64) -> Result<Value, E> {
        Ok(Value::from(v))
    }

    fn visit_str<E>(self, v: &str) -> Result<Value, E> {
        Ok(Value::String(v.to_string()))
    }

    fn visit_string<E>(self, v: String) -> Result<Value, E> {
        Ok(Value::String(v))
    }

    fn visit_unit<E>(self) -> Result<Value, E> {
        Ok(Value::Null)
    }

    fn visit_none<E>(self) -> Result<Value, E> {
        Ok(Value::Null)
    }

    fn visit_some<D: Deserializer<'de>>(self, d: D) -> Result<Value, D::Error> {
        Strict::deserialize(d).map(|s| s.0)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
        let mut out = Vec::new();
        while let Some(Strict(v)) = seq.next_element()? {
            out.push(v);
        }
        Ok(Value::Array(out))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Value, A::Error> {
        let mut out = Map::new();
        while let Some(k) = map.next_key::<String>()? {
            if out.contains_key(&k) {
                return Err(de::Error::custom(format!("duplicate key `{k}`")));
            }
            let Strict(v) = map.next_value()?;
            out.insert(k, v);
        }
        Ok(Value::Object(out))
    }
}

fn default_n() -> usize {
    1024
}
fn default_length() -> f64 {
    2.0 * PI
}
fn default_dt() -> f64 {
    1e-3
}
fn default_cfl() -> f64 {
    0.5
}
fn default_s() -> f64 {
    3.0
}
fn default_monitor() -> usize {
    10
}
fn default_ceiling() -> f64 {
    1e8
}
fn default_modes() -> usize {
    8
}
fn default_amplitude() -> f64 {
    0.5
}
fn default_one() -> f64 {
    1.0
}

/// Initial datum or sampled field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// Random smooth field seeded by the run seed.
    Random {
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// `Σ a cos(2πjx/L) + b sin(2πjx/L)` from triples `[j, a, b]`.
    Fourier {
        #[serde(default)]
        u: Vec<[f64; 3]>,
        #[serde(default)]
        v: Vec<[f64; 3]>,
    },
    /// `A e^{-|x - x0|}` in both components (line box).
    Peakon {
        #[serde(default = "default_one")]
        amplitude: f64,
        x0: Option<f64>,
    },
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Random {
            modes: default_modes(),
            amplitude: default_amplitude(),
        }
    }
}

impl FieldSpec {
    fn validate(&self, path: &str, n: usize, length: f64) -> Result<(), ConfigError> {
        match self {
            FieldSpec::Random { modes, amplitude } => {
                if *modes == 0 || 2 * modes >= n {
                    return Err(field_err(&format!("{path}.modes"), "must lie in 1..n/2"));
                }
                if !(*amplitude >= 0.0 && amplitude.is_finite()) {
                    return Err(field_err(&format!("{path}.amplitude"), "must be non-negative"));
                }
            }
            FieldSpec::Fourier { u, v } => {
                for (name, list) in [("u", u), ("v", v)] {
                    for (i, t) in list.iter().enumerate() {
                        let j = t[0];
                        if !(j >= 0.0 && j.fract() == 0.0 && 2.0 * j < n as f64) || !t.iter().all(|x| x.is_finite()) {
                            return Err(field_err(
                                &format!("{path}.{name}[{i}]"),
                                "mode index must be an integer in [0, n/2) and amplitudes finite",
                            ));
                        }
                    }
                }
            }
            FieldSpec::Peakon { amplitude, x0 } => {
                if !amplitude.is_finite() {
                    return Err(field_err(&format!("{path}.amplitude"), "must be finite"));
                }
                if let Some(x) = x0 {
                    if !(*x >= 0.0 && *x < length) {
                        return Err(field_err(&format!("{path}.x0"), "must lie in [0, length)"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    pub t_final: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Defaults to `max(p, q) + 1`.
    #[serde(default)]
    pub dealias_degree: Option<usize>,
    #[serde(default = "default_monitor")]
    pub monitor_every: usize,
    #[serde(default)]
    pub formulation: Formulation,
    /// Sobolev index of the monitored norms.
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_ceiling")]
    pub blowup_ceiling: f64,
    #[serde(default)]
    pub initial: FieldSpec,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakonConfig {
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_domain")]
    pub domain: Domain,
    /// Speed of a single travelling peakon pair; alternative to `f, g, h, k`.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub f: Option<Vec<f64>>,
    #[serde(default)]
    pub g: Option<Vec<f64>>,
    #[serde(default)]
    pub h: Option<Vec<f64>>,
    #[serde(default)]
    pub k: Option<Vec<f64>>,
    /// Write every `record_every`-th step to the trace.
    #[serde(default = "default_record")]
    pub record_every: usize,
}

fn default_domain() -> Domain {
    Domain::Line
}
fn default_record() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(default = "default_requests")]
    pub norms: Vec<NormRequest>,
    #[serde(default)]
    pub seed: u64,
}

fn default_requests() -> Vec<NormRequest> {
    vec![
        NormRequest::Sobolev { s: 0.0 },
        NormRequest::Sobolev { s: 1.0 },
        NormRequest::Sobolev { s: 3.0 },
        NormRequest::Sup,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckPeakonConfig {
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(default = "default_domain")]
    pub domain: Domain,
    #[serde(default)]
    pub x0: f64,
    /// Multiplies both exact amplitudes; anything but 1 breaks the solution.
    #[serde(default = "default_one")]
    pub amplitude_scale: f64,
    #[serde(default = "default_one")]
    pub t_final: f64,
    #[serde(default = "default_check_dt")]
    pub dt: f64,
}

fn default_check_dt() -> f64 {
    1e-2
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunConfig {
    Simulate(SimulateConfig),
    Peakon(PeakonConfig),
    Norms(NormsConfig),
    ExpNonuniform(NonuniformParams),
    ExpHoelder(HoelderParams),
    ExpConservation(ConservationParams),
    CheckPeakon(CheckPeakonConfig),
}

fn typed<T: DeserializeOwned>(v: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        field_err(&path, e.into_inner().to_string())
    })
}

fn check_exponents(p: u32, q: u32) -> Result<(), ConfigError> {
    if p < 1 {
        return Err(field_err("p", "p must be ≥ 1"));
    }
    if q < 1 {
        return Err(field_err("q", "q must be ≥ 1"));
    }
    Ok(())
}

fn positive(path: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(field_err(path, format!("must be positive and finite, got {x}")))
    }
}

fn finite(path: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(field_err(path, "must be finite"))
    }
}

fn check_grid(n: usize, length: f64) -> Result<(), ConfigError> {
    positive("length", length)?;
    GridSpec::new(n, length)
        .map(|_| ())
        .map_err(|e| field_err("n", e.to_string()))
}

/// Parse a configuration document. The command comes from the command line
/// or, failing that, from a `"command"` key; when both are given they must
/// agree. Unknown and duplicate keys are rejected, defaults are filled and
/// constraints checked.
pub fn parse_config(text: &str, command: Option<Command>) -> Result<RunConfig, ConfigError> {
    let Strict(doc) = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let Value::Object(mut obj) = doc else {
        return Err(ConfigError::Invalid("configuration must be a JSON object".into()));
    };
    let named = match obj.remove("command") {
        None => None,
        Some(Value::String(s)) => Some(
            Command::parse_name(&s)
                .ok_or_else(|| field_err("command", format!("unknown command `{s}`")))?,
        ),
        Some(_) => return Err(field_err("command", "must be a string")),
    };
    let cmd = match (command, named) {
        (Some(a), Some(b)) if a != b => {
            return Err(field_err(
                "command",
                format!("config is for `{b}` but `{a}` was requested"),
            ))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(field_err("command", "missing")),
    };
    let v = Value::Object(obj);
    let cfg = match cmd {
        Command::Simulate => RunConfig::Simulate(typed(v)?),
        Command::Peakon => RunConfig::Peakon(typed(v)?),
        Command::Norms => RunConfig::Norms(typed(v)?),
        Command::ExpNonuniform => RunConfig::ExpNonuniform(typed(v)?),
        Command::ExpHoelder => RunConfig::ExpHoelder(typed(v)?),
        Command::ExpConservation => RunConfig::ExpConservation(typed(v)?),
        Command::CheckPeakon => RunConfig::CheckPeakon(typed(v)?),
    };
    cfg.resolve()
}

impl RunConfig {
    pub fn command(&self) -> Command {
        match self {
            RunConfig::Simulate(_) => Command::Simulate,
            RunConfig::Peakon(_) => Command::Peakon,
            RunConfig::Norms(_) => Command::Norms,
            RunConfig::ExpNonuniform(_) => Command::ExpNonuniform,
            RunConfig::ExpHoelder(_) => Command::ExpHoelder,
            RunConfig::ExpConservation(_) => Command::ExpConservation,
            RunConfig::CheckPeakon(_) => Command::CheckPeakon,
        }
    }

    /// Fill derived defaults and check constraints.
    fn resolve(mut self) -> Result<Self, ConfigError> {
        match &mut self {
            RunConfig::Simulate(c) => {
                check_exponents(c.p, c.q)?;
                finite("a", c.a)?;
                finite("b", c.b)?;
                check_grid(c.n, c.length)?;
                positive("t_final", c.t_final)?;
                positive("dt", c.dt)?;
                positive("cfl", c.cfl)?;
                positive("blowup_ceiling", c.blowup_ceiling)?;
                finite("s", c.s)?;
                if c.monitor_every == 0 {
                    return Err(field_err("monitor_every", "must be at least 1"));
                }
                let kappa = c.p.max(c.q) as usize;
                let deg = *c.dealias_degree.get_or_insert(kappa + 1);
                if deg < 2 {
                    return Err(field_err("dealias_degree", "must be at least 2"));
                }
                c.initial.validate("initial", c.n, c.length)?;
            }
            RunConfig::Peakon(c) => {
                check_exponents(c.p, c.q)?;
                finite("a", c.a)?;
                finite("b", c.b)?;
                positive("t_final", c.t_final)?;
                positive("dt", c.dt)?;
                finite("x0", c.x0)?;
                if c.record_every == 0 {
                    return Err(field_err("record_every", "must be at least 1"));
                }
                let explicit = [&c.f, &c.g, &c.h, &c.k];
                match (c.c, explicit.iter().all(|x| x.is_some()), explicit.iter().any(|x| x.is_some())) {
                    (Some(_), _, true) => {
                        return Err(field_err("c", "give either c or all of f, g, h, k, not both"))
                    }
                    (Some(speed), _, false) => positive("c", speed)?,
                    (None, true, _) => {}
                    (None, _, _) => {
                        return Err(field_err("c", "give either c or all of f, g, h, k"))
                    }
                }
            }
            RunConfig::Norms(c) => {
                check_grid(c.n, c.length)?;
                c.field.validate("field", c.n, c.length)?;
                if c.norms.is_empty() {
                    return Err(field_err("norms", "must not be empty"));
                }
            }
            RunConfig::ExpNonuniform(c) => {
                check_exponents(c.p, c.q)?;
                c.validate().map_err(core_err)?;
            }
            RunConfig::ExpHoelder(c) => {
                check_exponents(c.p, c.q)?;
                c.validate().map_err(core_err)?;
            }
            RunConfig::ExpConservation(c) => {
                check_exponents(c.p, c.q)?;
                c.validate().map_err(core_err)?;
            }
            RunConfig::CheckPeakon(c) => {
                check_exponents(c.p, c.q)?;
                PdeParams::new(c.p, c.q, c.a, c.b).map_err(core_err)?;
                positive("c", c.c)?;
                positive("t_final", c.t_final)?;
                positive("dt", c.dt)?;
                finite("x0", c.x0)?;
                finite("amplitude_scale", c.amplitude_scale)?;
            }
        }
        Ok(self)
    }

    /// Seed of the run, if the command uses one.
    pub fn seed(&self) -> Option<u64> {
        match self {
            RunConfig::Simulate(c) => Some(c.seed),
            RunConfig::Norms(c) => Some(c.seed),
            RunConfig::ExpHoelder(c) => Some(c.seed),
            RunConfig::ExpConservation(c) => Some(c.seed),
            _ => None,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            RunConfig::Simulate(c) => c.seed = seed,
            RunConfig::Norms(c) => c.seed = seed,
            RunConfig::ExpHoelder(c) => c.seed = seed,
            RunConfig::ExpConservation(c) => c.seed = seed,
            _ => {}
        }
    }

    /// The resolved configuration with every default spelled out, tagged
    /// with its command. Parsing it again gives the same configuration.
    pub fn echo(&self) -> Value {
        let body = match self {
            RunConfig::Simulate(c) => serde_json::to_value(c),
            RunConfig::Peakon(c) => serde_json::to_value(c),
            RunConfig::Norms(c) => serde_json::to_value(c),
            RunConfig::ExpNonuniform(c) => serde_json::to_value(c),
            RunConfig::ExpHoelder(c) => serde_json::to_value(c),
            RunConfig::ExpConservation(c) => serde_json::to_value(c),
            RunConfig::CheckPeakon(c) => serde_json::to_value(c),
        }
        .expect("configurations serialise");
        let mut obj = Map::new();
        obj.insert("command".into(), Value::String(self.command().name().into()));
        if let Value::Object(m) = body {
            obj.extend(m);
        }
        Value::Object(obj)
    }
}
