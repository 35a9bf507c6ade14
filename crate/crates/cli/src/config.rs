//! Flat `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; lists are comma separated
//! and may be wrapped in brackets (`v_schedule = [1000, 10000]`). Keys are
//! case sensitive and may appear at most once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use stargraph::BondFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Entropy,
    SemiclassicalScan,
    GroundState,
    Symmetry,
    MellinCheck,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spectrum,
        Command::Entropy,
        Command::SemiclassicalScan,
        Command::GroundState,
        Command::Symmetry,
        Command::MellinCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Entropy => "entropy",
            Command::SemiclassicalScan => "semiclassical_scan",
            Command::GroundState => "ground_state",
            Command::Symmetry => "symmetry",
            Command::MellinCheck => "mellin_check",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

/// How `ε` is chosen for single-graph commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonRule {
    Fixed(f64),
    /// `ε = v^{−a}`.
    Power(f64),
}

/// Moment sums used by `semiclassical_scan`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    /// `Σ_j |σ + ℓ_j − ℓ_i|^{−2q}` on the renormalized cluster.
    Renormalized,
    /// Exact sums at the first eigenvalue of the cluster window.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: BondFamily<f64>,
    pub v: usize,
    pub v_schedule: Vec<usize>,
    pub base_length: f64,
    pub epsilon: EpsilonRule,
    /// Overrides of the semiclassical schedule `v = m^p`, `ε = v^{−a}`.
    pub v_power: Option<f64>,
    pub epsilon_exponent: Option<f64>,
    pub coupling_inverse: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub q: Vec<f64>,
    pub sigma: f64,
    pub sigma0: Vec<f64>,
    pub base_index: usize,
    pub s: Vec<f64>,
    pub tol: f64,
    pub moments: MomentSource,
    pub out: PathBuf,
    /// Every recognised key with its effective value, for the manifest.
    pub echo: Vec<(String, String)>,
}

const KEYS: &[(&str, &str)] = &[
    ("command", "spectrum"),
    ("family", "power_law"),
    ("n", "3"),
    ("delta", "0.5"),
    ("D", "1"),
    ("v", "20"),
    ("v_schedule", "1000, 10000, 100000"),
    ("L", "1"),
    ("epsilon", ""),
    ("epsilon_exponent", ""),
    ("v_power", ""),
    ("coupling_inverse", "0"),
    ("k_min", "0"),
    ("k_max", "20"),
    ("q", "2"),
    ("sigma", "0.3"),
    ("sigma0", "1e-3, 1e-6, 1e-9"),
    ("base_index", "0"),
    ("s", "2, 4"),
    ("tol", "1e-10"),
    ("moments", "renormalized"),
    ("out", "out"),
];

const DEFAULT_EPSILON: f64 = 0.01;

/// Raw assignments with the line they came from (`None` for overrides).
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Option<usize>)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError {
                line: Some(lineno),
                field: body.to_string(),
                message: "expected 'key = value'".into(),
            })?;
            let key = key.trim();
            if raw.entries.contains_key(key) {
                return Err(ConfigError {
                    line: Some(lineno),
                    field: key.to_string(),
                    message: "duplicate key".into(),
                });
            }
            raw.insert(key, value.trim(), Some(lineno))?;
        }
        Ok(raw)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError {
                line,
                field: key.to_string(),
                message: "unknown key".into(),
            });
        }
        self.entries.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    /// Applies a `key=value` override, replacing any file value.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError {
            line: None,
            field: assignment.to_string(),
            message: "expected key=value".into(),
        })?;
        self.insert(key.trim(), value.trim(), None)
    }

    fn get(&self, key: &str) -> (String, Option<usize>) {
        match self.entries.get(key) {
            Some((v, line)) => (v.clone(), *line),
            None => {
                let default = KEYS.iter().find(|(k, _)| *k == key).map(|(_, d)| *d).unwrap_or("");
                (default.to_string(), None)
            }
        }
    }

    fn is_set(&self, key: &str) -> bool {
        self.entries.get(key).is_some_and(|(v, _)| !v.is_empty())
    }
}

fn err(line: Option<usize>, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn scalar<T: FromStr>(raw: &RawConfig, key: &str) -> Result<T, ConfigError> {
    let (text, line) = raw.get(key);
    text.parse()
        .map_err(|_| err(line, key, format!("cannot parse '{text}'")))
}

fn list<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Vec<T>, ConfigError> {
    let (text, line) = raw.get(key);
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| err(line, key, format!("cannot parse list item '{t}'"))))
        .collect()
}

fn check(cond: bool, raw: &RawConfig, key: &str, message: impl Into<String>) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(err(raw.get(key).1, key, message))
    }
}

/// Integer schedule entries may be written as `1e5`.
fn count_list(raw: &RawConfig, key: &str) -> Result<Vec<usize>, ConfigError> {
    let values: Vec<f64> = list(raw, key)?;
    let line = raw.get(key).1;
    values
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x < 1e15 {
                Ok(x as usize)
            } else {
                Err(err(line, key, format!("{x} is not a positive integer")))
            }
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    build(&RawConfig::parse(text)?)
}

pub fn build(raw: &RawConfig) -> Result<RunConfig, ConfigError> {
    let command: Command = {
        let (text, line) = raw.get("command");
        text.parse().map_err(|m: String| err(line, "command", m))?
    };
    let family = match raw.get("family").0.as_str() {
        "power_law" => {
            let n: u32 = scalar(raw, "n")?;
            check(n >= 1, raw, "n", "must be >= 1")?;
            BondFamily::PowerLaw { n }
        }
        "shifted_power" => {
            let delta: f64 = scalar(raw, "delta")?;
            check(delta > 0.0 && delta.is_finite(), raw, "delta", "must be positive")?;
            BondFamily::ShiftedPower { delta }
        }
        "integer" => BondFamily::Integer,
        "lattice" => {
            let d: f64 = scalar(raw, "D")?;
            check(d > 0.0 && d.is_finite(), raw, "D", "must be positive")?;
            BondFamily::LatticeNorms { d }
        }
        other => {
            return Err(err(
                raw.get("family").1,
                "family",
                format!("unknown family '{other}' (power_law, shifted_power, integer, lattice)"),
            ))
        }
    };
    let v: usize = scalar(raw, "v")?;
    check(v >= 1, raw, "v", "must be >= 1")?;
    let v_schedule = count_list(raw, "v_schedule")?;
    check(!v_schedule.is_empty(), raw, "v_schedule", "must not be empty")?;
    check(
        v_schedule.windows(2).all(|w| w[0] <= w[1]),
        raw,
        "v_schedule",
        "must be nondecreasing",
    )?;
    let base_length: f64 = scalar(raw, "L")?;
    check(base_length > 0.0 && base_length.is_finite(), raw, "L", "must be positive")?;

    let epsilon_exponent = if raw.is_set("epsilon_exponent") {
        let a: f64 = scalar(raw, "epsilon_exponent")?;
        check(a > 0.0 && a.is_finite(), raw, "epsilon_exponent", "must be positive")?;
        Some(a)
    } else {
        None
    };
    let epsilon = if raw.is_set("epsilon") {
        check(
            epsilon_exponent.is_none(),
            raw,
            "epsilon",
            "set either epsilon or epsilon_exponent, not both",
        )?;
        let e: f64 = scalar(raw, "epsilon")?;
        check(e >= 0.0 && e.is_finite(), raw, "epsilon", "must be nonnegative")?;
        EpsilonRule::Fixed(e)
    } else if let Some(a) = epsilon_exponent {
        EpsilonRule::Power(a)
    } else {
        EpsilonRule::Fixed(DEFAULT_EPSILON)
    };
    if command == Command::SemiclassicalScan {
        check(
            !raw.is_set("epsilon"),
            raw,
            "epsilon",
            "semiclassical_scan couples epsilon to v; use epsilon_exponent",
        )?;
    }
    let v_power = if raw.is_set("v_power") {
        let p: f64 = scalar(raw, "v_power")?;
        check(p > 0.0 && p.is_finite(), raw, "v_power", "must be positive")?;
        Some(p)
    } else {
        None
    };

    let coupling_inverse: f64 = scalar(raw, "coupling_inverse")?;
    check(coupling_inverse.is_finite(), raw, "coupling_inverse", "must be finite")?;
    let k_min: f64 = scalar(raw, "k_min")?;
    let k_max: f64 = scalar(raw, "k_max")?;
    check(k_min >= 0.0 && k_min.is_finite(), raw, "k_min", "must be nonnegative")?;
    check(k_max > k_min && k_max.is_finite(), raw, "k_max", "must exceed k_min")?;

    let q: Vec<f64> = list(raw, "q")?;
    check(!q.is_empty(), raw, "q", "must not be empty")?;
    check(q.iter().all(|&x| x > 0.0 && x.is_finite()), raw, "q", "entries must be positive")?;
    if matches!(command, Command::SemiclassicalScan | Command::GroundState) {
        check(
            q.iter().all(|&x| x != 1.0),
            raw,
            "q",
            "moment entropies are singular at q = 1",
        )?;
    }
    if command == Command::Symmetry {
        check(
            q.iter().all(|&x| (0.25..0.5).contains(&x)),
            raw,
            "q",
            "symmetry needs 1/4 <= q < 1/2",
        )?;
    }
    let sigma: f64 = scalar(raw, "sigma")?;
    check(sigma.is_finite(), raw, "sigma", "must be finite")?;
    let sigma0: Vec<f64> = list(raw, "sigma0")?;
    check(
        !sigma0.is_empty() && sigma0.iter().all(|&x| x > 0.0 && x.is_finite()),
        raw,
        "sigma0",
        "needs positive entries",
    )?;
    let base_index: usize = scalar(raw, "base_index")?;
    let s: Vec<f64> = list(raw, "s")?;
    check(
        !s.is_empty() && s.iter().all(|&x| x.is_finite()),
        raw,
        "s",
        "needs finite entries",
    )?;
    let tol: f64 = scalar(raw, "tol")?;
    check(tol > 0.0 && tol < 1.0, raw, "tol", "must lie in (0, 1)")?;
    let moments = match raw.get("moments").0.as_str() {
        "renormalized" => MomentSource::Renormalized,
        "exact" => MomentSource::Exact,
        other => {
            return Err(err(
                raw.get("moments").1,
                "moments",
                format!("unknown moment source '{other}' (renormalized, exact)"),
            ))
        }
    };
    let out = PathBuf::from(raw.get("out").0);
    check(!out.as_os_str().is_empty(), raw, "out", "must not be empty")?;

    let echo = KEYS
        .iter()
        .map(|(k, _)| (k.to_string(), raw.get(k).0))
        .collect();
    Ok(RunConfig {
        command,
        family,
        v,
        v_schedule,
        base_length,
        epsilon,
        v_power,
        epsilon_exponent,
        coupling_inverse,
        k_min,
        k_max,
        q,
        sigma,
        sigma0,
        base_index,
        s,
        tol,
        moments,
        out,
        echo,
    })
}

impl RunConfig {
    pub fn epsilon_for(&self, v: usize) -> f64 {
        match self.epsilon {
            EpsilonRule::Fixed(e) => e,
            EpsilonRule::Power(a) => (v as f64).powf(-a),
        }
    }
}
