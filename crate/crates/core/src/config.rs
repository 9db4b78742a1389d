//! Run configuration and its `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! resolution = 32          # or 32,32,64
//! box_size = 6.283185307179586
//! nu = 0.05
//! dt = 1e-3
//! t_end = 1.0
//! scheme = rk4-integrating-factor
//! dealias = true
//! initial.kind = random-band   # taylor-green | random-band | file
//! initial.band = 4
//! initial.amplitude = 1.0
//! initial.seed = 7
//! initial.path = start.sdns    # required for initial.kind = file
//! output.dir = out
//! output.every = 10
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use crate::integrate::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    TaylorGreen,
    RandomBand,
    File,
}

impl InitialKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "taylor-green" => Some(Self::TaylorGreen),
            "random-band" => Some(Self::RandomBand),
            "file" => Some(Self::File),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub kind: InitialKind,
    /// Largest integer wavenumber magnitude for random data.
    pub band: f64,
    /// Peak velocity (Taylor–Green) or rms value (random data).
    pub amplitude: f64,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub resolution: [usize; 3],
    pub box_size: f64,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub dealias: bool,
    pub initial: InitialSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub output_every: usize,
    /// Advective stability constant; exceeding it only warns.
    pub cfl: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            resolution: [32, 32, 32],
            box_size: 2.0 * PI,
            nu: 0.05,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Rk4IntegratingFactor,
            dealias: true,
            initial: InitialSpec {
                kind: InitialKind::TaylorGreen,
                band: 4.0,
                amplitude: 1.0,
                path: None,
            },
            seed: 0,
            output_dir: PathBuf::from("out"),
            output_every: 10,
            cfl: 0.5,
        }
    }
}

impl SimConfig {
    /// Number of steps needed to reach `t_end`, rounding up.
    pub fn steps(&self) -> usize {
        let s = self.t_end / self.dt;
        let r = s.round();
        if (s - r).abs() < 1e-9 * r.max(1.0) { r as usize } else { s.ceil() as usize }
    }

    /// Checks the numeric constraints, reporting every violation.
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut issues = Vec::new();
        let mut bad = |message: String| issues.push(ConfigIssue { line: None, message });
        if self.resolution.iter().any(|&n| n < 8 || n % 2 != 0) {
            bad(format!("resolution {:?}: each entry must be even and ≥ 8", self.resolution));
        }
        if !(self.box_size > 0.0 && self.box_size.is_finite()) {
            bad("box_size > 0".into());
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            bad("nu ≥ 0".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad("dt > 0".into());
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            bad("t_end ≥ 0".into());
        }
        if self.nu == 0.0 && !self.dealias {
            bad("nu = 0 requires dealias = true".into());
        }
        if !(self.initial.band > 0.0) {
            bad("initial.band > 0".into());
        }
        if !(self.initial.amplitude >= 0.0 && self.initial.amplitude.is_finite()) {
            bad("initial.amplitude ≥ 0".into());
        }
        if self.initial.kind == InitialKind::File && self.initial.path.is_none() {
            bad("initial.kind = file requires initial.path".into());
        }
        if self.output_every == 0 {
            bad("output.every ≥ 1".into());
        }
        if issues.is_empty() { Ok(()) } else { Err(ConfigErrors(issues)) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// 1-based line number, when the issue is tied to one line.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} problem(s))", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const KEYS: &[&str] = &[
    "resolution",
    "box_size",
    "nu",
    "dt",
    "t_end",
    "scheme",
    "dealias",
    "initial.kind",
    "initial.band",
    "initial.amplitude",
    "initial.seed",
    "initial.path",
    "output.dir",
    "output.every",
];

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2 && ((s.starts_with('"') && s.ends_with('"')) || (s.starts_with('\'') && s.ends_with('\''))) {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn strip_comment(line: &str) -> &str {
    let mut quote = None;
    for (i, ch) in line.char_indices() {
        match (quote, ch) {
            (None, '"' | '\'') => quote = Some(ch),
            (Some(q), c) if c == q => quote = None,
            (None, '#') => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_resolution(s: &str) -> Option<[usize; 3]> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = inner.split([',', 'x']).map(str::trim).filter(|p| !p.is_empty()).collect();
    let nums: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
    match nums?.as_slice() {
        [n] => Some([*n; 3]),
        [a, b, c] => Some([*a, *b, *c]),
        _ => None,
    }
}

/// Parses and validates a configuration, collecting all problems.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigErrors> {
    let mut cfg = SimConfig::default();
    let mut issues = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            issues.push(ConfigIssue { line: Some(line_no), message: format!("expected `key = value`, found `{line}`") });
            continue;
        };
        let key = key.trim();
        let value = unquote(value);
        if !KEYS.contains(&key) {
            issues.push(ConfigIssue { line: Some(line_no), message: format!("unknown key `{key}`") });
            continue;
        }
        if let Some(first) = seen.insert(key.to_string(), line_no) {
            issues.push(ConfigIssue {
                line: Some(line_no),
                message: format!("duplicate key `{key}` on lines {first} and {line_no}"),
            });
            continue;
        }
        let mut mismatch = |expected: &str| {
            issues.push(ConfigIssue {
                line: Some(line_no),
                message: format!("`{key}` expects {expected}, found `{value}`"),
            })
        };
        let float = value.parse::<f64>().ok().filter(|x| !x.is_nan());
        match key {
            "resolution" => match parse_resolution(value) {
                Some(r) => cfg.resolution = r,
                None => mismatch("one or three integers"),
            },
            "box_size" => float.map_or_else(|| mismatch("a number"), |x| cfg.box_size = x),
            "nu" => float.map_or_else(|| mismatch("a number"), |x| cfg.nu = x),
            "dt" => float.map_or_else(|| mismatch("a number"), |x| cfg.dt = x),
            "t_end" => float.map_or_else(|| mismatch("a number"), |x| cfg.t_end = x),
            "scheme" => match Scheme::parse(value) {
                Some(s) => cfg.scheme = s,
                None => mismatch("rk4-integrating-factor or imex-cn-ab2"),
            },
            "dealias" => match value {
                "true" => cfg.dealias = true,
                "false" => cfg.dealias = false,
                _ => mismatch("true or false"),
            },
            "initial.kind" => match InitialKind::parse(value) {
                Some(k) => cfg.initial.kind = k,
                None => mismatch("taylor-green, random-band or file"),
            },
            "initial.band" => float.map_or_else(|| mismatch("a number"), |x| cfg.initial.band = x),
            "initial.amplitude" => float.map_or_else(|| mismatch("a number"), |x| cfg.initial.amplitude = x),
            "initial.seed" => match value.parse::<u64>() {
                Ok(s) => cfg.seed = s,
                Err(_) => mismatch("a non-negative integer"),
            },
            "initial.path" => cfg.initial.path = Some(PathBuf::from(value)),
            "output.dir" => cfg.output_dir = PathBuf::from(value),
            "output.every" => match value.parse::<usize>() {
                Ok(s) => cfg.output_every = s,
                Err(_) => mismatch("a positive integer"),
            },
            _ => unreachable!("key list and match arms out of sync"),
        }
    }

    if let Err(ConfigErrors(more)) = cfg.validate() {
        for mut issue in more {
            // attach the defining line when there is one
            let key = issue.message.split_whitespace().next().unwrap_or("");
            issue.line = seen.get(key).copied();
            issues.push(issue);
        }
    }
    if issues.is_empty() { Ok(cfg) } else { Err(ConfigErrors(issues)) }
}
