//! Flat `key = value` configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated; exponents accept `inf`.
//!
//! | key | default |
//! |-----|---------|
//! | `dimension` | 1 |
//! | `multiplicities` | 1 (one value is repeated over all axes) |
//! | `grid.n` | 256 nodes per axis |
//! | `grid.L` | `auto` (the preset's support box) |
//! | `alpha` | 0.5, 1 |
//! | `p` | 1, 2, inf |
//! | `q` | 1, 2 |
//! | `t.min`, `t.max`, `t.points` | per command |
//! | `u0.preset` | bump (`nonlinear`: gaussian) |
//! | `u0.mass` | unset: data as sampled |
//! | `nonlinear.alpha`, `nonlinear.p` | 0.5, 2 |
//! | `nonlinear.dt`, `nonlinear.growth`, `nonlinear.t_end` | 1e-3, 0.01, 300 |
//! | `output.dir` | unset |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dunkl::presets::Preset;
use serde_json::{json, Value};

use crate::error::CliError;

pub const KEYS: [&str; 18] = [
    "dimension",
    "multiplicities",
    "grid.n",
    "grid.L",
    "alpha",
    "p",
    "q",
    "t.min",
    "t.max",
    "t.points",
    "u0.preset",
    "u0.mass",
    "nonlinear.alpha",
    "nonlinear.p",
    "nonlinear.dt",
    "nonlinear.growth",
    "nonlinear.t_end",
    "output.dir",
];

/// Log-spaced time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        dunkl::asymptotics::log_space(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub multiplicities: Vec<f64>,
    pub grid_n: usize,
    pub grid_l: Option<f64>,
    pub alpha: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Option<TimeGrid>,
    pub preset: Option<Preset>,
    pub u0_mass: Option<f64>,
    pub nl_alpha: f64,
    pub nl_p: f64,
    pub nl_dt: f64,
    pub nl_growth: f64,
    pub nl_t_end: f64,
    pub output_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            multiplicities: vec![1.0],
            grid_n: 256,
            grid_l: None,
            alpha: vec![0.5, 1.0],
            p: vec![1.0, 2.0, f64::INFINITY],
            q: vec![1.0, 2.0],
            t: None,
            preset: None,
            u0_mass: None,
            nl_alpha: 0.5,
            nl_p: 2.0,
            nl_dt: 1e-3,
            nl_growth: 0.01,
            nl_t_end: 300.0,
            output_dir: None,
        }
    }
}

fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("config key `{key}`: {msg}"))
}

fn number(key: &str, v: &str) -> Result<f64, CliError> {
    let x = match v.trim() {
        "inf" | "infinity" => f64::INFINITY,
        s => s.parse::<f64>().map_err(|_| bad(key, format!("`{s}` is not a number")))?,
    };
    if x.is_nan() {
        return Err(bad(key, "NaN is not allowed"));
    }
    Ok(x)
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    let out: Vec<f64> = v.split(',').map(|s| number(key, s)).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(out)
}

fn positive(key: &str, v: &str) -> Result<f64, CliError> {
    let x = number(key, v)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(bad(key, format!("must be positive and finite, got {x}")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize, CliError> {
    v.trim().parse::<usize>().map_err(|_| bad(key, format!("`{}` is not a count", v.trim())))
}

/// Splits the text into key-value pairs, rejecting unknown and repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`", n + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: key `{k}` given twice", n + 1)));
        }
    }
    Ok(out)
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        let mut c = Config::default();
        let get = |k: &str| pairs.get(k).map(String::as_str);

        let dim = get("dimension").map(|v| count("dimension", v)).transpose()?.unwrap_or(1);
        if dim == 0 {
            return Err(bad("dimension", "must be at least 1"));
        }
        if let Some(v) = get("multiplicities") {
            c.multiplicities = list("multiplicities", v)?;
        }
        if let Some(k) = c.multiplicities.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(bad("multiplicities", format!("must be nonnegative, got {k}")));
        }
        match c.multiplicities.len() {
            1 => c.multiplicities = vec![c.multiplicities[0]; dim],
            n if n == dim => {}
            n => return Err(bad("multiplicities", format!("{n} values for dimension {dim}"))),
        }
        if let Some(v) = get("grid.n") {
            c.grid_n = count("grid.n", v)?;
            if c.grid_n < 16 || c.grid_n % 2 != 0 {
                return Err(bad("grid.n", "must be even and at least 16"));
            }
        }
        if let Some(v) = get("grid.L") {
            c.grid_l = if v == "auto" { None } else { Some(positive("grid.L", v)?) };
        }
        if let Some(v) = get("alpha") {
            c.alpha = list("alpha", v)?;
        }
        if let Some(a) = c.alpha.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(bad("alpha", format!("must lie in (0, 1], got {a}")));
        }
        for (key, slot) in [("p", &mut c.p), ("q", &mut c.q)] {
            if let Some(v) = get(key) {
                *slot = list(key, v)?;
            }
            if let Some(x) = slot.iter().find(|x| !(**x >= 1.0)) {
                return Err(bad(key, format!("exponents must be >= 1, got {x}")));
            }
        }
        let tkeys = [get("t.min"), get("t.max"), get("t.points")];
        if tkeys.iter().any(Option::is_some) {
            let [Some(a), Some(b), Some(n)] = tkeys else {
                return Err(bad("t.min", "t.min, t.max and t.points go together"));
            };
            let grid = TimeGrid {
                min: positive("t.min", a)?,
                max: positive("t.max", b)?,
                points: count("t.points", n)?,
            };
            if grid.max <= grid.min || grid.points < 2 {
                return Err(bad("t.max", "need t.max > t.min and t.points >= 2"));
            }
            c.t = Some(grid);
        }
        if let Some(v) = get("u0.preset") {
            c.preset = Some(v.parse().map_err(|e| bad("u0.preset", e))?);
        }
        if let Some(v) = get("u0.mass") {
            c.u0_mass = Some(positive("u0.mass", v)?);
        }
        if let Some(v) = get("nonlinear.alpha") {
            c.nl_alpha = number("nonlinear.alpha", v)?;
            if !(c.nl_alpha > 0.0 && c.nl_alpha <= 1.0) {
                return Err(bad("nonlinear.alpha", format!("must lie in (0, 1], got {}", c.nl_alpha)));
            }
        }
        if let Some(v) = get("nonlinear.p") {
            c.nl_p = positive("nonlinear.p", v)?;
        }
        if let Some(v) = get("nonlinear.dt") {
            c.nl_dt = positive("nonlinear.dt", v)?;
        }
        if let Some(v) = get("nonlinear.growth") {
            c.nl_growth = number("nonlinear.growth", v)?;
            if !(0.0..0.5).contains(&c.nl_growth) {
                return Err(bad("nonlinear.growth", "must lie in [0, 0.5)"));
            }
        }
        if let Some(v) = get("nonlinear.t_end") {
            c.nl_t_end = positive("nonlinear.t_end", v)?;
        }
        if let Some(v) = get("output.dir") {
            c.output_dir = Some(PathBuf::from(v));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn dimension(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn time_grid(&self, default: TimeGrid) -> TimeGrid {
        self.t.unwrap_or(default)
    }

    pub fn preset_or(&self, default: Preset) -> Preset {
        self.preset.unwrap_or(default)
    }

    /// The config with command defaults filled in, as JSON.
    pub fn resolved(&self, t: Option<TimeGrid>, preset: Option<Preset>) -> Value {
        json!({
            "dimension": self.dimension(),
            "multiplicities": self.multiplicities,
            "grid.n": self.grid_n,
            "grid.L": self.grid_l.map_or(json!("auto"), |l| json!(l)),
            "alpha": self.alpha,
            "p": self.p.iter().map(|&x| exponent(x)).collect::<Vec<_>>(),
            "q": self.q.iter().map(|&x| exponent(x)).collect::<Vec<_>>(),
            "t": t.map(|t| json!({"min": t.min, "max": t.max, "points": t.points})),
            "u0.preset": preset.map(|p| p.name()),
            "u0.mass": self.u0_mass,
            "nonlinear": {
                "alpha": self.nl_alpha,
                "p": self.nl_p,
                "dt": self.nl_dt,
                "growth": self.nl_growth,
                "t_end": self.nl_t_end,
            },
            "output.dir": self.output_dir.as_ref().map(|d| d.display().to_string()),
        })
    }
}

/// JSON for an exponent; infinity is the string `"inf"`.
pub fn exponent(x: f64) -> Value {
    if x.is_infinite() {
        json!("inf")
    } else {
        json!(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = Config::parse("").unwrap();
        assert_eq!(c, Config::default());
        let c = Config::parse(
            "# comment\ndimension = 2\nmultiplicities = 0.5\np = 1, inf\nt.min = 1\nt.max = 10\nt.points = 5\n",
        )
        .unwrap();
        assert_eq!(c.multiplicities, vec![0.5, 0.5]);
        assert_eq!(c.p, vec![1.0, f64::INFINITY]);
        assert_eq!(c.t.unwrap().values().len(), 5);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |text: &str| Config::parse(text).unwrap_err().to_string();
        assert!(msg("multiplicities = -1").contains("multiplicities"));
        assert!(msg("colour = red").contains("colour"));
        assert!(msg("alpha = 1.5").contains("alpha"));
        assert!(msg("t.min = 1").contains("t.points"));
        assert!(msg("u0.preset = square").contains("u0.preset"));
        assert!(msg("p = 1\np = 2").contains("twice"));
        assert!(msg("dimension = 2\nmultiplicities = 1, 2, 3").contains("multiplicities"));
    }
}
