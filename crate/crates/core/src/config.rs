//! Plain key-value configs for domains and profiles.
//!
//! Syntax, one entry per line: `key = value` where value is a quoted string,
//! a number, or a bracketed numeric list. `#` starts a comment. Sampled
//! profiles load from a two-column CSV (x, f(x)) on a uniform ascending grid.

use std::collections::BTreeMap;
use std::path::Path;

use crate::domain::{catalog, Domain, ElementaryDomain};
use crate::error::{Error, Result};
use crate::profile::{ClosedForm, ProfileFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigValue {
    Str(String),
    Num(f64),
    List(Vec<f64>),
}

impl ConfigValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            ConfigValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            ConfigValue::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[f64]> {
        match self {
            ConfigValue::List(v) => Some(v),
            _ => None,
        }
    }
}

pub type Config = BTreeMap<String, ConfigValue>;

pub fn parse_config(text: &str) -> Result<Config> {
    let mut out = Config::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim();
        let parsed = if let Some(stripped) = value.strip_prefix('"') {
            let inner = stripped
                .strip_suffix('"')
                .ok_or_else(|| Error::Config(format!("line {}: unterminated string", lineno + 1)))?;
            ConfigValue::Str(inner.to_string())
        } else if let Some(stripped) = value.strip_prefix('[') {
            let inner = stripped.strip_suffix(']').ok_or_else(|| {
                Error::Config(format!("line {}: unterminated list", lineno + 1))
            })?;
            let nums: std::result::Result<Vec<f64>, _> = inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::parse::<f64>)
                .collect();
            ConfigValue::List(nums.map_err(|e| {
                Error::Config(format!("line {}: bad list entry: {e}", lineno + 1))
            })?)
        } else {
            ConfigValue::Num(value.parse::<f64>().map_err(|e| {
                Error::Config(format!("line {}: bad number {value:?}: {e}", lineno + 1))
            })?)
        };
        out.insert(key, parsed);
    }
    Ok(out)
}

/// Two-column CSV (x, f(x)); the x column must be uniform and ascending on
/// [0, 1].
pub fn profile_from_csv(text: &str) -> Result<ProfileFunction> {
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let x: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::InvalidData(format!("csv line {}: bad x", lineno + 1)))?;
        let v: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::InvalidData(format!("csv line {}: bad value", lineno + 1)))?;
        xs.push(x);
        vals.push(v);
    }
    if xs.len() < 2 {
        return Err(Error::InvalidData("need at least two csv rows".into()));
    }
    let n = xs.len();
    let step = 1.0 / (n - 1) as f64;
    for (i, &x) in xs.iter().enumerate() {
        if (x - i as f64 * step).abs() > 1e-9 {
            return Err(Error::InvalidData(format!(
                "x column must be the uniform grid on [0,1]; row {} has {x}",
                i + 1
            )));
        }
    }
    ProfileFunction::sampled(vals)
}

/// Build a profile from config keys: `profile` is one of "xsin", "zero",
/// "const" (+ `value`), "step" (+ `breaks`, `values`), "accumulating",
/// "sampled" (+ `csv` path).
pub fn profile_from_config(cfg: &Config, base: &Path) -> Result<ProfileFunction> {
    let name = cfg
        .get("profile")
        .and_then(ConfigValue::as_str)
        .ok_or_else(|| Error::Config("missing `profile` key".into()))?;
    match name {
        "xsin" => ProfileFunction::closed_form(1, ClosedForm::XSinInv),
        "zero" => ProfileFunction::constant(1, 0.0),
        "const" => {
            let v = cfg
                .get("value")
                .and_then(ConfigValue::as_num)
                .ok_or_else(|| Error::Config("const profile needs `value`".into()))?;
            ProfileFunction::constant(1, v)
        }
        "step" => {
            let breaks = cfg
                .get("breaks")
                .and_then(ConfigValue::as_list)
                .ok_or_else(|| Error::Config("step profile needs `breaks = [...]`".into()))?;
            let values = cfg
                .get("values")
                .and_then(ConfigValue::as_list)
                .ok_or_else(|| Error::Config("step profile needs `values = [...]`".into()))?;
            ProfileFunction::step(breaks.to_vec(), values.to_vec())
        }
        "accumulating" => Ok(ProfileFunction::accumulating_dyadic()),
        "sampled" => {
            let rel = cfg
                .get("csv")
                .and_then(ConfigValue::as_str)
                .ok_or_else(|| Error::Config("sampled profile needs `csv = \"path\"`".into()))?;
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
            profile_from_csv(&text)
        }
        other => Err(Error::Config(format!("unknown profile {other:?}"))),
    }
}

/// A domain from a config: either `name = "<catalog name>"` with numeric
/// parameters, or `name = "elementary"` plus a profile block.
pub fn domain_from_config(cfg: &Config, base: &Path) -> Result<(String, Domain)> {
    let name = cfg
        .get("name")
        .and_then(ConfigValue::as_str)
        .ok_or_else(|| Error::Config("missing `name` key".into()))?;
    if name == "elementary" {
        let profile = profile_from_config(cfg, base)?;
        return Ok((
            "elementary".to_string(),
            ElementaryDomain::standard(profile).into(),
        ));
    }
    let mut params = BTreeMap::new();
    for key in ["dim", "alpha", "k_max"] {
        if let Some(v) = cfg.get(key).and_then(ConfigValue::as_num) {
            params.insert(key.to_string(), v);
        }
    }
    Ok((name.to_string(), catalog::by_name(name, &params)?))
}
