//! key=value configuration. Precedence, highest first: command-line flag,
//! `EULERKIT_*` environment variable, config file, built-in default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

pub const KEYS: &[&str] = &["precision", "max_conductor", "factor_budget", "cache_dir", "deterministic", "sequential"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub precision: u32,
    pub max_conductor: u64,
    pub factor_budget: u64,
    pub cache_dir: Option<PathBuf>,
    pub deterministic: bool,
    pub sequential: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { precision: 128, max_conductor: 60, factor_budget: 1 << 24, cache_dir: None, deterministic: false, sequential: false }
    }
}

pub fn parse_file(text: &str, origin: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Config(format!("{origin}:{}: expected key=value", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Config(format!("{origin}:{}: unknown key {k:?}", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn env_name(key: &str) -> String {
    format!("EULERKIT_{}", key.to_uppercase())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "1" | "true" | "yes" | "on" => Some(true),
        "0" | "false" | "no" | "off" => Some(false),
        _ => None,
    }
}

impl Config {
    /// Layers file values and then environment values over the defaults.
    pub fn load(file: Option<&Path>, env: &dyn Fn(&str) -> Option<String>) -> Result<Self, CliError> {
        let mut raw = BTreeMap::new();
        if let Some(p) = file {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(p.display().to_string(), e))?;
            raw = parse_file(&text, &p.display().to_string())?;
        }
        for k in KEYS {
            if let Some(v) = env(&env_name(k)) {
                raw.insert(k.to_string(), v);
            }
        }
        let mut c = Config::default();
        for (k, v) in &raw {
            let bad = || CliError::Config(format!("bad value {v:?} for {k}"));
            match k.as_str() {
                "precision" => c.precision = v.parse().map_err(|_| bad())?,
                "max_conductor" => c.max_conductor = v.parse().map_err(|_| bad())?,
                "factor_budget" => c.factor_budget = v.parse().map_err(|_| bad())?,
                "cache_dir" => c.cache_dir = (!v.is_empty()).then(|| PathBuf::from(v)),
                "deterministic" => c.deterministic = parse_bool(v).ok_or_else(bad)?,
                "sequential" => c.sequential = parse_bool(v).ok_or_else(bad)?,
                _ => unreachable!("keys are validated"),
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_env() {
        let dir = std::env::temp_dir().join(format!("eulerkit-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("eulerkit.conf");
        std::fs::write(&path, "# defaults\nprecision = 96\nmax_conductor=40\ncache_dir = /tmp/x\n").unwrap();
        let none = |_: &str| None;
        let c = Config::load(Some(&path), &none).unwrap();
        assert_eq!((c.precision, c.max_conductor), (96, 40));
        assert_eq!(c.cache_dir, Some(PathBuf::from("/tmp/x")));
        let env = |k: &str| (k == "EULERKIT_PRECISION").then(|| "200".to_string());
        assert_eq!(Config::load(Some(&path), &env).unwrap().precision, 200);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse_file("precison = 3", "f").is_err());
        assert!(parse_file("precision 3", "f").is_err());
        let env = |k: &str| (k == "EULERKIT_DETERMINISTIC").then(|| "maybe".to_string());
        assert!(Config::load(None, &env).is_err());
    }
}
