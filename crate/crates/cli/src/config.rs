//! Plain-text parameter files: one `key = value` assignment per line.
//!
//! Keys are exactly the field names of [`PhysicalParams`]; values are decimal
//! numbers (`atom_number` and `bubble_count` take integers). The optional
//! fields `atom_density`, `volume`, and `g2n_override` also accept the
//! literal `none` to clear them. `#` starts a comment that runs to the end of
//! the line; blank lines are skipped. Unknown keys, repeated keys, and
//! malformed values are hard errors carrying the offending line number.
//!
//! Parsing starts from [`PhysicalParams::reference`], so a file only needs
//! the fields it wants to change.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rydcav::params::PhysicalParams;

/// A rejected parameter file, with the 1-based line that caused it when the
/// problem is local to a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), message: message.into() }
}

/// Every key a parameter file may assign, in declaration order.
pub const CONFIG_KEYS: [&str; 14] = [
    "gamma_e",
    "gamma_r",
    "gamma_c",
    "delta_e",
    "delta_r",
    "delta_c",
    "omega_cf",
    "alpha",
    "cooperativity",
    "atom_number",
    "bubble_count",
    "atom_density",
    "volume",
    "g2n_override",
];

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    raw.parse::<f64>()
        .map_err(|_| err(line, format!("value `{raw}` for `{key}` is not a number")))
}

fn parse_u32(line: usize, key: &str, raw: &str) -> Result<u32, ConfigError> {
    raw.parse::<u32>()
        .map_err(|_| err(line, format!("value `{raw}` for `{key}` is not a nonnegative integer")))
}

fn parse_opt_f64(line: usize, key: &str, raw: &str) -> Result<Option<f64>, ConfigError> {
    if raw.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_f64(line, key, raw).map(Some)
    }
}

/// Parses a parameter file's text into a validated [`PhysicalParams`],
/// starting from the bundled reference set.
pub fn parse_config(text: &str) -> Result<PhysicalParams, ConfigError> {
    let mut p = PhysicalParams::reference();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.split_once('#') {
            Some((before, _comment)) => before,
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, format!("expected `key = value`, got `{line}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(lineno, format!("missing value for `{key}`")));
        }
        if !seen.insert(key.to_owned()) {
            return Err(err(lineno, format!("key `{key}` assigned more than once")));
        }
        match key {
            "gamma_e" => p.gamma_e = parse_f64(lineno, key, value)?,
            "gamma_r" => p.gamma_r = parse_f64(lineno, key, value)?,
            "gamma_c" => p.gamma_c = parse_f64(lineno, key, value)?,
            "delta_e" => p.delta_e = parse_f64(lineno, key, value)?,
            "delta_r" => p.delta_r = parse_f64(lineno, key, value)?,
            "delta_c" => p.delta_c = parse_f64(lineno, key, value)?,
            "omega_cf" => p.omega_cf = parse_f64(lineno, key, value)?,
            "alpha" => p.alpha = parse_f64(lineno, key, value)?,
            "cooperativity" => p.cooperativity = parse_f64(lineno, key, value)?,
            "atom_number" => p.atom_number = parse_u32(lineno, key, value)?,
            "bubble_count" => p.bubble_count = parse_u32(lineno, key, value)?,
            "atom_density" => p.atom_density = parse_opt_f64(lineno, key, value)?,
            "volume" => p.volume = parse_opt_f64(lineno, key, value)?,
            "g2n_override" => p.g2n_override = parse_opt_f64(lineno, key, value)?,
            other => {
                return Err(err(
                    lineno,
                    format!(
                        "unknown key `{other}` (expected one of: {})",
                        CONFIG_KEYS.join(", ")
                    ),
                ));
            }
        }
    }

    p.validate()
        .map_err(|e| ConfigError { line: None, message: e.to_string() })?;
    Ok(p)
}

/// Reads and parses a parameter file from disk.
pub fn load_config(path: &Path) -> Result<PhysicalParams, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        message: format!("cannot read `{}`: {e}", path.display()),
    })?;
    parse_config(&text)
}
