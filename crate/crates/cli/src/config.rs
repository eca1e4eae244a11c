use std::path::Path;

use quasifold_core::numbers::{AlphaWitness, GOLDEN_CONJUGATE_DIGITS};
use serde::{Deserialize, Serialize};

use crate::report::Format;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaConfig {
    /// Decimal expansion of α, or `"default"` for the golden conjugate.
    pub value: String,
    /// Digits of `value` to keep; all of them when absent.
    pub digits: Option<usize>,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        Self { value: "default".into(), digits: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bounds {
    /// Group enumeration bound.
    pub group: u32,
    /// Word length for bimodule checks.
    pub word_length: u32,
    /// Bound for fiber and orbit searches.
    pub fiber: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { group: 2, word_length: 3, fiber: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub coefficient: f64,
    pub residual: f64,
    pub second_derivative: f64,
    pub phase: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { coefficient: 1e-9, residual: 1e-9, second_derivative: 1e-6, phase: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub alpha: AlphaConfig,
    pub bounds: Bounds,
    pub tolerances: Tolerances,
    pub format: Format,
    pub seed: u64,
    /// Set by `--tol`: replaces the main tolerance of the command being run.
    #[serde(skip)]
    pub tol_override: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            alpha: AlphaConfig::default(),
            bounds: Bounds::default(),
            tolerances: Tolerances::default(),
            format: Format::Json,
            seed: 7,
            tol_override: None,
        }
    }
}

impl Config {
    /// Reads a JSON config; errors carry the offending field and position.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), detail: e.to_string() })?;
        crate::parse_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let b = &self.bounds;
        if b.group == 0 || b.word_length == 0 || b.fiber == 0 {
            return Err(CliError::Usage("bounds must be positive".into()));
        }
        let t = &self.tolerances;
        let tols = [t.coefficient, t.residual, t.second_derivative, t.phase];
        if tols.iter().chain(self.tol_override.iter()).any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(CliError::Usage("tolerances must be finite and non-negative".into()));
        }
        self.witness().map(|_| ())
    }

    pub fn witness(&self) -> Result<AlphaWitness, CliError> {
        let text = match self.alpha.value.as_str() {
            "default" | "golden" => GOLDEN_CONJUGATE_DIGITS,
            other => other,
        };
        let text = match self.alpha.digits {
            Some(d) => {
                let cut = text.find('.').map_or(text.len(), |dot| (dot + 1 + d).min(text.len()));
                &text[..cut]
            }
            None => text,
        };
        AlphaWitness::from_decimal(text).map_err(|e| CliError::Usage(format!("alpha: {e}")))
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol_override.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn unknown_field_is_reported_with_path() {
        let err = crate::parse_json::<Config>(r#"{"bounds": {"grup": 3}}"#, "cfg.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bounds") && msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn zero_bound_rejected() {
        let cfg = Config { bounds: Bounds { group: 0, ..Bounds::default() }, ..Config::default() };
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
    }

    #[test]
    fn digits_truncate_the_witness() {
        let cfg = Config { alpha: AlphaConfig { value: "default".into(), digits: Some(30) }, ..Config::default() };
        assert_eq!(cfg.witness().unwrap().digits(), 30);
    }
}
