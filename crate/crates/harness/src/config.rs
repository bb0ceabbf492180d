//! Optional JSON configuration mirroring the command-line flags.
//!
//! ```json
//! { "space": "sphere", "problem": "rigid_body", "method": "rk4",
//!   "h": 0.01, "T": 10, "dexpinv-terms": 1, "seed": 42 }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Config {
    pub space: Option<String>,
    pub problem: Option<String>,
    pub method: Option<String>,
    pub h: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub h_list: Option<Vec<f64>>,
    pub dexpinv_terms: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub diagnostics: Option<bool>,
    pub out: Option<PathBuf>,
    pub inertia: Option<[f64; 3]>,
    pub axis: Option<[f64; 3]>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Fields set in `flags` win over those in `self`.
    pub fn overridden_by(self, flags: Config) -> Config {
        Config {
            space: flags.space.or(self.space),
            problem: flags.problem.or(self.problem),
            method: flags.method.or(self.method),
            h: flags.h.or(self.h),
            t_end: flags.t_end.or(self.t_end),
            h_list: flags.h_list.or(self.h_list),
            dexpinv_terms: flags.dexpinv_terms.or(self.dexpinv_terms),
            n: flags.n.or(self.n),
            seed: flags.seed.or(self.seed),
            diagnostics: flags.diagnostics.or(self.diagnostics),
            out: flags.out.or(self.out),
            inertia: flags.inertia.or(self.inertia),
            axis: flags.axis.or(self.axis),
        }
    }

    pub fn require<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| HarnessError::Config(format!("missing `{name}` (flag or config file)")))
    }
}

/// Parses `0.1,0.05,...`.
pub fn parse_h_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Config::parse(r#"{"space": "spd", "h": 0.1, "T": 2.0, "dexpinv-terms": 3}"#).unwrap();
        let flags = Config {
            h: Some(0.05),
            ..Config::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.h, Some(0.05));
        assert_eq!(merged.t_end, Some(2.0));
        assert_eq!(merged.space.as_deref(), Some("spd"));
        assert_eq!(merged.dexpinv_terms, Some(3));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(Config::parse(r#"{"stepsize": 0.1}"#), Err(HarnessError::Config(_))));
    }

    #[test]
    fn h_list_parsing() {
        assert_eq!(parse_h_list("0.1, 0.05").unwrap(), vec![0.1, 0.05]);
        assert!(parse_h_list("0.1,x").is_err());
    }
}
