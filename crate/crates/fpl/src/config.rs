//! Run configuration: a flat TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{FplError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every tunable shared by the subcommands. Keys in the file use the same
/// names as the serialized fields below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub alpha: f64,
    /// The window `I = [c, d)` for `{p^α}`.
    pub interval: [f64; 2],
    #[serde(rename = "X")]
    pub x: u64,
    /// Upper end of the summation range; `2X` when absent.
    #[serde(rename = "Y", skip_serializing_if = "Option::is_none")]
    pub y: Option<u64>,
    #[serde(rename = "Q")]
    pub q_max: u64,
    pub q: u64,
    pub a: u64,
    pub h: i64,
    /// `C` in `h <= (log X)^C`.
    #[serde(rename = "C")]
    pub c_exp: f64,
    #[serde(rename = "A0")]
    pub a0: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "A_I")]
    pub a_i: f64,
    pub vdc_constant: f64,
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Format>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let large = fpl_core::oscillatory::LargeConstants::default();
        RunConfig {
            alpha: 0.1,
            interval: [0.0, 0.5],
            x: 100_000,
            y: None,
            q_max: 31,
            q: 1,
            a: 0,
            h: 1,
            c_exp: 2.0,
            a0: 1.0,
            b0: 1.0,
            d0: large.d0,
            f0: large.f0,
            a_i: large.a_i,
            vdc_constant: fpl_core::expsums::DEFAULT_VDC_CONSTANT,
            threads: 0,
            cache_path: None,
            output: None,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[s].trim().to_string())
                .unwrap_or_else(|| "config".into());
            FplError::config(field, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FplError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Checks the parameters every command relies on. Command-specific
    /// preconditions are left to the core routines, whose errors are
    /// reported against the matching field.
    pub fn validate(&self) -> Result<()> {
        let bad = |f: &str, m: &str| Err(FplError::config(f, m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha", "must lie in (0, 1)");
        }
        let [c, d] = self.interval;
        if !(0.0 <= c && c < d && d <= 1.0) {
            return bad("interval", "need 0 <= c < d <= 1");
        }
        if self.x < 2 {
            return bad("X", "must be at least 2");
        }
        if self.x >= fpl_core::arith::MAX_HI {
            return bad("X", "must be below 2^48");
        }
        if let Some(y) = self.y {
            if y <= self.x || y > 2 * self.x {
                return bad("Y", "need X < Y <= 2X");
            }
        }
        if self.q == 0 {
            return bad("q", "must be at least 1");
        }
        for (name, v) in [
            ("C", self.c_exp),
            ("A0", self.a0),
            ("B0", self.b0),
            ("D0", self.d0),
            ("F0", self.f0),
            ("A_I", self.a_i),
            ("vdc_constant", self.vdc_constant),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(name, "must be a positive finite number");
            }
        }
        Ok(())
    }

    /// `0 <= a < q` with `gcd(a, q) = 1`, for the commands that sum over a
    /// progression.
    pub fn check_progression(&self) -> Result<()> {
        if self.a >= self.q {
            return Err(FplError::config("a", "need 0 <= a < q"));
        }
        if self.q > 1 && fpl_core::arith::gcd(self.a, self.q) != 1 {
            return Err(FplError::config("a", "must be coprime to q"));
        }
        Ok(())
    }

    pub fn y_or_default(&self) -> u64 {
        self.y.unwrap_or(2 * self.x)
    }

    /// The configuration as echoed into artifacts. Thread count and cache
    /// location are left out: neither changes a result.
    pub fn echo(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut map = match serde_json::to_value(self).expect("config serializes") {
            serde_json::Value::Object(m) => m,
            _ => unreachable!(),
        };
        map.remove("threads");
        map.remove("cache_path");
        map.remove("output");
        map
    }
}

/// Parses integers written either plainly or in `1e6` notation.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if f >= 0.0 && f.fract() == 0.0 && f <= 9.007_199_254_740_992e15 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

/// Parses `c,d`.
pub fn parse_interval(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [c, d] => {
            let c = c.parse().map_err(|_| format!("`{c}` is not a number"))?;
            let d = d.parse().map_err(|_| format!("`{d}` is not a number"))?;
            Ok([c, d])
        }
        _ => Err("expected `c,d`".into()),
    }
}

/// A comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

pub fn parse_reals(s: &str) -> std::result::Result<Reals, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Reals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_and_defaults() {
        let c = RunConfig::from_toml("alpha = 0.05\nX = 1000\ninterval = [0.25, 0.75]\nQ = 10\n")
            .unwrap();
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.x, 1000);
        assert_eq!(c.interval, [0.25, 0.75]);
        assert_eq!(c.vdc_constant, 8.0);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_name_the_field() {
        match RunConfig::from_toml("alhpa = 0.1\n") {
            Err(FplError::Config { message, .. }) => {
                assert!(message.contains("alhpa"), "{message}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_names_fields() {
        let mut c = RunConfig {
            q: 6,
            a: 4,
            ..RunConfig::default()
        };
        c.validate().unwrap();
        assert!(
            matches!(c.check_progression(), Err(FplError::Config { field, .. }) if field == "a")
        );
        c.a = 5;
        c.interval = [0.5, 0.5];
        assert!(matches!(c.validate(), Err(FplError::Config { field, .. }) if field == "interval"));
    }

    #[test]
    fn echo_omits_run_only_settings() {
        let e = RunConfig {
            threads: 8,
            ..RunConfig::default()
        }
        .echo();
        assert!(!e.contains_key("threads"));
        assert_eq!(e["X"], 100_000);
    }

    #[test]
    fn counts_in_scientific_notation() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1.5").is_err());
        assert_eq!(parse_interval("0, 0.5"), Ok([0.0, 0.5]));
    }
}
