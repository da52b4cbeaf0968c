//! Result records written as JSON.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One named output quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Int(i64),
    Real(f64),
    Complex { re: f64, im: f64 },
    Text(String),
}

impl Quantity {
    /// JSON has no infinities or NaN, so those are kept as text.
    pub fn real(x: f64) -> Self {
        if x.is_finite() {
            Quantity::Real(x)
        } else {
            Quantity::Text(format!("{x}"))
        }
    }

    pub fn complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Quantity::Complex { re: z.re, im: z.im }
        } else {
            Quantity::Text(format!("{z}"))
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Quantity::Int(n) => Some(n as f64),
            Quantity::Real(x) => Some(x),
            _ => None,
        }
    }
}

impl From<u64> for Quantity {
    fn from(n: u64) -> Self {
        Quantity::Int(n as i64)
    }
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::real(x)
    }
}

impl From<&str> for Quantity {
    fn from(s: &str) -> Self {
        Quantity::Text(s.to_string())
    }
}

/// Named values sit at the top level next to `params`, so an `expsum`
/// record reads `{params, value_re, value_im, count, elapsed_ms, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub version: String,
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(flatten)]
    pub values: BTreeMap<String, Quantity>,
    pub invariant_flags: BTreeMap<String, bool>,
    pub elapsed_ms: u64,
}

impl ResultRecord {
    pub fn new(command: &str, params: serde_json::Map<String, serde_json::Value>) -> Self {
        ResultRecord {
            command: command.to_string(),
            version: VERSION.to_string(),
            params,
            values: BTreeMap::new(),
            invariant_flags: BTreeMap::new(),
            elapsed_ms: 0,
        }
    }

    pub fn value(&mut self, name: &str, q: impl Into<Quantity>) -> &mut Self {
        self.values.insert(name.to_string(), q.into());
        self
    }

    pub fn flag(&mut self, name: &str, ok: bool) -> &mut Self {
        self.invariant_flags.insert(name.to_string(), ok);
        self
    }

    pub fn all_invariants_hold(&self) -> bool {
        self.invariant_flags.values().all(|&b| b)
    }

    pub fn failed_invariants(&self) -> Vec<&str> {
        self.invariant_flags
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
