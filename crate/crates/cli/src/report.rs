use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::csvio::InputDescriptor;

/// One JSON document per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub input: Option<InputDescriptor>,
    /// Every flag value the run used, defaults included.
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub parallel: bool,
    pub duration_secs: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

/// A flag or parameter problem; exits with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn params<T: Serialize>(args: &T) -> BTreeMap<String, Value> {
    match serde_json::to_value(args).expect("arguments serialize") {
        Value::Object(m) => m.into_iter().collect(),
        other => BTreeMap::from([("value".to_string(), other)]),
    }
}
