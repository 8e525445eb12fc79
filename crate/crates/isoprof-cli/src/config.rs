//! Experiment configuration: plain key=value files, with explicit flags
//! winning over file entries. The effective configuration, defaults
//! included, is serialized into every artifact so a run can be reproduced
//! from its output alone.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use isoprof::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<ExperimentConfig> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::usage(format!("config line {}: expected key=value, got `{raw}`", i + 1))
                })?;
                entries.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(ExperimentConfig { entries })
    }

    /// Overlay a flag value; None leaves the file entry in place.
    pub fn set_flag(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.entries.insert(key.to_string(), v);
        }
    }

    /// Record the value actually used, so defaults land in the artifact.
    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            Error::usage(format!("missing parameter `{key}`: pass --{key} or a config entry"))
        })
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::usage(format!("parameter `{key}`: cannot parse `{s}`"))),
        }
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        let s = self.require(key)?;
        s.parse()
            .map_err(|_| Error::usage(format!("parameter `{key}`: cannot parse `{s}`")))
    }

    pub fn parsed_or<T: FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T> {
        let v = self.parsed(key)?.unwrap_or(default);
        self.record(key, v.to_string());
        Ok(v)
    }

    /// The artifact header: command tag plus every entry, sorted.
    pub fn header(&self, command: &str) -> String {
        let mut out = format!("# isoprof {command}\n");
        for (k, v) in &self.entries {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
        )
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }
}
