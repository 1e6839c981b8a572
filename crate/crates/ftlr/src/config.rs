//! Flat `key=value` configuration files. The same format carries tracker
//! configs, synthetic-sequence specs, and the `resolved_config.txt` every CLI
//! subcommand emits, so any run can be replayed from a single file. Lines
//! starting with `#` and blank lines are ignored; unknown keys are errors that
//! name the key.

use crate::template::UpdateRule;
use crate::tracker::{TrackerConfig, Variant};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {key:?}: {message}")]
    BadValue { key: String, message: String },
    #[error("missing required key {0:?}")]
    Missing(String),
}

/// Parsed key=value pairs. Consumed keys are removed, so callers can reject
/// leftovers by name once they have taken everything they understand.
#[derive(Debug, Default, Clone)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line: i + 1,
                    text: line.to_string(),
                });
            };
            let key = key.trim().to_string();
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::Duplicate { line: i + 1, key });
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn take_parsed<T: std::str::FromStr>(
        &mut self,
        key: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    message: format!("cannot parse {raw:?}"),
                }),
        }
    }

    pub fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ConfigError> {
        self.take_parsed(key)?
            .ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    pub fn reject_leftovers(&self) -> Result<(), ConfigError> {
        if let Some(key) = self.entries.keys().next() {
            return Err(ConfigError::UnknownKey(key.clone()));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Serializes sorted by key, one `key=value` per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn merge_overrides(&mut self, other: &KeyValues) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }
}

/// Applies keys from `kv` onto a tracker config, consuming every key it
/// understands. Keys not listed here stay in `kv` for the caller.
pub fn apply_tracker_keys(cfg: &mut TrackerConfig, kv: &mut KeyValues) -> Result<(), ConfigError> {
    if let Some(v) = kv.take("variant") {
        cfg.variant = Variant::parse(&v).ok_or_else(|| ConfigError::BadValue {
            key: "variant".to_string(),
            message: format!(
                "unknown variant {v:?}; expected one of baseline, ftlr_0, ftlr_1, ftlr, ftlr_sa, ftlr_gt"
            ),
        })?;
    }
    if let Some(v) = kv.take("update_rule") {
        cfg.update_rule = match v.as_str() {
            "simple" => UpdateRule::Simple,
            "smooth" => UpdateRule::Smooth,
            other => {
                return Err(ConfigError::BadValue {
                    key: "update_rule".to_string(),
                    message: format!("expected simple or smooth, got {other:?}"),
                })
            }
        };
    }
    if let Some(v) = kv.take("extractor") {
        cfg.extractor = v;
    }
    if let Some(v) = kv.take_parsed("nndr_threshold")? {
        cfg.nndr_threshold = v;
    }
    if let Some(v) = kv.take_parsed("alpha")? {
        cfg.alpha = v;
    }
    if let Some(v) = kv.take_parsed("default_area_factor")? {
        cfg.default_area_factor = v;
    }
    if let Some(v) = kv.take_parsed("failure_area_multiplier")? {
        cfg.failure_area_multiplier = v;
    }
    if let Some(v) = kv.take_parsed("min_separation")? {
        cfg.min_separation = v;
    }
    if let Some(v) = kv.take_parsed("motion_window_strength")? {
        cfg.motion_window_strength = v;
    }
    if let Some(v) = kv.take_parsed("census_min_score")? {
        cfg.census_min_score = v;
    }
    if let Some(v) = kv.take_parsed("scale_compensated_search")? {
        cfg.scale_compensated_search = v;
    }
    if let Some(v) = kv.take_parsed("template_side")? {
        cfg.template_side = v;
    }
    if let Some(v) = kv.take_parsed("search_side")? {
        cfg.search_side = v;
    }
    if let Some(v) = kv.take_parsed("template_context")? {
        cfg.template_context = v;
    }
    if let Some(v) = kv.take_parsed("search_context")? {
        cfg.search_context = v;
    }
    Ok(())
}

/// Writes every tracker field under its config key.
pub fn tracker_keys(cfg: &TrackerConfig) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.set("variant", cfg.variant.as_str());
    kv.set(
        "update_rule",
        match cfg.update_rule {
            UpdateRule::Simple => "simple",
            UpdateRule::Smooth => "smooth",
        },
    );
    kv.set("extractor", &cfg.extractor);
    kv.set("nndr_threshold", cfg.nndr_threshold);
    kv.set("alpha", cfg.alpha);
    kv.set("default_area_factor", cfg.default_area_factor);
    kv.set("failure_area_multiplier", cfg.failure_area_multiplier);
    kv.set("min_separation", cfg.min_separation);
    kv.set("motion_window_strength", cfg.motion_window_strength);
    kv.set("census_min_score", cfg.census_min_score);
    kv.set("scale_compensated_search", cfg.scale_compensated_search);
    kv.set("template_side", cfg.template_side);
    kv.set("search_side", cfg.search_side);
    kv.set("template_context", cfg.template_context);
    kv.set("search_context", cfg.search_context);
    kv
}
