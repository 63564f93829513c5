//! Run configuration: one flat key-value file holding every ring and study
//! setting.
//!
//! The file is TOML with top-level keys only, or a flat JSON object when
//! the path ends in `.json` or the text starts with `{`. Keys are the field
//! names of [`RingConfig`] (with `J` and `K` for the polynomial and Fourier
//! orders) and [`StudyConfig`]. Missing keys take their defaults; unknown
//! keys are rejected.
//!
//! ```toml
//! J = 4
//! K = 6
//! n_s = 64
//! n_qmc = 200
//! n_refine = 20
//! seed = 7
//! ```

use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::optimizer::StudyConfig;
use crate::ring_model::RingConfig;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub ring: RingConfig,
    pub study: StudyConfig,
}

fn object(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(map) => map,
        _ => unreachable!("config structs serialize to objects"),
    }
}

impl RunConfig {
    /// Flat key-value form: the union of the ring and study keys.
    pub fn to_flat(&self) -> Map<String, Value> {
        let mut map = object(serde_json::to_value(&self.ring).expect("ring config serializes"));
        map.extend(object(serde_json::to_value(&self.study).expect("study config serializes")));
        map
    }

    pub fn from_flat(map: Map<String, Value>) -> std::result::Result<Self, String> {
        let ring_keys = object(serde_json::to_value(RingConfig::default()).expect("ring config serializes"));
        let study_keys = object(serde_json::to_value(StudyConfig::default()).expect("study config serializes"));
        let (mut ring, mut study) = (Map::new(), Map::new());
        for (key, value) in map {
            if ring_keys.contains_key(&key) {
                ring.insert(key, value);
            } else if study_keys.contains_key(&key) {
                study.insert(key, value);
            } else {
                return Err(format!("unknown key '{key}'"));
            }
        }
        Ok(Self {
            ring: serde_json::from_value(Value::Object(ring)).map_err(|e| e.to_string())?,
            study: serde_json::from_value(Value::Object(study)).map_err(|e| e.to_string())?,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_flat()).expect("flat config serializes to TOML")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_flat()).expect("flat config serializes to JSON")
    }

    /// Parses TOML, or JSON when `json` is set.
    pub fn parse(text: &str, json: bool) -> std::result::Result<Self, String> {
        let map: Map<String, Value> = if json {
            serde_json::from_str(text).map_err(|e| e.to_string())?
        } else {
            let table: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
            object(serde_json::to_value(table).map_err(|e| e.to_string())?)
        };
        if let Some((key, _)) = map.iter().find(|(_, v)| v.is_object() || v.is_array()) {
            return Err(format!("key '{key}' must hold a plain value (the file is flat)"));
        }
        Self::from_flat(map)
    }

    /// Loads and validates a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{');
        let cfg = Self::parse(&text, json).map_err(|reason| Error::Parse {
            path: path.to_path_buf(),
            reason,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.ring.validate()?;
        self.study.validate()
    }
}

impl Serialize for RunConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_flat().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RunConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Self::from_flat(Map::deserialize(deserializer)?).map_err(D::Error::custom)
    }
}
