//! Loading JSON configs with `--set` overrides and JSON-pointer diagnostics.

use std::path::Path;

use hscale::json::{escape_token, pointer_of, split_nested};
use serde::de::DeserializeOwned;
use serde_json::Value;

/// A config problem that maps to exit code 65.
#[derive(Debug)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pointer.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "at {}: {}", self.pointer, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn config_error(pointer: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { pointer: pointer.into(), message: message.into() }
}

pub fn read_value(path: Option<&Path>) -> Result<Option<Value>, ConfigError> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error("", format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| config_error("", format!("config {} is not valid JSON: {e}", path.display())))
}

/// Applies `key.sub=value`; the value is parsed as JSON and kept as a string
/// when that fails.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error("", format!("override {assignment:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    let mut pointer = String::new();
    for (i, part) in parts.iter().enumerate() {
        pointer.push('/');
        pointer.push_str(&escape_token(part));
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| config_error(pointer.clone(), format!("{part:?} is not an array index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| config_error(pointer.clone(), format!("index {idx} out of range (len {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(config_error(pointer, "cannot descend into a scalar")),
        };
    }
    Err(config_error("", "empty override key"))
}

pub fn deserialize<T: DeserializeOwned>(value: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = pointer_of(e.path());
        let message = e.into_inner().to_string();
        match split_nested(&message) {
            Some((nested, m)) => config_error(format!("{pointer}{nested}"), m),
            None => config_error(pointer, message),
        }
    })
}

/// Default config when none is given, then overrides, then typed parsing.
pub fn load<T>(path: Option<&Path>, default: T, overrides: &[String]) -> Result<T, ConfigError>
where
    T: DeserializeOwned + serde::Serialize,
{
    let mut value = match read_value(path)? {
        Some(v) => v,
        None => serde_json::to_value(default).map_err(|e| config_error("", e.to_string()))?,
    };
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    deserialize(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_follow_dotted_paths() {
        let mut v = json!({"a": {"b": 1}, "list": [1, 2]});
        apply_override(&mut v, "a.b=2.5").unwrap();
        apply_override(&mut v, "a.c=tikhonov").unwrap();
        apply_override(&mut v, "list.1=[3]").unwrap();
        assert_eq!(v, json!({"a": {"b": 2.5, "c": "tikhonov"}, "list": [1, [3]]}));
        assert!(apply_override(&mut v, "list.9=1").is_err());
        assert!(apply_override(&mut v, "noequals").is_err());
    }

    #[test]
    fn pointer_names_offending_field() {
        #[derive(serde::Deserialize, Debug)]
        #[allow(dead_code)]
        struct Inner {
            x: f64,
        }
        #[derive(serde::Deserialize, Debug)]
        #[allow(dead_code)]
        struct Outer {
            items: Vec<Inner>,
        }
        let err = deserialize::<Outer>(json!({"items": [{"x": 1.0}, {"x": "no"}]})).unwrap_err();
        assert_eq!(err.pointer, "/items/1/x");
    }
}
