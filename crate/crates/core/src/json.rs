//! JSON-pointer aware deserialization helpers.
//!
//! Internally tagged enums buffer their content, which hides the location of
//! a bad field. Types deserialized through [`from_tagged`] report nested errors
//! as `"/field: message"` so a caller can extend its own pointer.

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// RFC 6901 pointer for a `serde_path_to_error` path.
pub fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&escape_token(key)),
            Segment::Enum { variant } => out.push_str(&escape_token(variant)),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn escape_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

/// Splits a nested error message produced by [`from_tagged`] into
/// `(relative pointer, message)`.
pub fn split_nested(message: &str) -> Option<(&str, &str)> {
    if !message.starts_with('/') {
        return None;
    }
    message.split_once(": ")
}

/// Deserializes `value`, prefixing any error with the pointer of the field.
pub fn with_pointer<T: DeserializeOwned>(value: Value) -> Result<T, String> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = pointer_of(e.path());
        let inner = e.into_inner().to_string();
        match split_nested(&inner) {
            Some((p, m)) => format!("{pointer}{p}: {m}"),
            None if pointer.is_empty() => inner,
            None => format!("{pointer}: {inner}"),
        }
    })
}

/// Removes the string tag `tag` from an object, returning it with the rest.
pub fn from_tagged(value: Value, tag: &str) -> Result<(String, Value), String> {
    let mut map: Map<String, Value> = match value {
        Value::Object(m) => m,
        other => return Err(format!("expected an object, got {other}")),
    };
    match map.remove(tag) {
        Some(Value::String(kind)) => Ok((kind, Value::Object(map))),
        Some(other) => Err(format!("/{tag}: expected a string, got {other}")),
        None => Err(format!("missing field `{tag}`")),
    }
}
