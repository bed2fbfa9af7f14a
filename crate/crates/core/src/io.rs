//! Canonical number formatting, canonical JSON and content hashing.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Floats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON text with sorted keys and every float at 17 significant digits.
pub fn canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// Hex SHA-256 of the canonical JSON form.
pub fn content_hash<T: Serialize>(value: &T) -> serde_json::Result<String> {
    Ok(hex::encode(Sha256::digest(canonical_json(value)?.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_form_sorts_keys_and_fixes_floats() {
        let v = json!({"b": 0.1, "a": [1, 2.5, "x"], "c": {"z": null, "y": true}});
        assert_eq!(
            canonical_json(&v).unwrap(),
            r#"{"a":[1,2.5000000000000000e0,"x"],"b":1.0000000000000001e-1,"c":{"y":true,"z":null}}"#
        );
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = json!({"x": 1.0, "y": [1, 2]});
        let b: Value = serde_json::from_str(r#"{"y":[1,2],"x":1.0}"#).unwrap();
        assert_eq!(content_hash(&a).unwrap(), content_hash(&b).unwrap());
        assert_ne!(content_hash(&a).unwrap(), content_hash(&json!({"x": 2.0})).unwrap());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }
}
