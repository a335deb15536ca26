//! JSON text with floats in the fixed `{:.16e}` layout used by the CSV tables.

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub fn to_line<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&mageo::table::fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_fixed_layout() {
        let s = to_line(&serde_json::json!({"a": 0.5, "b": [1, -2.0], "c": "x\"y", "d": null})).unwrap();
        assert_eq!(s, r#"{"a":5.0000000000000000e-1,"b":[1,-2.0000000000000000e0],"c":"x\"y","d":null}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"], 0.5);
    }
}
