//! Deterministic JSON rendering helpers.
//!
//! Reports must be byte-identical across runs: floats are rounded to 12
//! significant digits before serialization, object keys are sorted (the
//! default `serde_json` map is a BTree map), and non-finite values are
//! encoded as the strings `"inf"`, `"-inf"`, `"nan"` rather than JSON
//! `null`, so that an infinity marker survives a round-trip unambiguously.

use serde_json::Value;

/// Current report schema version, embedded in every top-level report.
pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

/// JSON value for a float: rounded number, or a string marker when
/// non-finite.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::json!(round_sig(x))
    }
}

/// JSON array of rounded floats.
pub fn num_array(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Optional float: `null` when absent, otherwise [`num`].
pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

/// Wraps a payload with the schema version.
pub fn versioned(kind: &str, payload: Value) -> Value {
    serde_json::json!({
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "report": payload,
    })
}

/// Serializes with sorted keys and a trailing newline.
pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_idempotent_and_significant() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(round_sig(1.0 / 3.0)), round_sig(1.0 / 3.0));
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-2.5e-15), -2.5e-15);
    }

    #[test]
    fn non_finite_become_strings() {
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(num(f64::NEG_INFINITY), Value::String("-inf".into()));
        assert_eq!(num(f64::NAN), Value::String("nan".into()));
    }

    #[test]
    fn keys_are_sorted() {
        let v = serde_json::json!({"zeta": 1, "alpha": 2});
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"alpha":2,"zeta":1}"#);
    }

    #[test]
    fn render_is_deterministic() {
        let v = versioned("test", serde_json::json!({"b": num(0.1 + 0.2), "a": [1, 2]}));
        assert_eq!(render(&v), render(&v.clone()));
        assert!(render(&v).contains("0.3"));
    }
}
