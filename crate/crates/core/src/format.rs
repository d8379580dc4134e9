//! Float formatting for tables and JSON: nine significant digits.

use serde::Serialize;
use serde_json::Value;

pub const SIG_DIGITS: usize = 9;

/// Rounds `x` to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap()
}

/// Shortest decimal text of `x` rounded to nine significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    // Rust prints the shortest representation that round-trips.
    format!("{r}")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to nine significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt_sig(0.123456789123), "0.123456789");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666667");
        assert_eq!(fmt_sig(70.0), "70");
        assert_eq!(fmt_sig(-1234567891.0), "-1234567890");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.5e-7), "0.00000015");
    }

    #[test]
    fn json_floats_rounded() {
        let text = to_json_string(&serde_json::json!({"a": [1.0 / 3.0, 7], "b": {"c": 0.1 + 0.2}})).unwrap();
        assert!(text.contains("0.333333333"), "{text}");
        assert!(text.contains("\"c\": 0.3\n"), "{text}");
    }
}
