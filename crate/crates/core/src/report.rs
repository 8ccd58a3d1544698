//! Deterministic report serialization.
//!
//! JSON reports have sorted keys and floats rounded to 12 significant
//! digits; counts stay exact integers. Identical inputs give byte-identical
//! output.

use std::io::Write;

use serde::{Serialize, Serializer};
use serde_json::{Number, Value};

use crate::error::Result;
use crate::spectral::GrowthProfile;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Serializes non-finite floats as the strings `inf`, `-inf` or `nan`.
pub fn serialize_extended_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn canonicalize(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_significant).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

pub fn to_canonical_value<T: Serialize>(report: &T) -> Result<Value> {
    let mut value = serde_json::to_value(report)?;
    canonicalize(&mut value);
    Ok(value)
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(report: &T) -> Result<String> {
    let value = to_canonical_value(report)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

fn csv_float(v: Option<f64>) -> String {
    v.map(|x| format!("{}", round_significant(x))).unwrap_or_default()
}

/// One row per `n`: `n, beta, gamma, omega_root, omega_ratio`.
pub fn write_profile_csv<W: Write>(profile: &GrowthProfile, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "beta", "gamma", "omega_root", "omega_ratio"])?;
    for n in 0..profile.beta.len() {
        w.write_record([
            n.to_string(),
            profile.beta[n].to_string(),
            profile.gamma[n].to_string(),
            csv_float(profile.omega_root[n]),
            csv_float(profile.omega_ratio[n]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_significant(2.0), 2.0);
        assert_eq!(round_significant(-123456.78901234567), -123456.789012);
    }

    #[test]
    fn keys_sorted_and_integers_exact() {
        let v = json!({"zeta": 1u64 << 60, "alpha": [0.1 + 0.2], "mid": {"b": 1, "a": 2}});
        let text = to_canonical_json(&v).unwrap();
        assert!(text.find("alpha").unwrap() < text.find("mid").unwrap());
        assert!(text.contains("1152921504606846976"));
        assert!(text.contains("0.3"));
        assert!(!text.contains("0.30000000000000004"));
    }

    #[test]
    fn profile_csv_rows() {
        let p = GrowthProfile::from_gamma(vec![1, 2, 2], true).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "n,beta,gamma,omega_root,omega_ratio");
        assert_eq!(lines[1], "0,1,1,,2");
        assert_eq!(lines[3], "2,5,2,2.2360679775,");
    }
}
