//! Byte-stable JSON: sorted keys, two-space indent, every float printed with
//! nine significant digits (round half to even on the binary value).

use serde_json::Value;

const SIG_DIGITS: usize = 9;

/// Nine-significant-digit rendering of `v`, plain decimal for exponents in
/// `[-6, 15)`, scientific otherwise. Non-finite values render as `null`.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if !(-6..15).contains(&exp) {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        trim_fraction(&mut m);
        return format!("{sign}{m}e{exp}");
    }
    let mut out = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{}{}", digits, "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    };
    trim_fraction(&mut out);
    format!("{sign}{out}")
}

fn trim_fraction(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[k], indent + 1);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_f64(24.543692606170257), "24.5436926");
        assert_eq!(format_f64(124.63593901570835), "124.635939");
        assert_eq!(format_f64(1.0), "1");
        assert_eq!(format_f64(-0.0), "0");
        assert_eq!(format_f64(233.33333333333334), "233.333333");
        assert_eq!(format_f64(0.065306122448979), "0.0653061224");
        assert_eq!(format_f64(1.5e-9), "1.5e-9");
        assert_eq!(format_f64(2.0e20), "2e20");
        assert_eq!(format_f64(150.0), "150");
        assert_eq!(format_f64(f64::NAN), "null");
    }

    #[test]
    fn ties_round_to_even() {
        // exactly representable ties at the tenth digit
        assert_eq!(format_f64(1_234_567_885.0), "1234567880");
        assert_eq!(format_f64(1_234_567_895.0), "1234567900");
        assert_eq!(format_f64(0.5), "0.5");
    }

    #[test]
    fn output_is_parseable_json() {
        let v = json!({"b": [1.0, 2.5, {"z": null, "a": "x"}], "a": 1e-12, "n": 7});
        let s = to_string(&v);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"][1], json!(2.5));
        assert_eq!(back["n"], json!(7));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }
}
