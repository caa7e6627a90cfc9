//! Output formatting: floats rounded to six significant digits, keys in
//! sorted order, and a plain-text table rendering of the same report.

use std::fmt::Write as _;

use serde_json::Value;

use crate::{Format, OutputArgs};

/// Rounds `x` to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(sig6).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn render(mut value: Value, format: Format) -> String {
    round_floats(&mut value);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            table(&value, 0, &mut s);
            s
        }
    }
}

pub fn emit(value: Value, output: &OutputArgs) -> Result<(), String> {
    let text = render(value, output.format);
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            items.iter().map(cell).collect::<Vec<_>>().join(" ")
        }
        other => other.to_string(),
    }
}

fn is_record_list(items: &[Value]) -> bool {
    !items.is_empty() && items.iter().all(Value::is_object)
}

fn table(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let Value::Object(map) = v else {
        let _ = writeln!(out, "{pad}{}", cell(v));
        return;
    };
    for (key, val) in map {
        match val {
            Value::Object(_) => {
                let _ = writeln!(out, "{pad}{key}:");
                table(val, indent + 2, out);
            }
            Value::Array(items) if is_record_list(items) => {
                let _ = writeln!(out, "{pad}{key}:");
                let mut cols: Vec<&String> = Vec::new();
                for item in items {
                    for k in item.as_object().expect("record").keys() {
                        if !cols.contains(&k) {
                            cols.push(k);
                        }
                    }
                }
                let rows: Vec<Vec<String>> = items
                    .iter()
                    .map(|item| cols.iter().map(|c| item.get(c.as_str()).map_or("-".into(), cell)).collect())
                    .collect();
                let widths: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| rows.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
                    .collect();
                let line = |cells: Vec<String>| -> String {
                    let parts: Vec<String> =
                        cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
                    format!("{pad}  {}", parts.join("  ").trim_end())
                };
                let _ = writeln!(out, "{}", line(cols.iter().map(|c| c.to_string()).collect()));
                for r in rows {
                    let _ = writeln!(out, "{}", line(r));
                }
            }
            Value::Array(items) if items.iter().any(Value::is_array) => {
                let _ = writeln!(out, "{pad}{key}:");
                for item in items {
                    let _ = writeln!(out, "{pad}  {}", cell(item));
                }
            }
            _ => {
                let _ = writeln!(out, "{pad}{key}: {}", cell(val));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.562161234), 0.562161);
        assert_eq!(sig6(123456789.0), 123457000.0);
        assert_eq!(sig6(1.5e-9), 1.5e-9);
        let s = render(json!({"b": 0.1234567, "a": 1}), Format::Json);
        assert_eq!(s, "{\n  \"a\": 1,\n  \"b\": 0.123457\n}\n");
    }

    #[test]
    fn table_layout() {
        let v = json!({"name": "x", "rows": [{"label": "xy", "values": [0, 1]}, {"label": "1", "values": [1, 1]}]});
        let s = render(v, Format::Table);
        assert_eq!(s, "name: x\nrows:\n  label  values\n  xy     0 1\n  1      1 1\n");
    }
}
