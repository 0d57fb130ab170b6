//! Number formatting and the JSON envelope.

use std::io::Write;

use serde_json::{json, Map, Value};
use stl_distance::{Error, Rational, Scalar};

pub const SCHEMA: &str = "stldist/1";

/// Decimal text, exact when it terminates within twelve places.
pub fn text(q: &Rational) -> String {
    let exact = q.to_decimal_string();
    match exact.split_once('.') {
        Some((_, frac)) if frac.len() > 12 => {
            let rounded = format!("{:.12}", q.to_f64_lossy());
            rounded.trim_end_matches('0').trim_end_matches('.').to_string()
        }
        _ => exact,
    }
}

pub fn number(q: &Rational) -> Value {
    json!(q.to_f64_lossy())
}

/// `{"schema": ..., "command": ..., fields...}`.
pub fn envelope(command: &str, fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    if let Value::Object(rest) = fields {
        map.extend(rest);
    }
    Value::Object(map)
}

/// Ignores write errors so a closed pipe ends the output quietly.
pub fn print_json(value: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(value).expect("serializable"));
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptyLanguage(_) => 3,
        Error::BudgetExceeded { .. } => 4,
        _ => 2,
    }
}

/// Left-aligned text table.
pub fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
