//! Run reports with deterministic byte-level serialization: fixed key order,
//! floats printed with 17 significant digits, newline-terminated files.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// One named check with its measured value against the tolerance.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
}

impl CheckRecord {
    /// Residual-style check: passes when measured <= tolerance.
    pub fn max(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            status: if measured <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
            measured,
            tolerance,
        }
    }

    /// Threshold-style check: passes when measured >= bound.
    pub fn min(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        CheckRecord {
            name: name.into(),
            status: if measured >= bound {
                Status::Pass
            } else {
                Status::Fail
            },
            measured,
            tolerance: bound,
        }
    }

    /// Boolean check; measured carries an informative value.
    pub fn flag(name: impl Into<String>, ok: bool, measured: f64) -> Self {
        CheckRecord {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            tolerance: 0.0,
        }
    }
}

/// Extra key/value payload attached to a report (records, tables).
#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Int(i64),
    Str(String),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub family: Option<String>,
    pub seed: u64,
    pub config_sha256: String,
    pub code_version: String,
    pub checks: Vec<CheckRecord>,
    pub payload: Vec<(String, Value)>,
}

impl RunReport {
    pub fn overall_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// Deterministic JSON with 17-significant-digit floats.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str("  \"schema\": 1,\n");
        let _ = writeln!(out, "  \"command\": {},", quote(&self.command));
        match &self.family {
            Some(f) => {
                let _ = writeln!(out, "  \"family\": {},", quote(f));
            }
            None => out.push_str("  \"family\": null,\n"),
        }
        let _ = writeln!(out, "  \"seed\": {},", self.seed);
        let _ = writeln!(out, "  \"config_sha256\": {},", quote(&self.config_sha256));
        let _ = writeln!(out, "  \"code_version\": {},", quote(&self.code_version));
        out.push_str("  \"checks\": [\n");
        for (i, c) in self.checks.iter().enumerate() {
            let _ = write!(
                out,
                "    {{\"name\": {}, \"status\": {}, \"measured\": {}, \"tolerance\": {}}}",
                quote(&c.name),
                quote(c.status.as_str()),
                fmt_f64(c.measured),
                fmt_f64(c.tolerance)
            );
            out.push_str(if i + 1 < self.checks.len() {
                ",\n"
            } else {
                "\n"
            });
        }
        out.push_str("  ],\n");
        for (key, value) in &self.payload {
            let _ = write!(out, "  {}: ", quote(key));
            write_value(&mut out, value, 1);
            out.push_str(",\n");
        }
        let _ = writeln!(
            out,
            "  \"overall\": {}",
            quote(if self.overall_pass() { "pass" } else { "fail" })
        );
        out.push_str("}\n");
        out
    }
}

/// 17 significant digits, scientific notation; stable across runs.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "\"nan\"".to_string()
        } else if v > 0.0 {
            "\"inf\"".to_string()
        } else {
            "\"-inf\"".to_string()
        };
    }
    format!("{v:.16e}")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Num(x) => out.push_str(&fmt_f64(*x)),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Str(s) => out.push_str(&quote(s)),
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, depth + 1);
            }
            out.push(']');
        }
        Value::Map(entries) => {
            out.push('{');
            for (i, (k, val)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&quote(k));
                out.push_str(": ");
                write_value(out, val, depth + 1);
            }
            out.push('}');
        }
    }
}

/// CSV with a fixed header and 17-significant-digit floats.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
