//! Number formatting, summaries and CSV tables.
//!
//! Summaries and CSV files share [`fmt_sig`], so a value printed to the
//! terminal is the same string that lands in the file.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

const SIG_DIGITS: usize = 9;

/// Render `v` with nine significant digits, `%.9g` style: fixed notation for
/// moderate exponents, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One summary entry.
#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Num(v) => fmt_sig(*v),
            Value::Text(s) => s.clone(),
        }
    }
}

/// Ordered `quantity -> value` pairs for single-point commands.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    entries: Vec<(String, Value)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, key: impl Into<String>, v: f64) -> &mut Self {
        self.entries.push((key.into(), Value::Num(v)));
        self
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), Value::Text(v.into())));
        self
    }

    pub fn render(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k:<width$}  {}", v.render());
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k},{}", csv_field(&v.render()));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Column-oriented table: first column is the swept variable.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(x: &str, curves: impl IntoIterator<Item = String>) -> Self {
        let mut columns = vec![x.to_string()];
        columns.extend(curves);
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_sig(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Per-curve peak (`argmax x`, max), skipping NaN cells.
    pub fn peaks(&self) -> Vec<(String, f64, f64)> {
        (1..self.columns.len())
            .map(|c| {
                let best = self
                    .rows
                    .iter()
                    .filter(|r| !r[c].is_nan())
                    .max_by(|a, b| a[c].total_cmp(&b[c]));
                match best {
                    Some(r) => (self.columns[c].clone(), r[0], r[c]),
                    None => (self.columns[c].clone(), f64::NAN, f64::NAN),
                }
            })
            .collect()
    }
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)
}
