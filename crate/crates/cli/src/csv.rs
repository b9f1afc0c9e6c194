//! Deterministic CSV rendering: `filename` first, one column per metric, an
//! `error` column only when some row carries an error note.

use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub filename: String,
    /// One cell per metric; NaN renders as an empty cell.
    pub values: Vec<f64>,
    pub error: Option<String>,
}

/// Six significant digits in the style of C's `%g`: scientific notation when
/// the decimal exponent is below -4 or at least 6, trailing zeros removed.
/// NaN becomes the empty string.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Quotes a field when it contains a comma, quote or line break.
pub fn escape_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(mut out: W, metrics: &[&str], rows: &[ResultRow]) -> std::io::Result<()> {
    let with_errors = rows.iter().any(|r| r.error.is_some());
    let mut line = String::from("filename");
    for m in metrics {
        line.push(',');
        line.push_str(&escape_field(m));
    }
    if with_errors {
        line.push_str(",error");
    }
    line.push('\n');
    out.write_all(line.as_bytes())?;
    for row in rows {
        line.clear();
        line.push_str(&escape_field(&row.filename));
        for &v in &row.values {
            line.push(',');
            line.push_str(&format_value(v));
        }
        if with_errors {
            line.push(',');
            line.push_str(&escape_field(row.error.as_deref().unwrap_or("")));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}
