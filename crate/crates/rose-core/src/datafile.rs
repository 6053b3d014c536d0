//! Plain-text two-column data files: `# key = value` header lines followed
//! by whitespace-separated rows formatted with C's `%.12g` semantics.
//! Parsing then re-emitting a file produced here is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One output table: ordered header metadata plus (x, y) rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub header: Vec<(String, String)>,
    pub rows: Vec<(f64, f64)>,
}

impl DataFile {
    pub fn new() -> Self {
        DataFile {
            header: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(mut self, key: &str, value: impl ToString) -> Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Renders the file exactly as it appears on disk.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.header {
            let _ = writeln!(out, "# {key} = {value}");
        }
        for &(x, y) in &self.rows {
            let _ = writeln!(out, "{} {}", format_g12(x), format_g12(y));
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut file = DataFile::new();
        let mut in_header = true;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if !in_header {
                    return Err(Error::Parse(format!(
                        "line {}: header line after data rows",
                        lineno + 1
                    )));
                }
                let (key, value) = comment.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("line {}: header line without '='", lineno + 1))
                })?;
                file.header
                    .push((key.trim().to_string(), value.trim().to_string()));
                continue;
            }
            in_header = false;
            let mut fields = line.split_whitespace();
            let x = fields.next().and_then(|f| f.parse::<f64>().ok());
            let y = fields.next().and_then(|f| f.parse::<f64>().ok());
            match (x, y, fields.next()) {
                (Some(x), Some(y), None) => file.rows.push((x, y)),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected two numeric columns, got {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(file)
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

impl Default for DataFile {
    fn default() -> Self {
        Self::new()
    }
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// scientific notation outside [1e−5, 1e12) with two-digit exponents.
pub fn format_g12(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if value.is_nan() {
        return "nan".to_string();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let formatted = format!("{value:.11e}");
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("exponential format always contains 'e'");
    let exp: i32 = exponent.parse().expect("exponent is an integer");
    if exp >= -4 && exp < 12 {
        // fixed notation with 12 − 1 − exp digits after the point
        let decimals = (11 - exp) as usize;
        let fixed = format!("{value:.decimals$}");
        trim_trailing_zeros(&fixed).to_string()
    } else {
        let mantissa = trim_trailing_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_trailing_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
