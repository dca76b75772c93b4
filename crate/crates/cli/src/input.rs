//! Ingestion of one-value-per-line CSV files.

use std::io::Read;
use std::path::Path;

use crate::error::CliError;

/// Reads a value file; `-` means standard input.
pub fn read_values(path: &Path) -> Result<Vec<f64>, CliError> {
    let source = path.display().to_string();
    let text = if source == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {source}: {e}")))?
    };
    parse_values(&text, &source)
}

/// Parses the first field of every non-blank line as a number.
///
/// A non-numeric first token on the first non-blank line is taken as a
/// header and skipped. Any other unparsable or non-finite value is an error
/// naming its line.
pub fn parse_values(text: &str, source: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    let mut seen_first = false;
    for (idx, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() && line.trim().is_empty() {
            continue;
        }
        let first = !seen_first;
        seen_first = true;
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(CliError::Input(format!(
                    "{source}:{}: value {v} is not finite",
                    idx + 1
                )))
            }
            Err(_) if first && !looks_numeric(field) => {}
            Err(_) => {
                return Err(CliError::Input(format!(
                    "{source}:{}: cannot parse {field:?} as a number",
                    idx + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Input(format!("{source}: no numeric values")));
    }
    Ok(values)
}

/// Tokens that start like a number are never treated as a header.
fn looks_numeric(token: &str) -> bool {
    let t = token.trim_start_matches(['+', '-']);
    t.starts_with(|c: char| c.is_ascii_digit() || c == '.')
}
