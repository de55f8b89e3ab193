//! Converts result CSV files into gnuplot data files.

use std::path::Path;

use crate::bundle::write_atomic;
use crate::error::{AppError, AppResult};

/// Whitespace-separated columns with a `#` header. Text cells are quoted
/// and a blank line separates blocks of equal first-column value, which
/// gnuplot reads as grid scan lines.
pub fn csv_to_gnuplot(csv_text: &str) -> AppResult<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header = reader.headers().map_err(|e| AppError::Config(format!("CSV header: {e}")))?.clone();
    let mut out = String::from("#");
    for h in header.iter() {
        out.push_str(&format!(" \"{h}\""));
    }
    out.push('\n');
    let mut previous: Option<String> = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| AppError::Config(format!("CSV row {}: {e}", line + 2)))?;
        let first = record.get(0).unwrap_or_default().to_string();
        if header.len() >= 3 && previous.as_ref().is_some_and(|p| *p != first) {
            out.push('\n');
        }
        let cells: Vec<String> = record
            .iter()
            .map(|c| match c.parse::<f64>() {
                Ok(_) => c.to_string(),
                Err(_) if c.is_empty() => "NaN".to_string(),
                Err(_) => format!("\"{c}\""),
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
        previous = Some(first);
    }
    Ok(out)
}

/// Reads `input` and writes the gnuplot form to `output`.
pub fn convert(input: &Path, output: &Path) -> AppResult<()> {
    let text = std::fs::read_to_string(input).map_err(|e| AppError::io(input, e))?;
    write_atomic(output, csv_to_gnuplot(&text)?.as_bytes())
}
