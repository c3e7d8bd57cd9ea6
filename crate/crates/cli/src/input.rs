//! CSV ingestion.

use std::path::Path;

use anyhow::{bail, Context, Result};
use lpsens::DenseMatrix;

/// Reads a comma-separated numeric matrix. A first line whose first field is
/// not a number is treated as a header and skipped.
pub fn load_csv(path: &Path) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_csv(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && width.is_none() && fields[0].parse::<f64>().is_err() {
            // header
            width = Some(fields.len());
            continue;
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| anyhow::anyhow!("line {line_no}, column {}: {field:?} is not a number", col + 1))?;
            if !v.is_finite() {
                bail!("line {line_no}, column {}: {field:?} is not finite", col + 1);
            }
            row.push(v);
        }
        match width {
            Some(w) if w != row.len() => {
                bail!("line {line_no}: expected {w} fields, found {}", row.len())
            }
            _ => width = Some(row.len()),
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no numeric rows found");
    }
    Ok(DenseMatrix::from_rows(&rows)?)
}
