//! Input-file parsing: integer datasets (line-oriented or JSON arrays) and
//! real coordinate rows for clustering.

use std::fs;
use std::path::Path;

use qumin_core::{Error, Result};

/// Read an unsigned-integer dataset. Files ending in `.json` must hold a
/// JSON array of unsigned integers; anything else is parsed line by line,
/// one decimal integer per nonempty line.
pub fn read_dataset(path: &Path) -> Result<Vec<u64>> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|ext| ext == "json") {
        return serde_json::from_str(&text).map_err(|e| {
            Error::InvalidInput(format!("{}: not a JSON array of unsigned integers: {e}", path.display()))
        });
    }
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = trimmed.parse::<u64>().map_err(|_| {
            Error::InvalidInput(format!(
                "{}: line {}: {trimmed:?} is not an unsigned integer",
                path.display(),
                lineno + 1
            ))
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no values found", path.display())));
    }
    Ok(values)
}

/// Read coordinate rows: comma-separated real columns, one point per line.
/// Every row must have the same number of columns (at least one).
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row = trimmed
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!(
                        "{}: row {}: {cell:?} is not a number",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no points found", path.display())));
    }
    let dim = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::InvalidInput(format!(
            "{}: row {} has {} columns, expected {dim}",
            path.display(),
            bad + 1,
            rows[bad].len()
        )));
    }
    Ok(rows)
}
