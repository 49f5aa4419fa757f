use std::path::Path;

use serde::Serialize;

use super::FlowmapRecord;
use crate::error::{Error, Result};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Writes the rows as CSV with columns `n,eps,d0_norm,sup_diff,status`.
pub fn write_flowmap_csv(record: &FlowmapRecord, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(["n", "eps", "d0_norm", "sup_diff", "status"]).map_err(|e| io_err(path, e))?;
    for r in &record.rows {
        w.write_record([
            r.n.to_string(),
            format!("{:e}", r.eps),
            format!("{:e}", r.d0_norm),
            format!("{:e}", r.sup_diff),
            r.status.clone(),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Pretty JSON of any report.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}
