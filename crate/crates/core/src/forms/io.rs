//! Cochain CSV: one row per (cell, component) with header
//! `cell_id,component,value`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Row {
    cell_id: usize,
    component: usize,
    value: f64,
}

/// Write one or more component cochains of equal length.
pub fn write_cochain_csv<W: Write>(w: W, comps: &[&[f64]]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (k, comp) in comps.iter().enumerate() {
        for (i, &v) in comp.iter().enumerate() {
            out.serialize(Row { cell_id: i, component: k, value: v })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Read component cochains back; every (cell, component) pair must appear
/// exactly once.
pub fn read_cochain_csv<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: Row = row?;
        rows.push(row);
    }
    let ncomp = rows.iter().map(|r| r.component + 1).max().unwrap_or(0);
    let ncell = rows.iter().map(|r| r.cell_id + 1).max().unwrap_or(0);
    let mut out = vec![vec![f64::NAN; ncell]; ncomp];
    let mut seen = vec![vec![false; ncell]; ncomp];
    for r in rows {
        if seen[r.component][r.cell_id] {
            return Err(Error::InvalidMesh(format!("duplicate cochain entry ({}, {})", r.cell_id, r.component)));
        }
        seen[r.component][r.cell_id] = true;
        out[r.component][r.cell_id] = r.value;
    }
    if seen.iter().flatten().any(|s| !s) {
        return Err(Error::InvalidMesh("cochain file has missing entries".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let a = [0.1, -2.5e-17, 3.0, f64::MAX];
        let b = [1.0, 2.0, 3.0, 4.0];
        let mut buf = Vec::new();
        write_cochain_csv(&mut buf, &[&a, &b]).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("cell_id,component,value\n"));
        let back = read_cochain_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![a.to_vec(), b.to_vec()]);
    }

    #[test]
    fn missing_entry_rejected() {
        let text = "cell_id,component,value\n0,0,1.0\n2,0,1.0\n";
        assert!(read_cochain_csv(text.as_bytes()).is_err());
    }
}
