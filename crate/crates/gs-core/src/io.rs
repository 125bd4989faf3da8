//! Field serialization: a one-line JSON header (n, k, N, Nt, L, lambda0)
//! followed by the raw little-endian f64 payload in row-major order with
//! the time level outermost; plus CSV export of single time slices.

use crate::error::{GsError, Result};
use crate::grid::{GridGeometry, SpaceTimeField};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn write_field(path: &Path, field: &SpaceTimeField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let header = serde_json::to_string(&field.geom)
        .map_err(|e| GsError::Format(format!("header encode: {e}")))?;
    w.write_all(header.as_bytes())?;
    w.write_all(b"\n")?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SpaceTimeField> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let geom: GridGeometry = serde_json::from_str(header.trim())
        .map_err(|e| GsError::Format(format!("bad field header: {e}")))?;
    let expected = geom.total_points();
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != expected * 8 {
        return Err(GsError::Format(format!(
            "field payload holds {} bytes, geometry needs {}",
            payload.len(),
            expected * 8
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SpaceTimeField::from_values(geom, values)
}

/// One CSV row per spatial point of the chosen time slice: the spatial
/// coordinates followed by the field value.
pub fn write_slice_csv<W: Write>(out: &mut W, field: &SpaceTimeField, level: usize) -> Result<()> {
    let g = &field.geom;
    if level >= g.levels() {
        return Err(GsError::domain(format!(
            "slice level {level} out of range (0..{})",
            g.levels()
        )));
    }
    let mut header: Vec<String> = (1..=g.n).map(|i| format!("x{i}")).collect();
    header.push("value".to_string());
    writeln!(out, "{}", header.join(","))?;
    for sp in 0..g.spatial_points() {
        let coords = g.coords_of(sp);
        let mut row: Vec<String> = coords.iter().map(|c| format!("{c:.17e}")).collect();
        row.push(format!("{:.17e}", field.get(level, sp)));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn field_round_trip() {
        let g = GridGeometry::new(2, 1, 8, 3, 2.0 * PI, 0.5).unwrap();
        let u = SpaceTimeField::from_fn(g, |level, sp| (level * 100 + sp) as f64 * 0.25 - 3.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.gsfield");
        write_field(&path, &u).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.geom, g);
        assert_eq!(back.values(), u.values());
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = GridGeometry::new(2, 1, 8, 3, 2.0 * PI, 0.5).unwrap();
        let u = SpaceTimeField::zeros(g);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.gsfield");
        write_field(&path, &u).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(read_field(&path).is_err());
    }

    #[test]
    fn csv_slice_has_headers_and_rows() {
        let g = GridGeometry::new(2, 1, 4, 3, 1.0, 0.5).unwrap();
        let u = SpaceTimeField::constant(g, 1.5);
        let mut buf = Vec::new();
        write_slice_csv(&mut buf, &u, 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,value");
        assert_eq!(text.lines().count(), 1 + 16);
        assert!(write_slice_csv(&mut Vec::new(), &u, 99).is_err());
    }
}
