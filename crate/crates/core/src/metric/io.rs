//! CSV import and export of grounds.
//!
//! `coords_csv` has a header `id,x,y[,z...]` and one row per point.
//! `distmatrix_csv` is a square numeric matrix, row-major, without header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::{MetricError, MetricGround};
use crate::{format_real, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroundFormat {
    CoordsCsv,
    DistMatrixCsv,
}

impl FromStr for GroundFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "coords_csv" | "coords" => Ok(Self::CoordsCsv),
            "distmatrix_csv" | "distmatrix" => Ok(Self::DistMatrixCsv),
            other => Err(format!(
                "unknown ground format `{other}` (expected coords_csv or distmatrix_csv)"
            )),
        }
    }
}

fn parse_field(raw: &str, line: usize) -> Result<f64, MetricError> {
    raw.trim().parse::<f64>().map_err(|e| MetricError::Parse {
        line,
        message: format!("`{raw}`: {e}"),
    })
}

fn read_records(path: &Path, has_header: bool) -> Result<Vec<(usize, csv::StringRecord)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 1 + usize::from(has_header);
        let record = record.map_err(|e| MetricError::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, record));
    }
    Ok(rows)
}

/// Loads a ground from disk. Loaded data is taken to be the whole space, so
/// the density is 0.
pub fn load_ground(path: impl AsRef<Path>, format: GroundFormat) -> Result<MetricGround> {
    let path = path.as_ref();
    match format {
        GroundFormat::CoordsCsv => {
            let mut coords = Vec::new();
            for (line, record) in read_records(path, true)? {
                if record.len() < 2 {
                    return Err(MetricError::Parse {
                        line,
                        message: "expected `id` followed by at least one coordinate".into(),
                    }
                    .into());
                }
                let point = record
                    .iter()
                    .skip(1)
                    .map(|f| parse_field(f, line))
                    .collect::<Result<Vec<_>, _>>()?;
                coords.push(point);
            }
            Ok(MetricGround::from_coords(coords, 0.0)?)
        }
        GroundFormat::DistMatrixCsv => {
            let mut rows = Vec::new();
            for (line, record) in read_records(path, false)? {
                let row = record
                    .iter()
                    .map(|f| parse_field(f, line))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            Ok(MetricGround::from_distance_matrix(rows, 0.0)?)
        }
    }
}

/// Writes `id,x,y,...`. Fails if the ground has no coordinates.
pub fn write_coords_csv(ground: &MetricGround, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let coords = ground.coords().ok_or_else(|| {
        Error::Config("ground has no coordinates; export it as a distance matrix".into())
    })?;
    let dim = coords.first().map_or(0, Vec::len);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let axes = ["x", "y", "z"];
    let mut header = String::from("id");
    for k in 0..dim {
        header.push(',');
        match axes.get(k) {
            Some(axis) => header.push_str(axis),
            None => header.push_str(&format!("x{k}")),
        }
    }
    let io = |e| Error::io(path, e);
    writeln!(out, "{header}").map_err(io)?;
    for (i, p) in coords.iter().enumerate() {
        let fields: Vec<String> = p.iter().map(|&c| format_real(c)).collect();
        writeln!(out, "{i},{}", fields.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_distmatrix_csv(ground: &MetricGround, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for i in 0..ground.len() {
        let fields: Vec<String> = ground.row(i).iter().map(|&d| format_real(d)).collect();
        writeln!(out, "{}", fields.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_coords() {
        let f = write_tmp("id,x,y\n0,0,0\n1,1,0\n2,0,1\n");
        let g = load_ground(f.path(), GroundFormat::CoordsCsv).unwrap();
        assert_eq!(g.len(), 3);
        assert!((g.dist(1, 2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.density(), 0.0);
    }

    #[test]
    fn loads_single_point() {
        let f = write_tmp("id,x,y\n0,2.5,-1\n");
        let g = load_ground(f.path(), GroundFormat::CoordsCsv).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn distmatrix_triangle_error() {
        let f = write_tmp("0,1,5\n1,0,1\n5,1,0\n");
        let err = load_ground(f.path(), GroundFormat::DistMatrixCsv).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Metric(MetricError::TriangleViolation {
                    i: 0,
                    j: 1,
                    k: 2,
                    ..
                })
            ),
            "{err}"
        );
    }

    #[test]
    fn parse_error_reports_line() {
        let f = write_tmp("id,x\n0,1.0\n1,abc\n");
        let err = load_ground(f.path(), GroundFormat::CoordsCsv).unwrap_err();
        assert!(
            matches!(err, Error::Metric(MetricError::Parse { line: 3, .. })),
            "{err}"
        );
    }

    #[test]
    fn coords_roundtrip_through_csv() {
        let g =
            MetricGround::from_coords(vec![vec![0.1, 0.2], vec![1.0 / 3.0, -2.0]], 0.0).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_coords_csv(&g, f.path()).unwrap();
        let back = load_ground(f.path(), GroundFormat::CoordsCsv).unwrap();
        assert!((back.dist(0, 1) - g.dist(0, 1)).abs() < 1e-14);
    }
}
