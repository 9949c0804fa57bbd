//! CSV formats: points files, vertex functions, edge lists and the
//! convergence report files. All floats are written in shortest
//! round-trip decimal so identical runs produce identical bytes.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::numerics::format_f64;

/// Read a points CSV with header `x0,x1,...,x{d-1}`, one point per row.
pub fn read_points_csv(path: &Path) -> Result<Array2<f64>> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => {
            return Err(Error::CsvParse {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let dim = header.split(',').count();
    for (k, col) in header.split(',').enumerate() {
        if col.trim() != format!("x{k}") {
            return Err(Error::CsvParse {
                line: 1,
                message: format!("expected header column x{k}, got '{col}'"),
            });
        }
    }
    let mut rows: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim {
            return Err(Error::CsvParse {
                line: lineno + 2,
                message: format!("expected {dim} fields, got {}", fields.len()),
            });
        }
        for f in fields {
            rows.push(f.trim().parse::<f64>().map_err(|e| Error::CsvParse {
                line: lineno + 2,
                message: e.to_string(),
            })?);
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::CsvParse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Array2::from_shape_vec((count, dim), rows)
        .map_err(|e| Error::Config(format!("shape error: {e}")))
}

pub fn write_points_csv(path: &Path, points: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    let dim = points.ncols();
    let header: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..points.nrows() {
        let row: Vec<String> = (0..dim).map(|d| format_f64(points[[i, d]])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Read a vertex function CSV with header `i,value`.
pub fn read_vertex_function_csv(path: &Path, n: usize) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path)?;
    let mut values = vec![f64::NAN; n];
    let mut seen = vec![false; n];
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line.trim() != "i,value" {
                return Err(Error::CsvParse {
                    line: 1,
                    message: format!("expected header 'i,value', got '{line}'"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::CsvParse {
                line: lineno + 1,
                message: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        let i: usize = fields[0].trim().parse().map_err(|e: std::num::ParseIntError| {
            Error::CsvParse {
                line: lineno + 1,
                message: e.to_string(),
            }
        })?;
        let v: f64 = fields[1].trim().parse().map_err(|e: std::num::ParseFloatError| {
            Error::CsvParse {
                line: lineno + 1,
                message: e.to_string(),
            }
        })?;
        if i >= n {
            return Err(Error::CsvParse {
                line: lineno + 1,
                message: format!("index {i} out of range for {n} vertices"),
            });
        }
        values[i] = v;
        seen[i] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::CsvParse {
            line: 0,
            message: format!("no value for vertex {missing}"),
        });
    }
    Ok(values)
}

pub fn write_vertex_function_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::from("i,value\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", format_f64(*v)));
    }
    write_atomic(path, &out)
}

/// Edge-list CSV `i,j,w` with 0-based indices and a header line.
/// Symmetric graphs are written with canonical rows i < j.
pub fn write_edge_list_csv(
    path: &Path,
    edges: impl Iterator<Item = (usize, usize, f64)>,
) -> Result<()> {
    let mut out = String::from("i,j,w\n");
    for (i, j, w) in edges {
        out.push_str(&format!("{i},{j},{}\n", format_f64(w)));
    }
    write_atomic(path, &out)
}

/// Read an edge list back as (i, j, w) triplets.
pub fn read_edge_list_csv(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let file = std::fs::File::open(path)?;
    let mut triplets = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line.trim() != "i,j,w" {
                return Err(Error::CsvParse {
                    line: 1,
                    message: format!("expected header 'i,j,w', got '{line}'"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::CsvParse {
                line: lineno + 1,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parse_idx = |s: &str| -> Result<usize> {
            s.trim().parse().map_err(|e: std::num::ParseIntError| Error::CsvParse {
                line: lineno + 1,
                message: e.to_string(),
            })
        };
        let w: f64 = fields[2].trim().parse().map_err(|e: std::num::ParseFloatError| {
            Error::CsvParse {
                line: lineno + 1,
                message: e.to_string(),
            }
        })?;
        triplets.push((parse_idx(fields[0])?, parse_idx(fields[1])?, w));
    }
    Ok(triplets)
}

pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(contents.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn points_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        let pts = array![[0.1, -2.5], [3.25, 1e-17], [f64::MIN_POSITIVE, 7.0]];
        write_points_csv(&path, &pts).unwrap();
        let back = read_points_csv(&path).unwrap();
        assert_eq!(pts, back);
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_points_csv(&path).is_err());
    }

    #[test]
    fn empty_points_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        std::fs::write(&path, "").unwrap();
        assert!(read_points_csv(&path).is_err());
        std::fs::write(&path, "x0,x1\n").unwrap();
        assert!(read_points_csv(&path).is_err());
    }

    #[test]
    fn vertex_function_roundtrip_and_missing_value() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_vertex_function_csv(&path, &[1.5, -0.25, 1e300]).unwrap();
        let back = read_vertex_function_csv(&path, 3).unwrap();
        assert_eq!(back, vec![1.5, -0.25, 1e300]);
        std::fs::write(&path, "i,value\n0,1.0\n2,2.0\n").unwrap();
        assert!(read_vertex_function_csv(&path, 3).is_err());
    }

    proptest! {
        #[test]
        fn edge_list_roundtrips_exact_doubles(
            edges in prop::collection::vec((0usize..50, 0usize..50, 0.0f64..10.0), 1..40)
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("e.csv");
            write_edge_list_csv(&path, edges.iter().copied()).unwrap();
            let back = read_edge_list_csv(&path).unwrap();
            prop_assert_eq!(edges, back);
        }
    }
}
