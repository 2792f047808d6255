//! Matrix Market reading and writing for real dense matrices.
//!
//! Reads both `array` and `coordinate` layouts with `general`, `symmetric`
//! or `skew-symmetric` symmetry. Writes the `array real general` form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::block::BlockSystem2x2;
use crate::dense::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn parse_matrix_market(text: &str) -> Result<Matrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market input".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!("bad header line: {header:?}")));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(Error::Parse(format!("unsupported layout {other:?}"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::Parse(format!("unsupported field {other:?}"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::Parse(format!("unsupported symmetry {other:?}"))),
    };

    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size_line = body
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let sizes: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size token {t:?}"))))
        .collect::<Result<_>>()?;

    let parse_f = |t: &str| -> Result<f64> {
        t.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad numeric token {t:?}")))
    };

    let m = match layout {
        Layout::Array => {
            let [rows, cols] = sizes[..] else {
                return Err(Error::Parse(format!("array size line needs 2 values: {size_line:?}")));
            };
            let values: Vec<f64> = body
                .flat_map(str::split_whitespace)
                .map(parse_f)
                .collect::<Result<_>>()?;
            let mut m = Matrix::zeros(rows, cols);
            let mut it = values.into_iter();
            // column-major; symmetric variants store only the lower triangle
            for j in 0..cols {
                let start = if symmetry == Symmetry::General {
                    0
                } else if symmetry == Symmetry::SkewSymmetric {
                    j + 1
                } else {
                    j
                };
                for i in start..rows {
                    let v = it
                        .next()
                        .ok_or_else(|| Error::Parse("too few array entries".into()))?;
                    m[(i, j)] = v;
                    mirror(&mut m, i, j, v, symmetry);
                }
            }
            if it.next().is_some() {
                return Err(Error::Parse("too many array entries".into()));
            }
            m
        }
        Layout::Coordinate => {
            let [rows, cols, nnz] = sizes[..] else {
                return Err(Error::Parse(format!(
                    "coordinate size line needs 3 values: {size_line:?}"
                )));
            };
            let mut m = Matrix::zeros(rows, cols);
            let mut count = 0;
            for line in body {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(Error::Parse(format!("bad coordinate entry {line:?}")));
                }
                let i: usize = t[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad row index {:?}", t[0])))?;
                let j: usize = t[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad column index {:?}", t[1])))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(Error::Parse(format!("entry ({i}, {j}) out of range")));
                }
                let v = parse_f(t[2])?;
                m[(i - 1, j - 1)] += v;
                if i != j {
                    mirror(&mut m, i - 1, j - 1, v, symmetry);
                }
                count += 1;
            }
            if count != nnz {
                return Err(Error::Parse(format!("expected {nnz} entries, found {count}")));
            }
            m
        }
    };
    if !m.is_finite() {
        return Err(Error::NonFinite("Matrix Market entry".into()));
    }
    Ok(m)
}

fn mirror(m: &mut Matrix, i: usize, j: usize, v: f64, symmetry: Symmetry) {
    match symmetry {
        Symmetry::General => {}
        Symmetry::Symmetric => m[(j, i)] = v,
        Symmetry::SkewSymmetric => m[(j, i)] = -v,
    }
}

/// Array format, column-major, shortest round-trip float formatting.
pub fn format_array(m: &Matrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let _ = writeln!(out, "{:e}", m[(i, j)]);
        }
    }
    out
}

/// Coordinate format listing only the nonzero entries.
pub fn format_coordinate(m: &Matrix) -> String {
    let mut entries = String::new();
    let mut nnz = 0;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(entries, "{} {} {:e}", i + 1, j + 1, v);
                nnz += 1;
            }
        }
    }
    format!(
        "%%MatrixMarket matrix coordinate real general\n{} {} {}\n{}",
        m.rows(),
        m.cols(),
        nnz,
        entries
    )
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix_market(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_array(m)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn block_path(stem: &Path, block: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(format!(".{block}.mtx"));
    PathBuf::from(s)
}

/// Loads `<stem>.a11.mtx`, `<stem>.a12.mtx`, `<stem>.a21.mtx`, `<stem>.a22.mtx`.
pub fn read_block_system(stem: impl AsRef<Path>) -> Result<BlockSystem2x2> {
    let stem = stem.as_ref();
    let load = |b: &str| read_matrix(block_path(stem, b));
    BlockSystem2x2::new(load("a11")?, load("a12")?, load("a21")?, load("a22")?)
}

/// Loads a monolithic matrix and splits it after the first `n1` rows and columns.
pub fn read_monolithic(path: impl AsRef<Path>, n1: usize) -> Result<BlockSystem2x2> {
    BlockSystem2x2::from_monolithic(&read_matrix(path)?, n1)
}

/// Writes the four blocks next to each other using the `<stem>.aIJ.mtx` names.
pub fn write_block_system(stem: impl AsRef<Path>, sys: &BlockSystem2x2) -> Result<Vec<PathBuf>> {
    let stem = stem.as_ref();
    let mut written = Vec::with_capacity(4);
    for (name, m) in [
        ("a11", sys.a11()),
        ("a12", sys.a12()),
        ("a21", sys.a21()),
        ("a22", sys.a22()),
    ] {
        let p = block_path(stem, name);
        write_matrix(&p, m)?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_round_trip_is_exact() {
        let m = Matrix::from_rows(&[&[1.0, -2.5e-17], &[1.0 / 3.0, 7.0], &[0.0, 1e300]]);
        let text = format_array(&m);
        assert!(text.starts_with("%%MatrixMarket matrix array real general\n3 2\n"));
        assert_eq!(parse_matrix_market(&text).unwrap(), m);
        assert_eq!(parse_matrix_market(&format_coordinate(&m)).unwrap(), m);
    }

    #[test]
    fn symmetric_coordinate_is_mirrored() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 -1\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m, Matrix::from_rows(&[&[4.0, -1.0], &[-1.0, 0.0]]));
    }

    #[test]
    fn symmetric_array_reads_lower_triangle() {
        let text = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m, Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 3.0]]));
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(parse_matrix_market("").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array complex general\n1 1\n1\n").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\nnan\n").is_err());
    }
}
