use std::fmt::Write as _;

use super::{checked_size, parse_err, IoError};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmFormat {
    Array,
    Coordinate,
}

/// Parses a real MatrixMarket matrix in array (column-major) or coordinate
/// form. Symmetry qualifiers `general`, `symmetric` and `skew-symmetric` are
/// accepted.
pub fn read_matrix_market(text: &str) -> Result<(Matrix, MmFormat), IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "expected a '%%MatrixMarket matrix' banner"));
    }
    let format = match words[2].as_str() {
        "array" => MmFormat::Array,
        "coordinate" => MmFormat::Coordinate,
        f => return Err(parse_err(1, format!("unsupported format '{f}'"))),
    };
    match words[3].as_str() {
        "real" | "integer" | "double" => {}
        f => return Err(parse_err(1, format!("unsupported field '{f}'"))),
    }
    let symmetry = match words[4].as_str() {
        "general" => 0,
        "symmetric" => 1,
        "skew-symmetric" => -1,
        s => return Err(parse_err(1, format!("unsupported symmetry '{s}'"))),
    };
    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims = parse_usizes(size, size_line)?;
    let mut values = data.flat_map(|(ln, l)| l.split_whitespace().map(move |t| (ln, t)));
    let mut next_f64 = |what: &str| -> Result<(usize, f64), IoError> {
        let (ln, t) = values.next().ok_or_else(|| parse_err(size_line, format!("missing {what}")))?;
        let v: f64 = t.parse().map_err(|_| parse_err(ln, format!("bad number '{t}'")))?;
        if !v.is_finite() {
            return Err(parse_err(ln, "non-finite value"));
        }
        Ok((ln, v))
    };
    let matrix = match format {
        MmFormat::Array => {
            let [rows, cols] = dims[..] else { return Err(parse_err(size_line, "array size needs 'rows cols'")) };
            checked_size(rows, cols, size_line)?;
            if symmetry != 0 && rows != cols {
                return Err(parse_err(size_line, "symmetric matrix must be square"));
            }
            let mut m = Matrix::zeros(rows, cols);
            for j in 0..cols {
                let start = if symmetry == 0 { 0 } else if symmetry == 1 { j } else { j + 1 };
                for i in start..rows {
                    let (_, v) = next_f64("entry")?;
                    m[(i, j)] = v;
                    if symmetry != 0 && i != j {
                        m[(j, i)] = symmetry as f64 * v;
                    }
                }
            }
            m
        }
        MmFormat::Coordinate => {
            let [rows, cols, nnz] = dims[..] else {
                return Err(parse_err(size_line, "coordinate size needs 'rows cols nnz'"));
            };
            let total = checked_size(rows, cols, size_line)?;
            if nnz > total {
                return Err(parse_err(size_line, "more entries than matrix cells"));
            }
            if symmetry != 0 && rows != cols {
                return Err(parse_err(size_line, "symmetric matrix must be square"));
            }
            let mut m = Matrix::zeros(rows, cols);
            for _ in 0..nnz {
                let (ln, i) = next_f64("row index")?;
                let (_, j) = next_f64("column index")?;
                let (_, v) = next_f64("value")?;
                let idx = |x: f64, n: usize| -> Result<usize, IoError> {
                    if x.fract() != 0.0 || x < 1.0 || x > n as f64 {
                        return Err(parse_err(ln, format!("index {x} out of range 1..={n}")));
                    }
                    Ok(x as usize - 1)
                };
                let (i, j) = (idx(i, rows)?, idx(j, cols)?);
                m[(i, j)] += v;
                if symmetry != 0 && i != j {
                    m[(j, i)] += symmetry as f64 * v;
                }
            }
            m
        }
    };
    if let Some((ln, t)) = values.next() {
        return Err(parse_err(ln, format!("trailing token '{t}'")));
    }
    Ok((matrix, format))
}

fn parse_usizes(line: &str, ln: usize) -> Result<Vec<usize>, IoError> {
    line.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(ln, format!("bad size '{t}'"))))
        .collect()
}

/// Column-major array form; values use the shortest round-trip decimal.
pub fn write_matrix_market_array(m: &Matrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", m.nrows(), m.ncols());
    for v in m.iter() {
        let _ = writeln!(s, "{v:?}");
    }
    s
}

/// Coordinate form listing the nonzero entries column by column.
pub fn write_matrix_market_coordinate(m: &Matrix) -> String {
    let nnz = m.iter().filter(|v| **v != 0.0).count();
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", m.nrows(), m.ncols(), nnz);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(s, "{} {} {v:?}", i + 1, j + 1);
            }
        }
    }
    s
}
