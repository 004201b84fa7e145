//! Matrix Market input and output (`array` and `coordinate` formats,
//! `real` or `integer` field, `general` symmetry).

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Array,
    Coordinate,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));

    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let format = parse_banner(banner)?;

    let mut content = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = content
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| parse_err(size_line, format!("bad size line {size:?}")))?;
    let expected_len = match format {
        Format::Array => 2,
        Format::Coordinate => 3,
    };
    if dims.len() != expected_len {
        return Err(parse_err(
            size_line,
            format!("size line needs {expected_len} integers, got {size:?}"),
        ));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }

    let mut data = vec![0.0; n * n];
    match format {
        Format::Array => {
            let mut k = 0;
            for (no, line) in content {
                for tok in line.split_whitespace() {
                    if k == n * n {
                        return Err(parse_err(no, "more values than the size line announces"));
                    }
                    let v = parse_value(no, tok)?;
                    // Column-major.
                    data[(k % n) * n + k / n] = v;
                    k += 1;
                }
            }
            if k != n * n {
                return Err(parse_err(
                    text.lines().count(),
                    format!("expected {} values, found {k}", n * n),
                ));
            }
        }
        Format::Coordinate => {
            let nnz = dims[2];
            let mut seen = vec![false; n * n];
            let mut count = 0;
            for (no, line) in content {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(no, "coordinate entry needs row, column and value"));
                }
                let idx = |t: &str| -> Result<usize> {
                    match t.parse::<usize>() {
                        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                        _ => Err(parse_err(no, format!("index {t:?} outside 1..={n}"))),
                    }
                };
                let (i, j) = (idx(toks[0])?, idx(toks[1])?);
                if std::mem::replace(&mut seen[i * n + j], true) {
                    return Err(parse_err(no, format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                data[i * n + j] = parse_value(no, toks[2])?;
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(
                    text.lines().count(),
                    format!("size line announces {nnz} entries, found {count}"),
                ));
            }
        }
    }
    DenseMatrix::new(n, data)
}

fn parse_banner(banner: &str) -> Result<Format> {
    let toks: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let format = match toks[2].as_str() {
        "array" => Format::Array,
        "coordinate" => Format::Coordinate,
        other => return Err(parse_err(1, format!("unknown format {other:?}"))),
    };
    match toks[3].as_str() {
        "real" | "integer" => {}
        "complex" => return Err(parse_err(1, "complex matrices are not supported")),
        other => return Err(parse_err(1, format!("unsupported field {other:?}"))),
    }
    if toks[4] != "general" {
        return Err(parse_err(1, format!("unsupported symmetry {:?}", toks[4])));
    }
    Ok(format)
}

fn parse_value(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

/// Array format, column-major, shortest round-trip representation.
pub fn format_matrix_market(a: &DenseMatrix) -> String {
    let n = a.order();
    let mut s = String::new();
    s.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{n} {n}");
    for j in 0..n {
        for i in 0..n {
            let _ = writeln!(s, "{:e}", a.get(i, j));
        }
    }
    s
}

pub fn write_matrix_market(a: &DenseMatrix, mut out: impl Write) -> Result<()> {
    out.write_all(format_matrix_market(a).as_bytes())?;
    Ok(())
}

/// SHA-256 over the order and the row-major entries, little-endian.
pub fn matrix_digest(a: &DenseMatrix) -> String {
    let mut h = Sha256::new();
    h.update((a.order() as u64).to_le_bytes());
    for v in a.as_slice() {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}
