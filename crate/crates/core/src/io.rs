//! Network files (JSON and Matrix Market), state vectors and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkFormat {
    Json,
    MatrixMarket,
}

impl NetworkFormat {
    /// `.mtx` and `.mm` are Matrix Market; everything else is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("mtx") | Some("mm") => NetworkFormat::MatrixMarket,
            _ => NetworkFormat::Json,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    n: usize,
    #[serde(default)]
    label: String,
    matrix: Vec<Vec<f64>>,
}

pub fn load_network(path: &Path, format: Option<NetworkFormat>) -> Result<Network> {
    let text = fs::read_to_string(path)?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("network");
    match format.unwrap_or_else(|| NetworkFormat::from_path(path)) {
        NetworkFormat::Json => parse_json(&text),
        NetworkFormat::MatrixMarket => parse_matrix_market(&text, label),
    }
}

pub fn parse_json(text: &str) -> Result<Network> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("network JSON: {e}")))?;
    if file.matrix.len() != file.n {
        return Err(Error::Parse(format!(
            "network JSON declares n = {} but has {} rows",
            file.n,
            file.matrix.len()
        )));
    }
    for (i, row) in file.matrix.iter().enumerate() {
        if row.len() != file.n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {}", i + 1, row.len(), file.n)));
        }
    }
    let label = if file.label.is_empty() { "network".to_string() } else { file.label };
    Network::from_rows(&file.matrix, label).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json(net: &Network) -> Result<String> {
    let file = NetworkFile {
        n: net.n(),
        label: net.label().to_string(),
        matrix: net.rows(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))
}

/// Coordinate or array Matrix Market, real or integer, general symmetry.
pub fn parse_matrix_market(text: &str, label: &str) -> Result<Network> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty Matrix Market file".into()))?;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::Parse(format!("line 1: not a Matrix Market header: {header:?}")));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::Parse(format!("line 1: unsupported layout {other:?}"))),
    };
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(Error::Parse(format!("line 1: unsupported field {:?}", fields[3])));
    }
    if fields[4] != "general" {
        return Err(Error::Parse(format!("line 1: unsupported symmetry {:?}", fields[4])));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_no, size_line) = body.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("line {}: {e}", size_no + 1)))?;
    let (rows, cols) = match dims.as_slice() {
        [r, c, ..] => (*r, *c),
        _ => return Err(Error::Parse(format!("line {}: malformed size line", size_no + 1))),
    };
    if rows != cols {
        return Err(Error::Parse(format!("line {}: matrix is {rows}x{cols}, expected square", size_no + 1)));
    }
    let n = rows;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let parse_value = |tok: &str, line: usize| -> Result<f64> {
        let v: f64 = tok.parse().map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("line {line}: non-finite entry {tok}")));
        }
        Ok(v)
    };

    if coordinate {
        let nnz = *dims.get(2).ok_or_else(|| Error::Parse(format!("line {}: missing entry count", size_no + 1)))?;
        let mut count = 0;
        for (no, line) in body {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 'row col value'", no + 1)));
            }
            let i: usize = toks[0].parse().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            let j: usize = toks[1].parse().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::Parse(format!("line {}: index ({i}, {j}) out of range", no + 1)));
            }
            m[(i - 1, j - 1)] += parse_value(toks[2], no + 1)?;
            count += 1;
        }
        if count != nnz {
            return Err(Error::Parse(format!("expected {nnz} entries, found {count}")));
        }
    } else {
        let mut k = 0;
        for (no, line) in body {
            for tok in line.split_whitespace() {
                if k >= n * n {
                    return Err(Error::Parse(format!("line {}: too many array entries", no + 1)));
                }
                m[(k % n, k / n)] = parse_value(tok, no + 1)?;
                k += 1;
            }
        }
        if k != n * n {
            return Err(Error::Parse(format!("expected {} array entries, found {k}", n * n)));
        }
    }
    Network::new(m, label).map_err(|e| Error::Parse(e.to_string()))
}

/// Coordinate Matrix Market listing the nonzero entries.
pub fn to_matrix_market(net: &Network) -> String {
    let w = net.weights();
    let n = net.n();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "% {}", net.label());
    let _ = writeln!(out, "{n} {n} {}", net.nonzero_count());
    for j in 0..n {
        for i in 0..n {
            if w[(i, j)] != 0.0 {
                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w[(i, j)]);
            }
        }
    }
    out
}

pub fn save_network(net: &Network, path: &Path, format: Option<NetworkFormat>) -> Result<()> {
    let text = match format.unwrap_or_else(|| NetworkFormat::from_path(path)) {
        NetworkFormat::Json => to_json(net)?,
        NetworkFormat::MatrixMarket => to_matrix_market(net),
    };
    fs::write(path, text)?;
    Ok(())
}

/// A state vector given as a JSON array or as numbers separated by
/// whitespace or commas.
pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let trimmed = text.trim();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("state vector JSON: {e}")))?
    } else {
        trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("state vector entry {t:?}: {e}"))))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("state vector must be non-empty and finite".into()));
    }
    Ok(DVector::from_vec(values))
}

pub fn load_vector(path: &Path) -> Result<DVector<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text with a header row and full-precision numeric cells.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_identity() {
        let net = parse_json(r#"{"n": 2, "label": "id", "matrix": [[1, 0], [0, 1]]}"#).unwrap();
        assert_eq!(*net.weights(), DMatrix::identity(2, 2));
        assert_eq!(net.label(), "id");
    }

    #[test]
    fn json_errors() {
        assert!(matches!(parse_json(r#"{"n": 2, "matrix": [[1, 0]]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_json(r#"{"n": 2, "matrix": [[1, 0], [0]]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = DMatrix::from_fn(3, 3, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0) * 1e-7 + 1.0 / 3.0);
        let net = Network::new(m, "x").unwrap();
        let back = parse_json(&to_json(&net).unwrap()).unwrap();
        assert_eq!(back.weights(), net.weights());
    }

    #[test]
    fn matrix_market_coordinate_and_array() {
        let coo = "%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 2 3.5\n2 1 -1\n";
        let net = parse_matrix_market(coo, "c").unwrap();
        assert_eq!(net.weights()[(0, 1)], 3.5);
        assert_eq!(net.nonzero_count(), 2);
        let arr = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
        let net = parse_matrix_market(arr, "a").unwrap();
        assert_eq!(net.weights()[(1, 0)], 2.0);
        assert_eq!(net.weights()[(0, 1)], 3.0);
        let back = parse_matrix_market(&to_matrix_market(&net), "a").unwrap();
        assert_eq!(back.weights(), net.weights());
    }

    #[test]
    fn matrix_market_errors_carry_line_numbers() {
        let bad = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 3 1.0\n";
        let err = parse_matrix_market(bad, "b").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let nan = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 NaN\n";
        assert!(parse_matrix_market(nan, "b").is_err());
        let rect = "%%MatrixMarket matrix coordinate real general\n2 3 0\n";
        assert!(parse_matrix_market(rect, "b").is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("[1, 2.5]").unwrap().as_slice(), &[1.0, 2.5]);
        assert_eq!(parse_vector("1 2,3\n").unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        assert!(parse_vector("").is_err());
    }

    #[test]
    fn full_precision_round_trips() {
        let v = 0.1 + 0.2;
        assert_eq!(fmt_full(v).parse::<f64>().unwrap(), v);
    }
}
