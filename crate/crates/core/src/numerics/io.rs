use serde::{Deserialize, Serialize};

use super::FloatMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<String>>,
    pub data: Vec<Vec<f64>>,
}

/// Reads either the text format
///
/// ```text
/// matrix 2 2
/// 1.0 0.5
/// 0.5 2.0
/// ```
///
/// or JSON `{"nodes": ["1","2"], "data": [[1.0,0.5],[0.5,2.0]]}`.
pub fn parse_matrix(text: &str) -> Result<(FloatMatrix, Option<Vec<String>>)> {
    if text.trim_start().starts_with('{') {
        let f: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Matrix(e.to_string()))?;
        let rows = f.data.len();
        let cols = f.data.first().map_or(0, Vec::len);
        if f.data.iter().any(|r| r.len() != cols) {
            return Err(Error::Matrix("ragged rows".into()));
        }
        if let Some(nodes) = &f.nodes {
            if nodes.len() != rows {
                return Err(Error::Matrix("node list does not match the row count".into()));
            }
        }
        let m = FloatMatrix::from_fn(rows, cols, |i, j| f.data[i][j]);
        check_finite(&m)?;
        return Ok((m, f.nodes));
    }
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Matrix("empty input".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match h[..] {
        ["matrix", r, c] => (
            r.parse::<usize>().map_err(|e| Error::Matrix(e.to_string()))?,
            c.parse::<usize>().map_err(|e| Error::Matrix(e.to_string()))?,
        ),
        _ => return Err(Error::Matrix(format!("bad header `{header}`"))),
    };
    let values: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<f64>().map_err(|e| Error::Matrix(format!("`{t}`: {e}"))))
        .collect::<Result<_>>()?;
    if values.len() != rows * cols {
        return Err(Error::Matrix(format!("expected {} entries, found {}", rows * cols, values.len())));
    }
    let m = FloatMatrix::from_row_slice(rows, cols, &values);
    check_finite(&m)?;
    Ok((m, None))
}

fn check_finite(m: &FloatMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Matrix("non-finite entry".into()))
    }
}

pub fn matrix_to_text(m: &FloatMatrix) -> String {
    let mut s = format!("matrix {} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn matrix_to_json(m: &FloatMatrix, nodes: Option<&[String]>) -> MatrixFile {
    MatrixFile {
        nodes: nodes.map(<[String]>::to_vec),
        data: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = FloatMatrix::from_row_slice(2, 3, &[1.0, -0.25, 3.5, 1e-7, 0.0, 2.0]);
        let (back, nodes) = parse_matrix(&matrix_to_text(&m)).unwrap();
        assert_eq!(back, m);
        assert!(nodes.is_none());
    }

    #[test]
    fn json_input() {
        let (m, nodes) = parse_matrix(r#"{"nodes":["a","b"],"data":[[1,0.5],[0.5,2]]}"#).unwrap();
        assert_eq!(m[(1, 0)], 0.5);
        assert_eq!(nodes.unwrap(), ["a", "b"]);
        assert!(parse_matrix(r#"{"data":[[1,2],[3]]}"#).is_err());
    }

    #[test]
    fn malformed_text() {
        assert!(parse_matrix("matrix 2 2\n1 2 3").is_err());
        assert!(parse_matrix("mat 1 1\n1").is_err());
        assert!(parse_matrix("matrix 1 1\nx").is_err());
    }
}
