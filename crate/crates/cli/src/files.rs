//! Channel and matrix files.
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. A channel file
//! is an object `{"dim": n, "kraus": [matrix, ...], "metadata": {...}}`
//! where `metadata` is optional.

use std::collections::BTreeMap;
use std::path::Path;

use mdqec::numerics::{c64, ComplexMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<MatrixData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl ChannelFile {
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| parse_error(source, &e))
    }

    pub fn from_kraus(kraus: &[ComplexMatrix], metadata: Option<Metadata>) -> Self {
        Self {
            dim: kraus.first().map_or(0, |k| k.nrows()),
            kraus: kraus.iter().map(matrix_data).collect(),
            metadata,
        }
    }

    /// Kraus operators, checked to be `dim × dim`.
    pub fn kraus_matrices(&self, source: &str) -> Result<Vec<ComplexMatrix>, CliError> {
        if self.kraus.is_empty() {
            return Err(invalid(source, "no Kraus operators"));
        }
        self.kraus
            .iter()
            .enumerate()
            .map(|(k, data)| {
                let m = to_matrix(data, source)?;
                if m.shape() != (self.dim, self.dim) {
                    return Err(invalid(
                        source,
                        &format!("Kraus operator {k} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols(), n = self.dim),
                    ));
                }
                Ok(m)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("channel file serialises");
        text.push('\n');
        text
    }
}

pub fn matrix_data(m: &ComplexMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Rectangular matrix from nested `[re, im]` rows.
pub fn to_matrix(data: &MatrixData, source: &str) -> Result<ComplexMatrix, CliError> {
    let rows = data.len();
    let cols = data.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(invalid(source, "empty matrix"));
    }
    if let Some(i) = data.iter().position(|r| r.len() != cols) {
        return Err(invalid(source, &format!("row {i} has {} entries, expected {cols}", data[i].len())));
    }
    if data.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(invalid(source, "non-finite entry"));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| c64(data[i][j][0], data[i][j][1])))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_channel_file(path: &Path) -> Result<ChannelFile, CliError> {
    ChannelFile::parse(&read_text(path)?, &path.display().to_string())
}

pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix, CliError> {
    let source = path.display().to_string();
    let data: MatrixData = serde_json::from_str(&read_text(path)?).map_err(|e| parse_error(&source, &e))?;
    to_matrix(&data, &source)
}

fn parse_error(source: &str, e: &serde_json::Error) -> CliError {
    let text = e.to_string();
    let position = format!(" at line {} column {}", e.line(), e.column());
    CliError::Parse {
        file: source.to_string(),
        line: e.line(),
        column: e.column(),
        message: text.strip_suffix(&position).unwrap_or(&text).to_string(),
    }
}

fn invalid(source: &str, message: &str) -> CliError {
    CliError::InvalidInput(format!("{source}: {message}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT_FLIP: &str = r#"{
  "dim": 2,
  "kraus": [
    [[[0.8, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.8, 0.0]]],
    [[[0.0, 0.0], [0.6, 0.0]], [[0.6, 0.0], [0.0, 0.0]]]
  ],
  "metadata": {"name": "bit flip", "parameters": {"p": 0.36}}
}"#;

    #[test]
    fn parses_and_round_trips() {
        let file = ChannelFile::parse(QUBIT_FLIP, "inline").unwrap();
        let kraus = file.kraus_matrices("inline").unwrap();
        assert_eq!(kraus.len(), 2);
        assert_eq!(kraus[1][(0, 1)], c64(0.6, 0.0));
        let again = ChannelFile::parse(&file.to_json(), "again").unwrap();
        assert_eq!(again, file);
        assert_eq!(ChannelFile::from_kraus(&kraus, file.metadata.clone()), file);
    }

    #[test]
    fn reports_position_of_syntax_errors() {
        let broken = "{\n  \"dim\": 2,\n  \"kraus\": [[[1.0, 0.0]]\n";
        match ChannelFile::parse(broken, "broken") {
            Err(CliError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_shapes() {
        let text = r#"{"dim": 2, "kraus": [[[[1.0, 0.0]]]]}"#;
        let file = ChannelFile::parse(text, "small").unwrap();
        assert!(matches!(file.kraus_matrices("small"), Err(CliError::InvalidInput(_))));
        let ragged: MatrixData = vec![vec![[1.0, 0.0]], vec![]];
        assert!(to_matrix(&ragged, "ragged").is_err());
    }
}
