//! Readers for the three input formats and writers for the round-trippable
//! ones.

mod cdl;
mod graph_json;
mod matrix_csv;

use std::path::Path;
use std::str::FromStr;

use classplit_core::ClassGraph;

pub use cdl::{parse_cdl, write_cdl};
pub use graph_json::{parse_graph_json, write_graph_json, GraphDocument, MethodDocument};
pub use matrix_csv::{parse_matrix_csv, write_matrix_csv, MatrixDocument};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("{line}:{col}: syntax error: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("matrix is not square: {0}")]
    NonSquare(String),
    #[error("cell ({row}, {col}) = `{value}` is not a number in [0, 1]")]
    ValueOutOfRange {
        row: String,
        col: String,
        value: String,
    },
    #[error("cells ({row}, {col}) and ({col}, {row}) disagree")]
    AsymmetricConflict { row: String, col: String },
    #[error("cell ({row}, {col}) is blank in both triangles")]
    MissingValue { row: String, col: String },
    #[error("bad label `{0}`: expected `<name>:m` or `<name>:f`")]
    BadLabel(String),
    #[error(transparent)]
    Model(#[from] classplit_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Cdl,
    Json,
    Csv,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cdl" => Ok(InputFormat::Cdl),
            "json" => Ok(InputFormat::Json),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown input format `{other}`")),
        }
    }
}

/// A parsed input: a member graph, or a bare similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Graph(ClassGraph),
    Matrix(MatrixDocument),
}

pub fn parse_input(text: &str, format: InputFormat) -> Result<Input, IngestError> {
    Ok(match format {
        InputFormat::Cdl => Input::Graph(parse_cdl(text)?),
        InputFormat::Json => Input::Graph(parse_graph_json(text)?),
        InputFormat::Csv => Input::Matrix(parse_matrix_csv(text)?),
    })
}
