//! Similarity matrices as CSV.
//!
//! The header row names each member with a kind suffix, `A1:m` for a method
//! or `av1:f` for a field. If the header's first cell is empty, every row
//! starts with its own label. Either triangle may be left blank and is
//! mirrored from the other; a blank diagonal means 1. Short rows are padded
//! with blanks.

use classplit_core::similarity::{Label, SimilarityMatrix};
use classplit_core::MemberKind;

use super::IngestError;

/// A matrix read from CSV: labelled, symmetric, unit diagonal, values in `[0, 1]`.
pub type MatrixDocument = SimilarityMatrix;

const SYMMETRY_TOLERANCE: f64 = 1e-9;

fn parse_label(cell: &str) -> Result<Label, IngestError> {
    let bad = || IngestError::BadLabel(cell.to_string());
    let (name, kind) = cell.rsplit_once(':').ok_or_else(bad)?;
    let kind = match kind.trim() {
        "m" | "M" => MemberKind::Method,
        "f" | "F" => MemberKind::Field,
        _ => return Err(bad()),
    };
    let name = name.trim();
    if !classplit_core::model::is_identifier(name) {
        return Err(bad());
    }
    Ok(Label {
        name: name.to_string(),
        kind,
    })
}

fn label_text(label: &Label) -> String {
    let suffix = match label.kind {
        MemberKind::Method => "m",
        MemberKind::Field => "f",
    };
    format!("{}:{suffix}", label.name)
}

pub fn parse_matrix_csv(text: &str) -> Result<MatrixDocument, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::MalformedDocument(e.to_string()))?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    let Some((header, body)) = rows.split_first() else {
        return Err(IngestError::MalformedDocument("empty document".into()));
    };

    let row_labels = header.first().is_some_and(String::is_empty);
    let header = if row_labels {
        &header[1..]
    } else {
        &header[..]
    };
    let header: Vec<&String> = header
        .iter()
        .rev()
        .skip_while(|c| c.is_empty())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let labels = header
        .iter()
        .map(|c| parse_label(c))
        .collect::<Result<Vec<_>, _>>()?;
    let n = labels.len();
    if body.len() != n {
        return Err(IngestError::NonSquare(format!(
            "{n} labels but {} rows",
            body.len()
        )));
    }

    let mut cells: Vec<Option<f64>> = vec![None; n * n];
    for (i, row) in body.iter().enumerate() {
        let row = if row_labels {
            let (first, rest) = row
                .split_first()
                .map_or(("", &[][..]), |(f, r)| (f.as_str(), r));
            let matches = first == label_text(&labels[i]) || first == labels[i].name;
            if !matches {
                return Err(IngestError::MalformedDocument(format!(
                    "row {} is labelled `{first}`, expected `{}`",
                    i + 1,
                    labels[i].name
                )));
            }
            rest
        } else {
            &row[..]
        };
        let last_filled = row.iter().rposition(|c| !c.is_empty()).map_or(0, |p| p + 1);
        if last_filled > n {
            return Err(IngestError::NonSquare(format!(
                "row `{}` has {} cells, expected {n}",
                labels[i].name, last_filled
            )));
        }
        for (j, cell) in row.iter().enumerate().take(last_filled) {
            if cell.is_empty() {
                continue;
            }
            let out_of_range = || IngestError::ValueOutOfRange {
                row: labels[i].name.clone(),
                col: labels[j].name.clone(),
                value: cell.clone(),
            };
            let v: f64 = cell.parse().map_err(|_| out_of_range())?;
            if !(0.0..=1.0).contains(&v) || (i == j && v != 1.0) {
                return Err(out_of_range());
            }
            cells[i * n + j] = Some(v);
        }
    }

    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in 0..i {
            let lower = cells[i * n + j];
            let upper = cells[j * n + i];
            let v = match (lower, upper) {
                (Some(a), Some(b)) if (a - b).abs() > SYMMETRY_TOLERANCE => {
                    return Err(IngestError::AsymmetricConflict {
                        row: labels[i].name.clone(),
                        col: labels[j].name.clone(),
                    })
                }
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => {
                    return Err(IngestError::MissingValue {
                        row: labels[i].name.clone(),
                        col: labels[j].name.clone(),
                    })
                }
            };
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(SimilarityMatrix::new(labels, values)?)
}

/// Full matrix with row labels, values at full precision.
pub fn write_matrix_csv(matrix: &SimilarityMatrix) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let labels: Vec<String> = matrix.labels().iter().map(label_text).collect();
    let header = std::iter::once(String::new()).chain(labels.iter().cloned());
    writer.write_record(header).expect("in-memory write");
    for (i, label) in labels.iter().enumerate() {
        let row = matrix.row(classplit_core::MemberId(i));
        let record = std::iter::once(label.clone()).chain(row.iter().map(|v| v.to_string()));
        writer.write_record(record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
