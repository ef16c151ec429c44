use std::collections::HashSet;

use super::{IngestError, Schema};
use crate::eval::{Label, LabelSet};

#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Raw (unnormalized) indicator table in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub schema: Schema,
    pub rows: Vec<RawRow>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn reader(document: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(document)
}

fn csv_err(e: csv::Error) -> IngestError {
    IngestError::Csv(e.to_string())
}

/// Parses the country data CSV; columns may appear in any order and are
/// rearranged to schema order. Empty cells become missing values.
pub fn parse_data(document: &[u8], schema: &Schema) -> Result<RawDataset, IngestError> {
    if document.iter().all(u8::is_ascii_whitespace) {
        return Ok(RawDataset {
            schema: schema.clone(),
            rows: Vec::new(),
        });
    }
    let mut rdr = reader(document);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let mut cols = headers.iter();
    match cols.next() {
        Some(h) if h.trim_start_matches('\u{feff}') == "country" => {}
        other => {
            return Err(IngestError::BadHeader(format!(
                "first column must be 'country', found '{}'",
                other.unwrap_or("")
            )))
        }
    }

    // file column -> schema position
    let mut mapping = Vec::with_capacity(schema.len());
    let mut seen = HashSet::new();
    for h in cols {
        let pos = schema
            .position(h)
            .ok_or_else(|| IngestError::UnknownColumn(h.to_owned()))?;
        if !seen.insert(pos) {
            return Err(IngestError::BadHeader(format!("column '{h}' appears twice")));
        }
        mapping.push(pos);
    }
    if let Some((_, missing)) = schema.ids().enumerate().find(|(p, _)| !seen.contains(p)) {
        return Err(IngestError::MissingColumn(missing.to_owned()));
    }

    let mut rows = Vec::new();
    let mut names = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(IngestError::RaggedRow {
                row: line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let name = record[0].to_owned();
        if name.is_empty() {
            return Err(IngestError::Csv(format!("row {line}: empty country name")));
        }
        if !names.insert(name.clone()) {
            return Err(IngestError::DuplicateCountry { name, row: line });
        }
        let mut values = vec![None; schema.len()];
        for (cell, &pos) in record.iter().skip(1).zip(&mapping) {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                IngestError::BadCell {
                    row: line,
                    column: schema.defs()[pos].id.clone(),
                    value: cell.to_owned(),
                }
            })?;
            values[pos] = Some(v);
        }
        rows.push(RawRow { name, values });
    }
    Ok(RawDataset {
        schema: schema.clone(),
        rows,
    })
}

/// Writes `dataset` in the same CSV layout `parse_data` reads.
pub fn write_data(dataset: &RawDataset) -> String {
    let mut out = String::from("country");
    for id in dataset.schema.ids() {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for row in &dataset.rows {
        out.push_str(&csv_field(&row.name));
        for v in &row.values {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Parses a `country,label` CSV with labels `high`, `mid` or `low`.
pub fn parse_labels(document: &[u8]) -> Result<LabelSet, IngestError> {
    let mut rdr = reader(document);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.len() != 2
        || headers[0].trim_start_matches('\u{feff}') != "country"
        || &headers[1] != "label"
    {
        return Err(IngestError::BadHeader(
            "labels file must have header 'country,label'".into(),
        ));
    }
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(IngestError::RaggedRow {
                row: line,
                expected: 2,
                found: record.len(),
            });
        }
        let label: Label = record[1].parse().map_err(|_| IngestError::BadCell {
            row: line,
            column: "label".into(),
            value: record[1].to_owned(),
        })?;
        let name = record[0].to_owned();
        if !names.insert(name.clone()) {
            return Err(IngestError::DuplicateCountry { name, row: line });
        }
        out.push((name, label));
    }
    Ok(out)
}

pub fn write_labels(labels: &[(String, Label)]) -> String {
    let mut out = String::from("country,label\n");
    for (name, label) in labels {
        out.push_str(&csv_field(name));
        out.push(',');
        out.push_str(label.as_str());
        out.push('\n');
    }
    out
}
