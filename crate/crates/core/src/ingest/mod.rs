//! File-based ingestion: indicator schemas, country data and labels.

mod data;
mod normalize;
mod schema;

use thiserror::Error;

pub use data::{parse_data, parse_labels, write_data, write_labels, RawDataset, RawRow};
pub use normalize::{normalize, scalings, Scaling};
pub use schema::{default_schema, parse_schema, Direction, IndicatorDef, Pillar, Schema};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("schema field {field}: {message}")]
    Schema { field: String, message: String },
    #[error("duplicate indicator id '{0}'")]
    DuplicateId(String),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: u64,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column '{column}': cannot parse '{value}'")]
    BadCell {
        row: u64,
        column: String,
        value: String,
    },
    #[error("row {row}: duplicate country '{name}'")]
    DuplicateCountry { name: String, row: u64 },
    #[error("csv: {0}")]
    Csv(String),
}
