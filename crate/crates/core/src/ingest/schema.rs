use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// Thematic group an indicator belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pillar {
    GovernmentRegulation,
    Research,
    Technology,
    Industry,
    UserEngagement,
    Custom(String),
}

impl Pillar {
    pub fn as_str(&self) -> &str {
        match self {
            Pillar::GovernmentRegulation => "Government Regulation",
            Pillar::Research => "Research",
            Pillar::Technology => "Technology",
            Pillar::Industry => "Industry",
            Pillar::UserEngagement => "User Engagement",
            Pillar::Custom(s) => s,
        }
    }
}

impl From<String> for Pillar {
    fn from(s: String) -> Self {
        match s.as_str() {
            "Government Regulation" => Pillar::GovernmentRegulation,
            "Research" => Pillar::Research,
            "Technology" => Pillar::Technology,
            "Industry" => Pillar::Industry,
            "User Engagement" => Pillar::UserEngagement,
            _ => Pillar::Custom(s),
        }
    }
}

impl fmt::Display for Pillar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Pillar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Pillar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer).map(Pillar::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "higher")]
    HigherIsBetter,
    #[serde(rename = "lower")]
    LowerIsBetter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorDef {
    pub id: String,
    pub display_name: String,
    pub pillar: Pillar,
    pub direction: Direction,
    pub bounds: Option<(f64, f64)>,
}

impl Serialize for IndicatorDef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawDef {
            id: self.id.clone(),
            display_name: self.display_name.clone(),
            pillar: self.pillar.as_str().to_owned(),
            direction: match self.direction {
                Direction::HigherIsBetter => "higher".into(),
                Direction::LowerIsBetter => "lower".into(),
            },
            min: self.bounds.map(|b| b.0),
            max: self.bounds.map(|b| b.1),
        }
        .serialize(serializer)
    }
}

// On-disk shape; validated into `IndicatorDef`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDef {
    id: String,
    display_name: String,
    pillar: String,
    direction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
}

/// Ordered indicator definitions; position defines the vector index.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Schema(Vec<IndicatorDef>);

impl Schema {
    pub fn new(defs: Vec<IndicatorDef>) -> Result<Self, IngestError> {
        let mut seen = HashSet::new();
        for d in &defs {
            if !seen.insert(d.id.as_str()) {
                return Err(IngestError::DuplicateId(d.id.clone()));
            }
            if let Some((min, max)) = d.bounds {
                if !(min < max) {
                    return Err(IngestError::Schema {
                        field: format!("{}.min/max", d.id),
                        message: format!("min ({min}) must be below max ({max})"),
                    });
                }
            }
        }
        Ok(Self(defs))
    }

    pub fn defs(&self) -> &[IndicatorDef] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|d| d.id.as_str())
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.0.iter().position(|d| d.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

pub fn parse_schema(document: &[u8]) -> Result<Schema, IngestError> {
    let raw: Vec<RawDef> = serde_json::from_slice(document).map_err(|e| IngestError::Schema {
        field: "document".into(),
        message: e.to_string(),
    })?;
    let defs = raw
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let direction = match r.direction.to_ascii_lowercase().as_str() {
                "higher" => Direction::HigherIsBetter,
                "lower" => Direction::LowerIsBetter,
                other => {
                    return Err(IngestError::Schema {
                        field: format!("[{i}].direction"),
                        message: format!("expected \"higher\" or \"lower\", got \"{other}\""),
                    })
                }
            };
            let bounds = match (r.min, r.max) {
                (None, None) => None,
                (Some(min), Some(max)) => Some((min, max)),
                _ => {
                    return Err(IngestError::Schema {
                        field: format!("[{i}].min/max"),
                        message: format!("indicator '{}' must declare both min and max", r.id),
                    })
                }
            };
            if r.id.trim().is_empty() {
                return Err(IngestError::Schema {
                    field: format!("[{i}].id"),
                    message: "empty id".into(),
                });
            }
            Ok(IndicatorDef {
                id: r.id,
                display_name: r.display_name,
                pillar: Pillar::from(r.pillar),
                direction,
                bounds,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Schema::new(defs)
}

const DEFAULT_SCHEMA_JSON: &str = include_str!("../../data/default_schema.json");

/// The sixteen-indicator catalog shipped with the crate.
pub fn default_schema() -> Schema {
    parse_schema(DEFAULT_SCHEMA_JSON.as_bytes()).expect("bundled schema is valid")
}
