//! Supervised evaluation of the index features: baselines, Gaussian naive
//! Bayes, an SMO-trained linear SVM and stratified cross-validation.

mod classifier;
mod cv;
mod features;
mod naive_bayes;
mod report;
mod smo;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::IndexError;

pub use classifier::{fit, Classifier, ClassifierKind};
pub use cv::{baseline1_accuracy, cross_validate, stratified_folds, EvalConfig, EvalReport};
pub use features::{baseline2_featurize, featurize, FeatureSet};
pub use naive_bayes::GaussianNb;
pub use report::{render_accuracy_table, AccuracyTable, AccuracyRow};
pub use smo::{BinarySvm, MulticlassSvm, SmoConfig};
pub use sweep::{parse_values, sweep, SweepAxis, SweepTable};

/// Expert readiness annotation. Declaration order (High, Mid, Low) is the
/// tie-break order used by every classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    High,
    Mid,
    Low,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::High, Label::Mid, Label::Low];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::High => "high",
            Label::Mid => "mid",
            Label::Low => "low",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" => Ok(Label::High),
            "mid" => Ok(Label::Mid),
            "low" => Ok(Label::Low),
            other => Err(EvalError::InvalidParameter(format!(
                "unknown label '{other}' (expected high|mid|low)"
            ))),
        }
    }
}

/// `(country, label)` pairs in file order.
pub type LabelSet = Vec<(String, Label)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Granularity {
    #[serde(rename = "3-class")]
    ThreeClass,
    #[serde(rename = "2-class")]
    TwoClass,
}

impl Granularity {
    pub fn classes(self) -> &'static [Label] {
        match self {
            Granularity::ThreeClass => &Label::ALL,
            Granularity::TwoClass => &[Label::High, Label::Low],
        }
    }

    pub fn includes(self, label: Label) -> bool {
        self.classes().contains(&label)
    }

    /// Keeps only the points whose label belongs to this granularity.
    pub fn filter(self, points: &[LabeledPoint]) -> Vec<LabeledPoint> {
        points
            .iter()
            .filter(|p| self.includes(p.label))
            .cloned()
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Granularity::ThreeClass => "3-class",
            Granularity::TwoClass => "2-class",
        }
    }
}

impl FromStr for Granularity {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3" | "3-class" => Ok(Granularity::ThreeClass),
            "2" | "2-class" => Ok(Granularity::TwoClass),
            other => Err(EvalError::InvalidParameter(format!(
                "unknown granularity '{other}' (expected 2|3)"
            ))),
        }
    }
}

/// A country described by its two index features: the coverage weight and
/// the final score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub name: String,
    pub features: [f64; 2],
    pub label: Label,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("labeled country '{0}' not found in dataset")]
    UnknownCountry(String),
    #[error("no points to evaluate")]
    Empty,
    #[error("degenerate training set: {0}")]
    Degenerate(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_order_and_parse() {
        assert!(Label::High < Label::Mid && Label::Mid < Label::Low);
        assert_eq!(" High ".parse::<Label>().unwrap(), Label::High);
        assert!("medium".parse::<Label>().is_err());
    }

    #[test]
    fn two_class_drops_mid() {
        let pts: Vec<LabeledPoint> = Label::ALL
            .iter()
            .map(|&label| LabeledPoint {
                name: label.to_string(),
                features: [0.0, 0.0],
                label,
            })
            .collect();
        let kept = Granularity::TwoClass.filter(&pts);
        assert_eq!(kept.len(), 2);
        assert!(kept.iter().all(|p| p.label != Label::Mid));
        assert_eq!(Granularity::ThreeClass.filter(&pts).len(), 3);
        assert_eq!("2".parse::<Granularity>().unwrap(), Granularity::TwoClass);
        assert!("4".parse::<Granularity>().is_err());
    }
}
