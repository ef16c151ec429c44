use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvalError, GaussianNb, Label, LabeledPoint, MulticlassSvm, SmoConfig};

pub trait Classifier: Send + Sync {
    fn predict(&self, x: &[f64]) -> Label;

    /// Whether training reached its stopping criterion.
    fn converged(&self) -> bool {
        true
    }
}

impl Classifier for GaussianNb {
    fn predict(&self, x: &[f64]) -> Label {
        GaussianNb::predict(self, x)
    }
}

impl Classifier for MulticlassSvm {
    fn predict(&self, x: &[f64]) -> Label {
        MulticlassSvm::predict(self, x)
    }

    fn converged(&self) -> bool {
        MulticlassSvm::converged(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierKind {
    #[serde(rename = "nb")]
    NaiveBayes,
    Svm(SmoConfig),
}

impl ClassifierKind {
    pub fn svm() -> Self {
        ClassifierKind::Svm(SmoConfig::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::Svm(_) => "svm",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nb" | "naive-bayes" => Ok(ClassifierKind::NaiveBayes),
            "svm" | "smo" => Ok(ClassifierKind::svm()),
            other => Err(EvalError::InvalidParameter(format!(
                "unknown classifier '{other}' (expected nb|svm)"
            ))),
        }
    }
}

pub fn fit(kind: &ClassifierKind, train: &[LabeledPoint]) -> Result<Box<dyn Classifier>, EvalError> {
    let x: Vec<&[f64]> = train.iter().map(|p| p.features.as_slice()).collect();
    let y: Vec<Label> = train.iter().map(|p| p.label).collect();
    Ok(match kind {
        ClassifierKind::NaiveBayes => Box::new(GaussianNb::fit(&x, &y)?),
        ClassifierKind::Svm(cfg) => Box::new(MulticlassSvm::fit(&x, &y, cfg)?),
    })
}
