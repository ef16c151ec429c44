use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{fit, ClassifierKind, EvalError, FeatureSet, Granularity, Label, LabeledPoint};
use crate::index::{Metric, WeightingScheme};

/// How the evaluated points were produced; attached by callers that know it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub features: FeatureSet,
    pub scheme: &'static str,
    pub gamma: Option<f64>,
    pub neighbors: usize,
    pub metric: Metric,
}

impl EvalConfig {
    pub fn new(features: FeatureSet, scheme: WeightingScheme, neighbors: usize, metric: Metric) -> Self {
        Self {
            features,
            scheme: scheme.name(),
            gamma: scheme.gamma(),
            neighbors,
            metric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<EvalConfig>,
    pub classifier: ClassifierKind,
    pub granularity: Granularity,
    pub seed: u64,
    pub folds_requested: usize,
    pub folds_used: usize,
    /// Folds preserve per-class proportions.
    pub stratified: bool,
    pub n_points: usize,
    pub classes: Vec<Label>,
    pub per_fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    /// Rows are true classes, columns predicted classes, both in `classes` order.
    pub confusion: Vec<Vec<usize>>,
    pub baseline1_accuracy: f64,
    /// False if any SVM hit its sweep cap.
    pub converged: bool,
}

impl EvalReport {
    pub fn with_config(mut self, config: EvalConfig) -> Self {
        self.config = Some(config);
        self
    }

    /// Accuracy recomputed from the pooled confusion matrix.
    pub fn pooled_accuracy(&self) -> f64 {
        let total: usize = self.confusion.iter().flatten().sum();
        let diag: usize = (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum();
        if total == 0 {
            0.0
        } else {
            diag as f64 / total as f64
        }
    }
}

/// Accuracy of always predicting the most populous class.
pub fn baseline1_accuracy(points: &[LabeledPoint], granularity: Granularity) -> Result<f64, EvalError> {
    let counts = class_counts(points, granularity);
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(EvalError::Empty);
    }
    Ok(*counts.iter().max().expect("non-empty") as f64 / total as f64)
}

fn class_counts(points: &[LabeledPoint], granularity: Granularity) -> Vec<usize> {
    granularity
        .classes()
        .iter()
        .map(|c| points.iter().filter(|p| p.label == *c).count())
        .collect()
}

/// Assigns each point a fold in `0..folds`: classes are shuffled
/// independently and dealt round-robin, continuing the deal across classes.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut dealt = 0usize;
    for class in Label::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = dealt % folds;
            dealt += 1;
        }
    }
    assignment
}

pub fn cross_validate(
    points: &[LabeledPoint],
    classifier: &ClassifierKind,
    folds: usize,
    granularity: Granularity,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    if folds < 2 {
        return Err(EvalError::InvalidParameter("folds must be at least 2".into()));
    }
    let points = granularity.filter(points);
    if points.is_empty() {
        return Err(EvalError::Empty);
    }
    let classes: Vec<Label> = granularity
        .classes()
        .iter()
        .copied()
        .filter(|c| points.iter().any(|p| p.label == *c))
        .collect();
    let smallest = classes
        .iter()
        .map(|c| points.iter().filter(|p| p.label == *c).count())
        .min()
        .expect("at least one class");
    let folds_used = folds.min(smallest);
    if folds_used < 2 {
        return Err(EvalError::Degenerate(format!(
            "a class has only {smallest} member(s); cannot form two folds"
        )));
    }

    let labels: Vec<Label> = points.iter().map(|p| p.label).collect();
    let assignment = stratified_folds(&labels, folds_used, seed);
    let index_of = |l: Label| classes.iter().position(|c| *c == l);

    let mut confusion = vec![vec![0usize; classes.len()]; classes.len()];
    let mut per_fold = Vec::with_capacity(folds_used);
    let mut converged = true;
    for fold in 0..folds_used {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (p, f) in points.iter().zip(&assignment) {
            if *f == fold {
                test.push(p);
            } else {
                train.push(p.clone());
            }
        }
        let model = fit(classifier, &train)?;
        let mut correct = 0usize;
        for p in &test {
            let pred = model.predict(&p.features);
            if pred == p.label {
                correct += 1;
            }
            let (Some(r), Some(c)) = (index_of(p.label), index_of(pred)) else {
                unreachable!("predicted label outside training classes")
            };
            confusion[r][c] += 1;
        }
        converged &= model.converged();
        per_fold.push(correct as f64 / test.len() as f64);
    }

    let mean_accuracy = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
    Ok(EvalReport {
        config: None,
        classifier: *classifier,
        granularity,
        seed,
        folds_requested: folds,
        folds_used,
        stratified: true,
        n_points: points.len(),
        classes,
        per_fold_accuracy: per_fold,
        mean_accuracy,
        confusion,
        baseline1_accuracy: baseline1_accuracy(&points, granularity)?,
        converged,
    })
}
