use std::f64::consts::PI;

use super::{EvalError, Label};

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
struct ClassStats {
    label: Label,
    log_prior: f64,
    mean: Vec<f64>,
    var: Vec<f64>,
}

/// Gaussian naive Bayes with maximum-likelihood per-class means and variances.
#[derive(Debug, Clone)]
pub struct GaussianNb {
    classes: Vec<ClassStats>,
}

impl GaussianNb {
    /// Needs at least two classes with at least two points each.
    pub fn fit(x: &[&[f64]], y: &[Label]) -> Result<Self, EvalError> {
        if x.len() != y.len() {
            return Err(EvalError::InvalidParameter(format!(
                "{} feature rows for {} labels",
                x.len(),
                y.len()
            )));
        }
        let dim = x.first().map_or(0, |r| r.len());
        let mut classes = Vec::new();
        for label in Label::ALL {
            let rows: Vec<&[f64]> = x
                .iter()
                .zip(y)
                .filter(|(_, l)| **l == label)
                .map(|(r, _)| *r)
                .collect();
            if rows.is_empty() {
                continue;
            }
            if rows.len() < 2 {
                return Err(EvalError::Degenerate(format!(
                    "class '{label}' has a single training point"
                )));
            }
            let n = rows.len() as f64;
            let mean: Vec<f64> = (0..dim)
                .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
                .collect();
            let var = (0..dim)
                .map(|j| {
                    let v = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                    v.max(VARIANCE_FLOOR)
                })
                .collect();
            classes.push(ClassStats {
                label,
                log_prior: (n / x.len() as f64).ln(),
                mean,
                var,
            });
        }
        if classes.len() < 2 {
            return Err(EvalError::Degenerate(
                "naive Bayes needs at least two classes".into(),
            ));
        }
        Ok(Self { classes })
    }

    fn log_joint(&self, x: &[f64]) -> Vec<(Label, f64)> {
        self.classes
            .iter()
            .map(|c| {
                let ll: f64 = x
                    .iter()
                    .zip(c.mean.iter().zip(&c.var))
                    .map(|(&v, (&m, &s2))| -0.5 * (2.0 * PI * s2).ln() - (v - m).powi(2) / (2.0 * s2))
                    .sum();
                (c.label, c.log_prior + ll)
            })
            .collect()
    }

    /// Normalized class posteriors in label order.
    pub fn posteriors(&self, x: &[f64]) -> Vec<(Label, f64)> {
        let joint = self.log_joint(x);
        let max = joint.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = joint.iter().map(|(_, l)| (l - max).exp()).sum();
        joint
            .into_iter()
            .map(|(label, l)| (label, (l - max).exp() / total))
            .collect()
    }

    /// Highest log-posterior; exact ties go to the earlier label.
    pub fn predict(&self, x: &[f64]) -> Label {
        let mut best: Option<(Label, f64)> = None;
        for (label, lp) in self.log_joint(x) {
            match best {
                Some((_, b)) if lp <= b => {}
                _ => best = Some((label, lp)),
            }
        }
        best.expect("at least two classes").0
    }
}
