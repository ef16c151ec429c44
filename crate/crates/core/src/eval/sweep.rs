use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::report::{percent, render_grid};
use super::{cross_validate, ClassifierKind, EvalError, EvalReport, Granularity, LabeledPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Sigmoid centre.
    Gamma,
    /// Number of imputation donors.
    Neighbors,
}

impl SweepAxis {
    pub fn symbol(self) -> &'static str {
        match self {
            SweepAxis::Gamma => "γ",
            SweepAxis::Neighbors => "|T_c|",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Gamma => "gamma",
            SweepAxis::Neighbors => "neighbors",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(SweepAxis::Gamma),
            "neighbors" | "k" => Ok(SweepAxis::Neighbors),
            other => Err(EvalError::InvalidParameter(format!(
                "unknown sweep axis '{other}' (expected gamma|neighbors)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub granularity: Granularity,
    pub accuracies: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub rows: Vec<SweepRow>,
    #[serde(skip)]
    pub reports: Vec<EvalReport>,
}

impl SweepTable {
    pub fn row(&self, granularity: Granularity) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|r| r.granularity == granularity)
            .map(|r| r.accuracies.as_slice())
    }

    /// One header row of axis values and one row per granularity, in percent.
    pub fn render(&self) -> String {
        let mut header = vec![self.axis.symbol().to_string()];
        header.extend(self.values.iter().map(|v| v.to_string()));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.granularity.name().to_string()];
                cells.extend(r.accuracies.iter().map(|a| percent(*a)));
                cells
            })
            .collect();
        render_grid(&header, &body)
    }
}

/// Parses `start:end:step` (inclusive) or a comma-separated list.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, EvalError> {
    let bad = || EvalError::InvalidParameter(format!("cannot parse sweep values '{spec}'"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let values = if parts.len() == 3 {
        let nums = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || end < start {
            return Err(bad());
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else if parts.len() == 1 {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        return Err(bad());
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

/// Cross-validates the points built for every axis value under every granularity.
pub fn sweep<F>(
    build_points: F,
    axis: SweepAxis,
    values: &[f64],
    classifier: &ClassifierKind,
    folds: usize,
    granularities: &[Granularity],
    seed: u64,
) -> Result<SweepTable, EvalError>
where
    F: Fn(f64) -> Result<Vec<LabeledPoint>, EvalError>,
{
    let mut rows: Vec<SweepRow> = granularities
        .iter()
        .map(|&granularity| SweepRow {
            granularity,
            accuracies: Vec::with_capacity(values.len()),
        })
        .collect();
    let mut reports = Vec::new();
    for &v in values {
        let points = build_points(v)?;
        for row in rows.iter_mut() {
            let report = cross_validate(&points, classifier, folds, row.granularity, seed)?;
            row.accuracies.push(report.mean_accuracy);
            reports.push(report);
        }
    }
    Ok(SweepTable {
        axis,
        values: values.to_vec(),
        rows,
        reports,
    })
}
