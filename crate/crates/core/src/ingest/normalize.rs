use super::{Direction, RawDataset};
use crate::index::{Entity, IndicatorVector};

/// Min-max mapping of one indicator column onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    pub min: f64,
    pub max: f64,
    pub direction: Direction,
}

impl Scaling {
    /// Raw value to `[0, 1]`, reflected for `LowerIsBetter` and clipped.
    /// A degenerate range maps everything to 1.
    pub fn apply(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if !(span > 0.0) {
            return 1.0;
        }
        let t = match self.direction {
            Direction::HigherIsBetter => (x - self.min) / span,
            Direction::LowerIsBetter => (self.max - x) / span,
        };
        t.clamp(0.0, 1.0)
    }

    /// Inverse of [`Scaling::apply`] on `[0, 1]`; a degenerate range returns `min`.
    pub fn invert(&self, v: f64) -> f64 {
        let span = self.max - self.min;
        if !(span > 0.0) {
            return self.min;
        }
        match self.direction {
            Direction::HigherIsBetter => self.min + v * span,
            Direction::LowerIsBetter => self.max - v * span,
        }
    }
}

/// Per-column scalings: declared bounds when present, else the observed range.
/// A column with no observed value gets an empty range.
pub fn scalings(raw: &RawDataset) -> Vec<Scaling> {
    raw.schema
        .defs()
        .iter()
        .enumerate()
        .map(|(k, def)| {
            let (min, max) = def.bounds.unwrap_or_else(|| {
                let observed = raw.rows.iter().filter_map(|r| r.values.get(k).copied().flatten());
                observed.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
            });
            Scaling {
                min,
                max,
                direction: def.direction,
            }
        })
        .collect()
}

/// Min-max scales every indicator into `[0, 1]`.
///
/// Declared bounds take precedence over the observed range; values outside
/// declared bounds are clipped. `LowerIsBetter` columns are reflected so that
/// 1 is always the best value. A constant column maps every present cell to 1.
pub fn normalize(raw: &RawDataset) -> Vec<Entity> {
    let scales = scalings(raw);
    raw.rows
        .iter()
        .map(|row| {
            let cells = scales
                .iter()
                .enumerate()
                .map(|(k, s)| row.values.get(k).copied().flatten().map(|x| s.apply(x)))
                .collect();
            let values = IndicatorVector::new(cells).expect("normalized cells lie in [0, 1]");
            Entity::new(row.name.clone(), values)
        })
        .collect()
}
