//! Labeled synthetic country datasets with class-ordered indicator values
//! and controllable missingness.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{Label, LabelSet};
use crate::ingest::{Direction, IndicatorDef, Pillar, RawDataset, RawRow, Schema};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
    #[error("cannot force {quota} complete countries out of {n_countries} at missing rate {rate}")]
    Quota {
        quota: usize,
        n_countries: usize,
        rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_countries: usize,
    /// High, Mid, Low shares; must sum to 1.
    pub class_proportions: [f64; 3],
    pub n_indicators: usize,
    pub missing_rate: f64,
    pub class_separation: f64,
    pub seed: u64,
    /// Countries kept fully observed so the donor pool is never empty.
    pub complete_quota: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_countries: 190,
            class_proportions: [45.0 / 190.0, 55.0 / 190.0, 90.0 / 190.0],
            n_indicators: 16,
            missing_rate: 0.25,
            class_separation: 4.0,
            seed: 0,
            complete_quota: 10,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.to_string()));
        if self.n_countries == 0 {
            return bad("n_countries must be positive");
        }
        if self.n_indicators == 0 {
            return bad("n_indicators must be positive");
        }
        if self.class_proportions.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return bad("class proportions must be non-negative");
        }
        if (self.class_proportions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("class proportions must sum to 1");
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return bad("missing_rate must lie in [0, 1)");
        }
        if !(self.class_separation.is_finite() && self.class_separation > 0.0) {
            return bad("class_separation must be positive");
        }
        if self.missing_rate > 0.0 {
            let n = self.n_countries as f64;
            let quota = self.complete_quota as f64;
            if self.complete_quota >= self.n_countries || self.missing_rate * n / (n - quota) >= 1.0 {
                return Err(SynthError::Quota {
                    quota: self.complete_quota,
                    n_countries: self.n_countries,
                    rate: self.missing_rate,
                });
            }
        }
        Ok(())
    }
}

/// Splits `n` by `proportions` with largest-remainder rounding; ties go to
/// the earlier class.
pub fn class_counts(n: usize, proportions: &[f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = proportions.iter().map(|p| p * n as f64).collect();
    let mut counts = [0usize; 3];
    for (c, e) in counts.iter_mut().zip(&exact) {
        *c = (e + 1e-9).floor() as usize;
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - counts[a] as f64;
        let rb = exact[b] - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Class mean of every indicator in normalized space.
fn class_mean(label: Label) -> f64 {
    match label {
        Label::High => 5.0 / 6.0,
        Label::Mid => 0.5,
        Label::Low => 1.0 / 6.0,
    }
}

fn sample_unit(rng: &mut ChaCha8Rng, dist: &Normal<f64>) -> f64 {
    loop {
        let v = dist.sample(rng);
        if (0.0..=1.0).contains(&v) {
            return v;
        }
    }
}

/// Schema used for generated data: ids `ind01..`, scale 0..100, every
/// fourth indicator lower-is-better.
pub fn synth_schema(n_indicators: usize) -> Schema {
    let pillars = [
        Pillar::Technology,
        Pillar::Industry,
        Pillar::UserEngagement,
        Pillar::GovernmentRegulation,
    ];
    let defs = (0..n_indicators)
        .map(|k| IndicatorDef {
            id: format!("ind{:02}", k + 1),
            display_name: format!("Indicator {}", k + 1),
            pillar: pillars[k % pillars.len()].clone(),
            direction: if k % 4 == 3 {
                Direction::LowerIsBetter
            } else {
                Direction::HigherIsBetter
            },
            bounds: Some((0.0, 100.0)),
        })
        .collect();
    Schema::new(defs).expect("generated ids are unique")
}

pub fn generate(cfg: &SynthConfig) -> Result<(RawDataset, LabelSet), SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_countries;
    let width = cfg.n_indicators;

    let counts = class_counts(n, &cfg.class_proportions);
    let mut labels: Vec<Label> = Label::ALL
        .iter()
        .zip(counts)
        .flat_map(|(l, c)| std::iter::repeat_n(*l, c))
        .collect();
    labels.shuffle(&mut rng);

    let std = 1.0 / cfg.class_separation;
    let dists: Vec<(Label, Normal<f64>)> = Label::ALL
        .iter()
        .map(|&l| (l, Normal::new(class_mean(l), std).expect("finite std")))
        .collect();

    let quota = if cfg.missing_rate > 0.0 { cfg.complete_quota } else { 0 };
    let mut forced = vec![false; n];
    for i in index::sample(&mut rng, n, quota.min(n)) {
        forced[i] = true;
    }
    let p = if quota > 0 {
        cfg.missing_rate * n as f64 / (n - quota) as f64
    } else {
        cfg.missing_rate
    };

    let schema = synth_schema(width);
    let digits = (n.max(2) - 1).to_string().len().max(3);
    let mut rows = Vec::with_capacity(n);
    let mut label_set = Vec::with_capacity(n);
    for (i, &label) in labels.iter().enumerate() {
        let dist = &dists.iter().find(|(l, _)| *l == label).expect("all labels").1;
        let mut values: Vec<Option<f64>> = schema
            .defs()
            .iter()
            .map(|def| {
                let v = sample_unit(&mut rng, dist);
                let raw = match def.direction {
                    Direction::HigherIsBetter => v,
                    Direction::LowerIsBetter => 1.0 - v,
                };
                Some(raw * 100.0)
            })
            .collect();
        if !forced[i] && p > 0.0 {
            for cell in values.iter_mut() {
                if rng.random::<f64>() < p {
                    *cell = None;
                }
            }
            if values.iter().all(Option::is_none) {
                let keep = rng.random_range(0..width);
                let def = &schema.defs()[keep];
                let v = sample_unit(&mut rng, dist);
                let raw = match def.direction {
                    Direction::HigherIsBetter => v,
                    Direction::LowerIsBetter => 1.0 - v,
                };
                values[keep] = Some(raw * 100.0);
            }
        }
        let name = format!("country-{:0digits$}", i + 1);
        label_set.push((name.clone(), label));
        rows.push(RawRow { name, values });
    }
    Ok((RawDataset { schema, rows }, label_set))
}
