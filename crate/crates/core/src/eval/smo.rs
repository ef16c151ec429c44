//! Linear support vector machine trained with Platt's sequential minimal
//! optimization.
//!
//! The binary solver follows Platt's outer loop (alternate full sweeps with
//! sweeps over non-bound multipliers), the second-choice heuristic
//! `max |E1 - E2|`, and the analytic two-variable update with clipping to the
//! box `[0, C]`. Errors are cached for every point and updated after each
//! step. Multiclass problems are split one-vs-one.

use serde::{Deserialize, Serialize};

use super::{EvalError, Label};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoConfig {
    /// Complexity (box) constant.
    pub c: f64,
    /// KKT tolerance.
    pub tol: f64,
    /// Round-off epsilon.
    pub eps: f64,
    /// Cap on outer-loop sweeps.
    pub max_passes: usize,
    /// Min-max scale features on the training set before fitting.
    pub normalize: bool,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            eps: 1e-12,
            max_passes: 10_000,
            normalize: true,
        }
    }
}

/// Binary SVM with a degree-1 polynomial (dot product) kernel.
///
/// Decision function: `w·x - b`, positive class for values `>= 0`.
#[derive(Debug, Clone)]
pub struct BinarySvm {
    weights: Vec<f64>,
    bias: f64,
    alphas: Vec<f64>,
    converged: bool,
    passes: usize,
    objective_trace: Vec<f64>,
    max_kkt_violation: f64,
}

impl BinarySvm {
    /// `y` holds `+1.0` / `-1.0`.
    pub fn train(x: &[&[f64]], y: &[f64], cfg: &SmoConfig) -> Result<Self, EvalError> {
        if x.len() != y.len() {
            return Err(EvalError::InvalidParameter(format!(
                "{} feature rows for {} targets",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(EvalError::Degenerate(
                "binary SVM needs at least two points".into(),
            ));
        }
        if y.iter().any(|&t| t != 1.0 && t != -1.0) {
            return Err(EvalError::InvalidParameter("targets must be +1 or -1".into()));
        }
        if !(y.contains(&1.0) && y.contains(&-1.0)) {
            return Err(EvalError::Degenerate(
                "binary SVM needs both classes present".into(),
            ));
        }
        if !(cfg.c > 0.0) {
            return Err(EvalError::InvalidParameter("C must be positive".into()));
        }
        let mut solver = Solver::new(x, y, cfg);
        solver.run();
        Ok(solver.finish(x))
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) - self.bias
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        if self.decision(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// False when the sweep cap was hit before the KKT conditions settled.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    /// Dual objective after initialization and after every successful step.
    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    pub fn dual_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace starts at zero")
    }

    pub fn max_kkt_violation(&self) -> f64 {
        self.max_kkt_violation
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Solver<'a> {
    cfg: &'a SmoConfig,
    y: &'a [f64],
    n: usize,
    gram: Vec<f64>,
    alpha: Vec<f64>,
    b: f64,
    // E_i = u_i - y_i with u_i = sum_j alpha_j y_j K_ij - b
    err: Vec<f64>,
    trace: Vec<f64>,
    converged: bool,
    passes: usize,
    seed: u64,
}

impl<'a> Solver<'a> {
    fn new(x: &[&[f64]], y: &'a [f64], cfg: &'a SmoConfig) -> Self {
        let n = x.len();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let k = dot(x[i], x[j]);
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }
        Self {
            cfg,
            y,
            n,
            gram,
            alpha: vec![0.0; n],
            b: 0.0,
            err: y.iter().map(|t| -t).collect(),
            trace: vec![0.0],
            converged: false,
            passes: 0,
            seed: 0x9e37_79b9_7f4a_7c15,
        }
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.n + j]
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.cfg.c
    }

    // Deterministic stand-in for Platt's random starting point.
    fn next_start(&mut self) -> usize {
        self.seed ^= self.seed << 13;
        self.seed ^= self.seed >> 7;
        self.seed ^= self.seed << 17;
        (self.seed % self.n as u64) as usize
    }

    fn objective(&self) -> f64 {
        // sum(alpha) - 1/2 sum_i alpha_i y_i (u_i + b)
        let mut w = 0.0;
        for i in 0..self.n {
            let out = self.err[i] + self.y[i] + self.b;
            w += self.alpha[i] - 0.5 * self.alpha[i] * self.y[i] * out;
        }
        w
    }

    fn run(&mut self) {
        let mut examine_all = true;
        let mut changed = 0usize;
        while changed > 0 || examine_all {
            if self.passes >= self.cfg.max_passes {
                return;
            }
            self.passes += 1;
            changed = 0;
            for i in 0..self.n {
                if examine_all || self.is_free(i) {
                    changed += usize::from(self.examine(i));
                }
            }
            if examine_all {
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        self.converged = true;
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.err[i] * self.y[i];
        (r < -self.cfg.tol && self.alpha[i] < self.cfg.c) || (r > self.cfg.tol && self.alpha[i] > 0.0)
    }

    fn examine(&mut self, i2: usize) -> bool {
        if !self.violates_kkt(i2) {
            return false;
        }
        let e2 = self.err[i2];
        let free: Vec<usize> = (0..self.n).filter(|&i| self.is_free(i)).collect();
        if free.len() > 1 {
            let mut best = None;
            let mut gap = -1.0;
            for &i in &free {
                let d = (self.err[i] - e2).abs();
                if d > gap {
                    gap = d;
                    best = Some(i);
                }
            }
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        if !free.is_empty() {
            let start = self.next_start();
            for off in 0..free.len() {
                let i1 = free[(start + off) % free.len()];
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        let start = self.next_start();
        for off in 0..self.n {
            if self.take_step((start + off) % self.n, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let c = self.cfg.c;
        let eps = self.cfg.eps;
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.err[i1], self.err[i2]);
        let s = y1 * y2;

        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a1 + a2 - c).max(0.0), (a1 + a2).min(c))
        };
        if lo >= hi {
            return false;
        }

        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let eta = k11 + k22 - 2.0 * k12;
        let mut new_a2 = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // Objective along the constraint line as a function of the step t
            // applied to alpha2: W(t) = t*y2*(E1 - E2) - eta*t^2/2.
            let gain = |t: f64| t * y2 * (e1 - e2) - 0.5 * eta * t * t;
            let (w_lo, w_hi) = (gain(lo - a2), gain(hi - a2));
            if w_lo > w_hi + eps {
                lo
            } else if w_hi > w_lo + eps {
                hi
            } else {
                a2
            }
        };
        if new_a2 < 1e-8 {
            new_a2 = 0.0;
        } else if new_a2 > c - 1e-8 {
            new_a2 = c;
        }
        if (new_a2 - a2).abs() < eps * (new_a2 + a2 + eps) {
            return false;
        }
        let mut new_a1 = a1 + s * (a2 - new_a2);
        if new_a1 < 0.0 {
            new_a2 += s * new_a1;
            new_a1 = 0.0;
        } else if new_a1 > c {
            new_a2 += s * (new_a1 - c);
            new_a1 = c;
        }
        // round-off in the equality update can leave alpha1 an ulp off a bound
        let snap = 1e-12 * c;
        if new_a1 < snap {
            new_a1 = 0.0;
        } else if new_a1 > c - snap {
            new_a1 = c;
        }

        let d1 = y1 * (new_a1 - a1);
        let d2 = y2 * (new_a2 - a2);
        let b1 = e1 + d1 * k11 + d2 * k12 + self.b;
        let b2 = e2 + d1 * k12 + d2 * k22 + self.b;
        let new_b = if new_a1 > 0.0 && new_a1 < c {
            b1
        } else if new_a2 > 0.0 && new_a2 < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };

        let db = new_b - self.b;
        for i in 0..self.n {
            self.err[i] += d1 * self.k(i1, i) + d2 * self.k(i2, i) - db;
        }
        self.alpha[i1] = new_a1;
        self.alpha[i2] = new_a2;
        self.b = new_b;
        self.trace.push(self.objective());
        true
    }

    fn finish(self, x: &[&[f64]]) -> BinarySvm {
        let dim = x[0].len();
        let mut weights = vec![0.0; dim];
        for (i, row) in x.iter().enumerate() {
            let coef = self.alpha[i] * self.y[i];
            if coef != 0.0 {
                for (w, v) in weights.iter_mut().zip(row.iter()) {
                    *w += coef * v;
                }
            }
        }
        let c = self.cfg.c;
        let max_kkt_violation = (0..self.n)
            .map(|i| {
                let r = self.err[i] * self.y[i];
                if self.alpha[i] <= 0.0 {
                    (-r).max(0.0)
                } else if self.alpha[i] >= c {
                    r.max(0.0)
                } else {
                    r.abs()
                }
            })
            .fold(0.0, f64::max);
        BinarySvm {
            weights,
            bias: self.b,
            alphas: self.alpha,
            converged: self.converged,
            passes: self.passes,
            objective_trace: self.trace,
            max_kkt_violation,
        }
    }
}

/// Per-feature min-max scaling fitted on a training set; constant features map to 0.
#[derive(Debug, Clone)]
struct MinMaxScaler {
    min: Vec<f64>,
    span: Vec<f64>,
}

impl MinMaxScaler {
    fn fit(x: &[&[f64]]) -> Self {
        let dim = x[0].len();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for row in x {
            for j in 0..dim {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        let span = min.iter().zip(&max).map(|(a, b)| b - a).collect();
        Self { min, span }
    }

    fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.min.iter().zip(&self.span))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }
}

/// One-vs-one ensemble of binary SMO machines with majority voting.
#[derive(Debug, Clone)]
pub struct MulticlassSvm {
    scaler: Option<MinMaxScaler>,
    classes: Vec<Label>,
    machines: Vec<(Label, Label, BinarySvm)>,
}

impl MulticlassSvm {
    pub fn fit(x: &[&[f64]], y: &[Label], cfg: &SmoConfig) -> Result<Self, EvalError> {
        if x.len() != y.len() || x.is_empty() {
            return Err(EvalError::Degenerate(
                "SVM needs a non-empty training set".into(),
            ));
        }
        let scaler = cfg.normalize.then(|| MinMaxScaler::fit(x));
        let scaled: Vec<Vec<f64>> = match &scaler {
            Some(s) => x.iter().map(|r| s.apply(r)).collect(),
            None => x.iter().map(|r| r.to_vec()).collect(),
        };
        let classes: Vec<Label> = Label::ALL.into_iter().filter(|l| y.contains(l)).collect();
        if classes.len() < 2 {
            return Err(EvalError::Degenerate("SVM needs at least two classes".into()));
        }
        let mut machines = Vec::new();
        for (i, &pos) in classes.iter().enumerate() {
            for &neg in &classes[i + 1..] {
                let (rows, targets): (Vec<&[f64]>, Vec<f64>) = scaled
                    .iter()
                    .zip(y)
                    .filter(|(_, l)| **l == pos || **l == neg)
                    .map(|(r, l)| (r.as_slice(), if *l == pos { 1.0 } else { -1.0 }))
                    .unzip();
                machines.push((pos, neg, BinarySvm::train(&rows, &targets, cfg)?));
            }
        }
        Ok(Self {
            scaler,
            classes,
            machines,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let x = match &self.scaler {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        };
        let mut votes = [0usize; 3];
        for (pos, neg, m) in &self.machines {
            let winner = if m.decision(&x) >= 0.0 { pos } else { neg };
            votes[*winner as usize] += 1;
        }
        // first maximum in label order wins ties
        let mut best = self.classes[0];
        for &l in &self.classes[1..] {
            if votes[l as usize] > votes[best as usize] {
                best = l;
            }
        }
        best
    }

    pub fn converged(&self) -> bool {
        self.machines.iter().all(|(_, _, m)| m.converged())
    }

    pub fn machines(&self) -> impl Iterator<Item = (Label, Label, &BinarySvm)> {
        self.machines.iter().map(|(a, b, m)| (*a, *b, m))
    }
}
