//! Brute-force solver for the linear-kernel SVM dual on tiny problems.
//!
//! Every split of the multipliers into zero / at-bound / free is tried; the
//! free multipliers and the bias come from the stationarity equations of that
//! face. The best feasible candidate is the global optimum because the dual
//! objective is concave.

#![allow(dead_code)]

pub struct QpSolution {
    pub alpha: Vec<f64>,
    pub w: Vec<f64>,
    /// Pinned by a free multiplier; `None` if every multiplier sits on a bound.
    pub b: Option<f64>,
    pub objective: f64,
}

impl QpSolution {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.b.expect("free multiplier")
    }
}

/// Hand-made binary sets, each with free support vectors so the bias is unique.
pub struct HandSet {
    pub name: &'static str,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

pub fn hand_sets() -> Vec<HandSet> {
    let set = |name, pts: &[(f64, f64)], y: &[f64]| HandSet {
        name,
        x: pts.iter().map(|&(a, b)| vec![a, b]).collect(),
        y: y.to_vec(),
    };
    vec![
        set(
            "separable",
            &[(1.0, 2.0), (3.0, 1.0), (2.0, 5.0), (7.0, 6.0), (9.0, 4.0), (6.0, 9.0)],
            &[-1.0, -1.0, -1.0, 1.0, 1.0, 1.0],
        ),
        set(
            "overlap",
            &[
                (0.6, 1.8),
                (2.4, 1.2),
                (3.0, 3.0),
                (1.8, 3.6),
                (2.7, 2.7),
                (4.2, 4.8),
                (5.4, 3.6),
                (3.6, 2.1),
            ],
            &[-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0],
        ),
        set(
            "diagonal",
            &[
                (0.0, 5.0),
                (1.0, 4.5),
                (0.5, 3.0),
                (2.5, 2.5),
                (4.5, 0.5),
                (4.0, 2.0),
                (5.0, 0.0),
                (3.0, 1.0),
                (1.75, 2.75),
                (3.25, 2.25),
            ],
            &[-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0],
        ),
        set(
            "scaled",
            &[(2.0, 4.0), (4.0, 2.0), (6.0, 7.0), (8.0, 6.0), (3.0, 2.0)],
            &[-1.0, -1.0, 1.0, 1.0, -1.0],
        ),
        set(
            "unbalanced",
            &[(1.6, 1.6), (2.0, 2.4), (2.4, 2.0), (2.8, 3.2), (3.2, 2.4), (6.4, 5.6), (4.4, 4.8)],
            &[-1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0],
        ),
    ]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Gaussian elimination with partial pivoting; None when singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * p;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut out = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * out[k]).sum();
        out[row] = (rhs[row] - s) / a[row][row];
    }
    Some(out)
}

pub fn solve_dual(x: &[Vec<f64>], y: &[f64], c: f64) -> QpSolution {
    let n = x.len();
    assert!(n <= 12, "brute force is exponential");
    let k: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| dot(a, b)).collect()).collect();
    let objective = |alpha: &[f64]| {
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
            }
        }
        alpha.iter().sum::<f64>() - 0.5 * q
    };

    let mut best: Option<(f64, Vec<f64>, Option<f64>)> = None;
    let mut state = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let at_c: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let mut alpha = vec![0.0; n];
        for &i in &at_c {
            alpha[i] = c;
        }
        let fixed_sum: f64 = at_c.iter().map(|&j| c * y[j]).sum();
        let candidate = if free.is_empty() {
            (fixed_sum.abs() < 1e-9).then_some(None)
        } else {
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut rhs = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = y[j] * k[i][j];
                }
                a[r][m] = -1.0;
                rhs[r] = y[i] - at_c.iter().map(|&j| c * y[j] * k[i][j]).sum::<f64>();
            }
            for (s, &j) in free.iter().enumerate() {
                a[m][s] = y[j];
            }
            rhs[m] = -fixed_sum;
            solve_linear(a, rhs).and_then(|sol| {
                let inside = sol[..m].iter().all(|&v| v > -1e-9 && v < c + 1e-9);
                inside.then(|| {
                    for (s, &i) in free.iter().enumerate() {
                        alpha[i] = sol[s].clamp(0.0, c);
                    }
                    Some(sol[m])
                })
            })
        };
        if let Some(b) = candidate {
            let obj = objective(&alpha);
            if best.as_ref().is_none_or(|(o, _, _)| obj > *o + 1e-12) {
                best = Some((obj, alpha, b));
            }
        }
        // next ternary state
        let mut pos = 0;
        while pos < n && state[pos] == 2 {
            state[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
        state[pos] += 1;
    }
    let (objective, alpha, b) = best.expect("alpha = 0 is always feasible");
    let dim = x[0].len();
    let w = (0..dim)
        .map(|d| (0..n).map(|i| alpha[i] * y[i] * x[i][d]).sum())
        .collect();
    QpSolution { alpha, w, b, objective }
}
