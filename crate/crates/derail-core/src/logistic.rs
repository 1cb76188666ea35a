//! L2-regularized logistic regression with ANOVA-F percentile feature
//! selection, grid-searched 5-fold cross-validation, and paired scoring.
//!
//! The objective is `(1/C) * 0.5*||w||^2 + sum_i ln(1 + exp(-s_i*(w.x_i+b)))`
//! with `s_i` in {-1,+1} and an unpenalized bias, minimized by damped Newton
//! iteration with backtracking line search. Everything is deterministic for
//! a fixed seed, including fold assignment and grid tie-breaking.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{dot, Matrix};
use crate::seed::SeedSplitter;

#[derive(Error, Debug)]
pub enum ModelError {
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0}")]
    TooFewSamples(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("feature registries differ across models")]
    RegistryMismatch,
}

/// Per-column standardization parameters. Constant columns pass through
/// unchanged: they are recorded with mean 0 and std 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Standardizer {
        let n = x.rows().max(1) as f64;
        let d = x.cols();
        let mut means = vec![0.0; d];
        let mut stds = vec![0.0; d];
        for i in 0..x.rows() {
            for (j, v) in x.row(i).iter().enumerate() {
                means[j] += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        for i in 0..x.rows() {
            for (j, v) in x.row(i).iter().enumerate() {
                let dev = v - means[j];
                stds[j] += dev * dev;
            }
        }
        for (j, s) in stds.iter_mut().enumerate() {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                means[j] = 0.0;
                *s = 1.0;
            }
        }
        Standardizer { means, stds }
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.means[j]) / self.stds[j];
            }
        }
        out
    }

    pub fn transform_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(j, v)| (v - self.means[j]) / self.stds[j]).collect()
    }
}

/// Standardize columns to mean 0, std 1 (population std). Returns the
/// transformed matrix and the fitted parameters.
pub fn standardize(x: &Matrix) -> (Matrix, Standardizer) {
    let scaler = Standardizer::fit(x);
    (scaler.transform(x), scaler)
}

/// One-way ANOVA F score per feature column for binary labels.
///
/// Columns with zero within-class variance but nonzero between-class
/// variance get an infinity sentinel (ranked first); all-equal columns get
/// 0.
pub fn anova_f(x: &Matrix, y: &[u8]) -> Result<Vec<f64>, ModelError> {
    if y.len() != x.rows() {
        return Err(ModelError::DimensionMismatch { expected: x.rows(), found: y.len() });
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let n0 = y.len() - n1;
    if n0 == 0 || n1 == 0 {
        return Err(ModelError::SingleClass);
    }
    let n = y.len() as f64;
    let mut scores = Vec::with_capacity(x.cols());
    for j in 0..x.cols() {
        let col: Vec<f64> = (0..x.rows()).map(|i| x.get(i, j)).collect();
        let class_values = |class: u8| -> Vec<f64> {
            col.iter().zip(y).filter(|(_, &l)| l == class).map(|(&v, _)| v).collect()
        };
        let g0 = class_values(0);
        let g1 = class_values(1);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let m0 = mean(&g0);
        let m1 = mean(&g1);
        let grand = col.iter().sum::<f64>() / n;
        let ssb = g0.len() as f64 * (m0 - grand).powi(2) + g1.len() as f64 * (m1 - grand).powi(2);
        // a bitwise-constant group contributes exactly zero within-class variance
        let ssw_of = |v: &[f64], m: f64| -> f64 {
            if v.iter().all(|&a| a == v[0]) {
                0.0
            } else {
                v.iter().map(|a| (a - m).powi(2)).sum()
            }
        };
        let ssw = ssw_of(&g0, m0) + ssw_of(&g1, m1);
        let df_between = 1.0;
        let df_within = n - 2.0;
        let score = if ssw == 0.0 {
            if ssb > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            (ssb / df_between) / (ssw / df_within)
        };
        scores.push(score);
    }
    Ok(scores)
}

/// Keep the `floor(p*d/100)` (at least 1) highest-scoring features; ties
/// break toward the lower feature index.
pub fn select_percentile(scores: &[f64], percentile: u32) -> Vec<bool> {
    assert!(percentile > 0 && percentile <= 100, "percentile must be in (0,100]");
    let d = scores.len();
    if d == 0 {
        return Vec::new();
    }
    let k = ((percentile as usize * d) / 100).max(1);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut mask = vec![false; d];
    for &i in order.iter().take(k) {
        mask[i] = true;
    }
    mask
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + exp(t)) without overflow.
fn ln1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Solve `a * x = b` for symmetric positive definite `a` (k x k row-major)
/// via Cholesky. Returns None when the factorization breaks down.
fn cholesky_solve(a: &[f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut sum = a[i * k + j];
            for m in 0..j {
                sum -= l[i * k + m] * l[j * k + m];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * k + i] = sum.sqrt();
            } else {
                l[i * k + j] = sum / l[j * k + j];
            }
        }
    }
    // forward then backward substitution
    let mut y = vec![0.0f64; k];
    for i in 0..k {
        let mut sum = b[i];
        for m in 0..i {
            sum -= l[i * k + m] * y[m];
        }
        y[i] = sum / l[i * k + i];
    }
    let mut x = vec![0.0f64; k];
    for i in (0..k).rev() {
        let mut sum = y[i];
        for m in i + 1..k {
            sum -= l[m * k + i] * x[m];
        }
        x[i] = sum / l[i * k + i];
    }
    Some(x)
}

/// Raw fit result with optimizer diagnostics.
#[derive(Debug, Clone)]
pub struct FittedLogreg {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective value after each Newton iteration, starting at the
    /// initial point. Non-increasing by construction of the line search.
    pub objective_trace: Vec<f64>,
    pub grad_inf_norm: f64,
    pub converged: bool,
}

const GRAD_TOL: f64 = 1e-8;
const MAX_NEWTON_ITERS: usize = 1000;

/// Objective value at (w, b): data log-loss plus the L2 term.
pub fn logreg_objective(x: &Matrix, y: &[u8], c: f64, weights: &[f64], bias: f64) -> f64 {
    let mut obj = 0.5 / c * weights.iter().map(|w| w * w).sum::<f64>();
    for i in 0..x.rows() {
        let z = dot(x.row(i), weights) + bias;
        let s = if y[i] == 1 { 1.0 } else { -1.0 };
        obj += ln1p_exp(-s * z);
    }
    obj
}

/// Fit by damped Newton iteration. Converges when the gradient infinity
/// norm drops below 1e-8, or stops after 1000 iterations.
pub fn fit_logreg(x: &Matrix, y: &[u8], c: f64) -> Result<FittedLogreg, ModelError> {
    if !x.all_finite() {
        return Err(ModelError::NonFinite);
    }
    if y.len() != x.rows() {
        return Err(ModelError::DimensionMismatch { expected: x.rows(), found: y.len() });
    }
    assert!(c > 0.0, "C must be positive");
    let n = x.rows();
    let d = x.cols();
    let k = d + 1; // weights plus bias
    let mut weights = vec![0.0f64; d];
    let mut bias = 0.0f64;
    let mut objective = logreg_objective(x, y, c, &weights, bias);
    let mut trace = vec![objective];
    let mut grad_inf = f64::INFINITY;
    let mut converged = false;

    for _ in 0..MAX_NEWTON_ITERS {
        // gradient
        let mut grad = vec![0.0f64; k];
        let mut residuals = vec![0.0f64; n];
        let mut curvatures = vec![0.0f64; n];
        for i in 0..n {
            let z = dot(x.row(i), &weights) + bias;
            let p = sigmoid(z);
            residuals[i] = p - f64::from(y[i]);
            curvatures[i] = p * (1.0 - p);
        }
        for i in 0..n {
            let row = x.row(i);
            for j in 0..d {
                grad[j] += residuals[i] * row[j];
            }
            grad[d] += residuals[i];
        }
        for j in 0..d {
            grad[j] += weights[j] / c;
        }
        grad_inf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_inf < GRAD_TOL {
            converged = true;
            break;
        }

        // Hessian over the augmented design [X | 1]
        let mut hess = vec![0.0f64; k * k];
        for i in 0..n {
            let r = curvatures[i];
            if r == 0.0 {
                continue;
            }
            let row = x.row(i);
            for a in 0..d {
                let ra = r * row[a];
                for b in a..d {
                    hess[a * k + b] += ra * row[b];
                }
                hess[a * k + d] += ra;
            }
            hess[d * k + d] += r;
        }
        for j in 0..d {
            hess[j * k + j] += 1.0 / c;
        }
        for a in 0..k {
            for b in 0..a {
                hess[a * k + b] = hess[b * k + a];
            }
        }

        let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut jitter = 0.0;
        let step = loop {
            let mut damped = hess.clone();
            if jitter > 0.0 {
                for j in 0..k {
                    damped[j * k + j] += jitter;
                }
            }
            match cholesky_solve(&damped, &neg_grad, k) {
                Some(s) => break s,
                None => {
                    jitter = if jitter == 0.0 { 1e-10 } else { jitter * 100.0 };
                    if jitter > 1.0 {
                        return Err(ModelError::Degenerate(
                            "Newton system not positive definite".into(),
                        ));
                    }
                }
            }
        };

        // backtracking line search (Armijo)
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut t = 1.0f64;
        let mut accepted = false;
        for _ in 0..60 {
            let trial_w: Vec<f64> =
                weights.iter().zip(&step).map(|(w, s)| w + t * s).collect();
            let trial_b = bias + t * step[d];
            let trial_obj = logreg_objective(x, y, c, &trial_w, trial_b);
            if trial_obj <= objective + 1e-4 * t * slope {
                weights = trial_w;
                bias = trial_b;
                objective = trial_obj;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no further progress possible at floating-point resolution
            break;
        }
        trace.push(objective);
    }

    Ok(FittedLogreg { weights, bias, objective_trace: trace, grad_inf_norm: grad_inf, converged })
}

/// A trained logistic model with everything needed to score raw (full,
/// unstandardized) feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub feature_names: Vec<String>,
    pub selection_mask: Vec<bool>,
    /// Weights over the selected, standardized features.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub chosen_c: f64,
    pub chosen_percentile: u32,
    pub scaler: Standardizer,
}

impl LogisticModel {
    /// Coefficients expanded to the full registry, zero where unselected.
    pub fn full_coefficients(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.selection_mask.len()];
        let mut wi = 0;
        for (j, &selected) in self.selection_mask.iter().enumerate() {
            if selected {
                out[j] = self.weights[wi];
                wi += 1;
            }
        }
        out
    }
}

/// P(positive class) for one raw feature vector.
pub fn predict_proba(model: &LogisticModel, x: &[f64]) -> Result<f64, ModelError> {
    if x.len() != model.feature_names.len() {
        return Err(ModelError::DimensionMismatch {
            expected: model.feature_names.len(),
            found: x.len(),
        });
    }
    let standardized = model.scaler.transform_row(x);
    let z: f64 = standardized
        .iter()
        .zip(&model.selection_mask)
        .filter(|(_, &m)| m)
        .map(|(v, _)| v)
        .zip(&model.weights)
        .map(|(v, w)| v * w)
        .sum::<f64>()
        + model.bias;
    Ok(sigmoid(z))
}

/// Hyperparameter grid and cross-validation shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub c_grid: Vec<f64>,
    pub percentile_grid: Vec<u32>,
    pub folds: usize,
    pub runs: usize,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            c_grid: (-4..=4).map(|e| 10f64.powi(e)).collect(),
            percentile_grid: (1..=10).map(|p| p * 10).collect(),
            folds: 5,
            runs: 10,
            seed: 0,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.c_grid.is_empty() || self.c_grid.iter().any(|&c| c <= 0.0) {
            return Err(ModelError::Degenerate("C grid must be positive and non-empty".into()));
        }
        if self.percentile_grid.is_empty()
            || self.percentile_grid.iter().any(|&p| p == 0 || p > 100)
        {
            return Err(ModelError::Degenerate("percentiles must lie in (0,100]".into()));
        }
        if self.folds < 2 {
            return Err(ModelError::Degenerate("need at least 2 folds".into()));
        }
        Ok(())
    }
}

/// How validation folds are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scoring {
    /// Plain 0/1 accuracy at threshold 0.5.
    Accuracy,
    /// Fraction of (toxic, healthy) pairs ranked correctly; ties score 0.5.
    Paired,
}

/// Seeded, stratified, group-preserving fold assignment. Samples sharing a
/// group id always land in the same fold.
pub fn assign_folds(
    y: &[u8],
    groups: Option<&[usize]>,
    folds: usize,
    rng: &mut impl rand::Rng,
) -> Result<Vec<usize>, ModelError> {
    let n = y.len();
    // unit = indivisible set of sample indices
    let mut units: Vec<Vec<usize>> = Vec::new();
    match groups {
        Some(g) => {
            if g.len() != n {
                return Err(ModelError::DimensionMismatch { expected: n, found: g.len() });
            }
            let mut by_group: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (i, &gid) in g.iter().enumerate() {
                by_group.entry(gid).or_default().push(i);
            }
            units.extend(by_group.into_values());
        }
        None => units.extend((0..n).map(|i| vec![i])),
    }
    // stratify: pure class-0 units, pure class-1 units, mixed units
    let stratum_of = |unit: &Vec<usize>| -> usize {
        let ones = unit.iter().filter(|&&i| y[i] == 1).count();
        if ones == 0 {
            0
        } else if ones == unit.len() {
            1
        } else {
            2
        }
    };
    let mut strata: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (ui, unit) in units.iter().enumerate() {
        strata[stratum_of(unit)].push(ui);
    }
    let mut fold_of = vec![0usize; n];
    let mut next_fold = 0usize;
    for stratum in &mut strata {
        stratum.shuffle(rng);
        for &ui in stratum.iter() {
            for &i in &units[ui] {
                fold_of[i] = next_fold;
            }
            next_fold = (next_fold + 1) % folds;
        }
    }
    // every training split must keep both classes
    for f in 0..folds {
        let mut c0 = 0;
        let mut c1 = 0;
        for i in 0..n {
            if fold_of[i] != f {
                if y[i] == 1 {
                    c1 += 1;
                } else {
                    c0 += 1;
                }
            }
        }
        if c0 == 0 || c1 == 0 {
            return Err(ModelError::Degenerate(format!(
                "training split for fold {f} contains a single class"
            )));
        }
    }
    Ok(fold_of)
}

fn fold_score(
    scoring: Scoring,
    probs: &[f64],
    y: &[u8],
    groups: Option<&[usize]>,
    indices: &[usize],
) -> f64 {
    match scoring {
        Scoring::Accuracy => {
            let correct = indices
                .iter()
                .enumerate()
                .filter(|(k, _)| {
                    let pred = u8::from(probs[*k] >= 0.5);
                    pred == y[indices[*k]]
                })
                .count();
            correct as f64 / indices.len() as f64
        }
        Scoring::Paired => {
            let groups = groups.expect("paired scoring requires groups");
            let mut by_pair: BTreeMap<usize, (Option<f64>, Option<f64>)> = BTreeMap::new();
            for (k, &i) in indices.iter().enumerate() {
                let slot = by_pair.entry(groups[i]).or_default();
                if y[i] == 1 {
                    slot.0 = Some(probs[k]);
                } else {
                    slot.1 = Some(probs[k]);
                }
            }
            let mut credit = 0.0;
            let mut total = 0usize;
            for (_, pair) in by_pair {
                if let (Some(toxic), Some(healthy)) = pair {
                    total += 1;
                    credit += if toxic > healthy {
                        1.0
                    } else if toxic == healthy {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
            if total == 0 {
                0.0
            } else {
                credit / total as f64
            }
        }
    }
}

/// Result of a grid search: the refitted model plus the winning cell's mean
/// cross-validation score.
#[derive(Debug, Clone)]
pub struct GridSearchOutcome {
    pub model: LogisticModel,
    pub best_mean_score: f64,
}

/// Grid search over (C, percentile) with seeded, stratified,
/// group-preserving k-fold cross-validation, then a refit on all data at
/// the winning cell. Ties prefer the larger percentile, then the smaller C.
pub fn grid_search_cv(
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    groups: Option<&[usize]>,
    scoring: Scoring,
    grid: &GridConfig,
) -> Result<GridSearchOutcome, ModelError> {
    grid.validate()?;
    if x.rows() != y.len() {
        return Err(ModelError::DimensionMismatch { expected: x.rows(), found: y.len() });
    }
    if feature_names.len() != x.cols() {
        return Err(ModelError::DimensionMismatch {
            expected: x.cols(),
            found: feature_names.len(),
        });
    }
    let per_class = y.iter().filter(|&&v| v == 1).count().min(y.len() - y.iter().filter(|&&v| v == 1).count());
    if per_class < grid.folds {
        return Err(ModelError::TooFewSamples(format!(
            "need at least {} samples per class for {}-fold CV",
            grid.folds, grid.folds
        )));
    }
    if scoring == Scoring::Paired && groups.is_none() {
        return Err(ModelError::Degenerate("paired scoring requires pair groups".into()));
    }

    let mut rng = SeedSplitter::new(grid.seed).rng("cv-folds", 0);
    let fold_of = assign_folds(y, groups, grid.folds, &mut rng)?;

    // mean validation score per (percentile, C) cell
    let n_cells = grid.percentile_grid.len() * grid.c_grid.len();
    let mut cell_scores = vec![0.0f64; n_cells];

    for fold in 0..grid.folds {
        let train_idx: Vec<usize> = (0..y.len()).filter(|&i| fold_of[i] != fold).collect();
        let val_idx: Vec<usize> = (0..y.len()).filter(|&i| fold_of[i] == fold).collect();
        if val_idx.is_empty() {
            return Err(ModelError::Degenerate(format!("fold {fold} is empty")));
        }
        let x_train = x.select_rows(&train_idx);
        let y_train: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
        let (x_train_std, scaler) = standardize(&x_train);
        let f_scores = anova_f(&x_train_std, &y_train)?;

        let x_val = x.select_rows(&val_idx);
        let x_val_std = scaler.transform(&x_val);

        for (pi, &p) in grid.percentile_grid.iter().enumerate() {
            let mask = select_percentile(&f_scores, p);
            let x_sel = x_train_std.select_columns(&mask);
            let x_val_sel = x_val_std.select_columns(&mask);
            for (ci, &c) in grid.c_grid.iter().enumerate() {
                let fit = fit_logreg(&x_sel, &y_train, c)?;
                let probs: Vec<f64> = (0..x_val_sel.rows())
                    .map(|i| sigmoid(dot(x_val_sel.row(i), &fit.weights) + fit.bias))
                    .collect();
                cell_scores[pi * grid.c_grid.len() + ci] +=
                    fold_score(scoring, &probs, y, groups, &val_idx) / grid.folds as f64;
            }
        }
    }

    // winner: best score, ties -> larger percentile, then smaller C
    let mut best: Option<(f64, u32, f64)> = None;
    for (pi, &p) in grid.percentile_grid.iter().enumerate() {
        for (ci, &c) in grid.c_grid.iter().enumerate() {
            let score = cell_scores[pi * grid.c_grid.len() + ci];
            let better = match best {
                None => true,
                Some((bs, bp, bc)) => {
                    score > bs || (score == bs && (p > bp || (p == bp && c < bc)))
                }
            };
            if better {
                best = Some((score, p, c));
            }
        }
    }
    let (best_score, best_p, best_c) = best.expect("grid is non-empty");

    // refit on all data at the winning cell
    let (x_std, scaler) = standardize(x);
    let f_scores = anova_f(&x_std, y)?;
    let mask = select_percentile(&f_scores, best_p);
    let x_sel = x_std.select_columns(&mask);
    let fit = fit_logreg(&x_sel, y, best_c)?;

    Ok(GridSearchOutcome {
        model: LogisticModel {
            feature_names: feature_names.to_vec(),
            selection_mask: mask,
            weights: fit.weights,
            bias: fit.bias,
            chosen_c: best_c,
            chosen_percentile: best_p,
            scaler,
        },
        best_mean_score: best_score,
    })
}

/// Fraction of pairs where the toxic conversation gets the higher
/// probability; exact ties earn half credit.
pub fn paired_accuracy(
    model: &LogisticModel,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64, ModelError> {
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let mut credit = 0.0;
    for (toxic, healthy) in pairs {
        let pt = predict_proba(model, toxic)?;
        let ph = predict_proba(model, healthy)?;
        credit += if pt > ph {
            1.0
        } else if pt == ph {
            0.5
        } else {
            0.0
        };
    }
    Ok(credit / pairs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Toxicity,
    Health,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub name: String,
    pub mean_coefficient: f64,
    pub mean_abs_coefficient: f64,
    /// 1 = most important by mean absolute coefficient.
    pub rank: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub features: Vec<FeatureImportance>,
}

impl ImportanceReport {
    /// Features ordered by rank (most important first).
    pub fn ranked(&self) -> Vec<&FeatureImportance> {
        let mut out: Vec<&FeatureImportance> = self.features.iter().collect();
        out.sort_by_key(|f| f.rank);
        out
    }
}

/// Aggregate per-feature coefficients over the models of independent runs.
/// Unselected features contribute a coefficient of 0.
pub fn importance_report(models: &[LogisticModel]) -> Result<ImportanceReport, ModelError> {
    let first = models.first().ok_or(ModelError::RegistryMismatch)?;
    for m in models {
        if m.feature_names != first.feature_names {
            return Err(ModelError::RegistryMismatch);
        }
    }
    let d = first.feature_names.len();
    let n = models.len() as f64;
    let mut mean = vec![0.0f64; d];
    let mut mean_abs = vec![0.0f64; d];
    for m in models {
        for (j, c) in m.full_coefficients().into_iter().enumerate() {
            mean[j] += c / n;
            mean_abs[j] += c.abs() / n;
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| mean_abs[b].total_cmp(&mean_abs[a]).then(a.cmp(&b)));
    let mut rank = vec![0usize; d];
    for (r, &j) in order.iter().enumerate() {
        rank[j] = r + 1;
    }
    let features = (0..d)
        .map(|j| FeatureImportance {
            name: first.feature_names[j].clone(),
            mean_coefficient: mean[j],
            mean_abs_coefficient: mean_abs[j],
            rank: rank[j],
            direction: if mean[j] >= 0.0 { Direction::Toxicity } else { Direction::Health },
        })
        .collect();
    Ok(ImportanceReport { features })
}
