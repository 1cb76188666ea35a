//! Uni-directional GRU over per-message feature vectors with a linear +
//! sigmoid head, trained by backpropagation through time with momentum SGD.
//!
//! Recurrence from a zero initial state, with the update gate applied to
//! the candidate: `h_t = (1 - z_t) * h_{t-1} + z_t * hhat_t`. The head reads
//! the final state only. Gradients are exact (validated against central
//! finite differences) and training is fully seed-deterministic.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::SeedSplitter;

/// Format version embedded in serialized GRU parameter files.
pub const GRU_FORMAT_VERSION: u32 = 1;

const BCE_EPS: f64 = 1e-12;

#[derive(Error, Debug)]
pub enum GruError {
    #[error("non-finite activation encountered")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("{0}")]
    EmptySplit(String),
    #[error("gru model: {0}")]
    Model(String),
    #[error("unsupported gru model format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
}

/// One training sample: a fixed-length window of per-message feature
/// vectors and a binary label (1 = moderated).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub sequence: Vec<Vec<f64>>,
    pub label: u8,
}

/// All GRU parameters in one flat buffer.
///
/// Layout: update gate (W, U, b), reset gate (W, U, b), candidate (W, U, b),
/// head weights, head bias. Input-to-hidden matrices are hidden x input
/// row-major, hidden-to-hidden are hidden x hidden.
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Layout {
    w: usize, // offset of input matrix block (3 gates)
    u: usize,
    b: usize,
    head_w: usize,
    head_b: usize,
    len: usize,
}

impl Layout {
    fn new(input: usize, hidden: usize) -> Layout {
        let w_len = 3 * hidden * input;
        let u_len = 3 * hidden * hidden;
        let b_len = 3 * hidden;
        Layout {
            w: 0,
            u: w_len,
            b: w_len + u_len,
            head_w: w_len + u_len + b_len,
            head_b: w_len + u_len + b_len + hidden,
            len: w_len + u_len + b_len + hidden + 1,
        }
    }
}

/// Gate index: 0 = update (z), 1 = reset (r), 2 = candidate (hhat).
#[derive(Clone, Copy)]
enum Gate {
    Update = 0,
    Reset = 1,
    Candidate = 2,
}

impl GruParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> GruParams {
        let layout = Layout::new(input_dim, hidden_dim);
        GruParams { input_dim, hidden_dim, data: vec![0.0; layout.len] }
    }

    /// Seeded uniform initialization in +-1/sqrt(hidden_dim).
    pub fn init(input_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> GruParams {
        let mut params = GruParams::zeros(input_dim, hidden_dim);
        let scale = 1.0 / (hidden_dim as f64).sqrt();
        for v in &mut params.data {
            *v = rng.random_range(-scale..scale);
        }
        params
    }

    fn layout(&self) -> Layout {
        Layout::new(self.input_dim, self.hidden_dim)
    }

    fn w(&self, gate: Gate) -> &[f64] {
        let l = self.layout();
        let block = self.hidden_dim * self.input_dim;
        let start = l.w + gate as usize * block;
        &self.data[start..start + block]
    }

    fn u(&self, gate: Gate) -> &[f64] {
        let l = self.layout();
        let block = self.hidden_dim * self.hidden_dim;
        let start = l.u + gate as usize * block;
        &self.data[start..start + block]
    }

    fn b(&self, gate: Gate) -> &[f64] {
        let l = self.layout();
        let start = l.b + gate as usize * self.hidden_dim;
        &self.data[start..start + self.hidden_dim]
    }

    fn head_w(&self) -> &[f64] {
        let l = self.layout();
        &self.data[l.head_w..l.head_w + self.hidden_dim]
    }

    fn head_b(&self) -> f64 {
        self.data[self.layout().head_b]
    }

    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn n_params(&self) -> usize {
        self.data.len()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_json(&self) -> String {
        let file = GruModelFile {
            format_version: GRU_FORMAT_VERSION,
            input_dim: self.input_dim,
            hidden_dim: self.hidden_dim,
            update_w: self.w(Gate::Update).to_vec(),
            update_u: self.u(Gate::Update).to_vec(),
            update_b: self.b(Gate::Update).to_vec(),
            reset_w: self.w(Gate::Reset).to_vec(),
            reset_u: self.u(Gate::Reset).to_vec(),
            reset_b: self.b(Gate::Reset).to_vec(),
            candidate_w: self.w(Gate::Candidate).to_vec(),
            candidate_u: self.u(Gate::Candidate).to_vec(),
            candidate_b: self.b(Gate::Candidate).to_vec(),
            head_w: self.head_w().to_vec(),
            head_b: self.head_b(),
        };
        serde_json::to_string(&file).expect("gru serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<GruParams, GruError> {
        let file: GruModelFile =
            serde_json::from_str(json).map_err(|e| GruError::Model(e.to_string()))?;
        if file.format_version != GRU_FORMAT_VERSION {
            return Err(GruError::FormatVersion {
                found: file.format_version,
                expected: GRU_FORMAT_VERSION,
            });
        }
        let (d, h) = (file.input_dim, file.hidden_dim);
        let check = |name: &str, v: &[f64], expected: usize| -> Result<(), GruError> {
            if v.len() != expected {
                return Err(GruError::Model(format!(
                    "{name} has length {}, expected {expected}",
                    v.len()
                )));
            }
            Ok(())
        };
        for (name, v) in [
            ("update_w", &file.update_w),
            ("reset_w", &file.reset_w),
            ("candidate_w", &file.candidate_w),
        ] {
            check(name, v, h * d)?;
        }
        for (name, v) in [
            ("update_u", &file.update_u),
            ("reset_u", &file.reset_u),
            ("candidate_u", &file.candidate_u),
        ] {
            check(name, v, h * h)?;
        }
        for (name, v) in [
            ("update_b", &file.update_b),
            ("reset_b", &file.reset_b),
            ("candidate_b", &file.candidate_b),
        ] {
            check(name, v, h)?;
        }
        check("head_w", &file.head_w, h)?;
        let mut data = Vec::with_capacity(Layout::new(d, h).len);
        data.extend(&file.update_w);
        data.extend(&file.reset_w);
        data.extend(&file.candidate_w);
        data.extend(&file.update_u);
        data.extend(&file.reset_u);
        data.extend(&file.candidate_u);
        data.extend(&file.update_b);
        data.extend(&file.reset_b);
        data.extend(&file.candidate_b);
        data.extend(&file.head_w);
        data.push(file.head_b);
        Ok(GruParams { input_dim: d, hidden_dim: h, data })
    }

    pub fn load(path: &Path) -> Result<GruParams, GruError> {
        let json = std::fs::read_to_string(path)
            .map_err(|e| GruError::Model(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&json)
    }
}

#[derive(Serialize, Deserialize)]
struct GruModelFile {
    format_version: u32,
    input_dim: usize,
    hidden_dim: usize,
    update_w: Vec<f64>,
    update_u: Vec<f64>,
    update_b: Vec<f64>,
    reset_w: Vec<f64>,
    reset_u: Vec<f64>,
    reset_b: Vec<f64>,
    candidate_w: Vec<f64>,
    candidate_u: Vec<f64>,
    candidate_b: Vec<f64>,
    head_w: Vec<f64>,
    head_b: f64,
}

/// Gate activations cached by the forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct GruCache {
    /// h_0..h_T, each of hidden_dim.
    hidden: Vec<Vec<f64>>,
    update: Vec<Vec<f64>>,
    reset: Vec<Vec<f64>>,
    candidate: Vec<Vec<f64>>,
    inputs: Vec<Vec<f64>>,
    pub probability: f64,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// matrix (rows x cols, row-major) times vector
fn matvec(m: &[f64], v: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    for r in 0..rows {
        let row = &m[r * cols..(r + 1) * cols];
        out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
}

/// transpose(matrix) times vector, accumulated into out
fn matvec_t_acc(m: &[f64], v: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    for r in 0..rows {
        let row = &m[r * cols..(r + 1) * cols];
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * v[r];
        }
    }
}

/// Run the GRU over one sequence. Returns the head probability and the
/// cached activations needed by [`gru_backward`].
pub fn gru_forward(params: &GruParams, sequence: &[Vec<f64>]) -> Result<(f64, GruCache), GruError> {
    if sequence.is_empty() {
        return Err(GruError::EmptySequence);
    }
    let h = params.hidden_dim;
    let d = params.input_dim;
    for x in sequence {
        if x.len() != d {
            return Err(GruError::DimensionMismatch { expected: d, found: x.len() });
        }
    }
    let t_len = sequence.len();
    let mut hidden = Vec::with_capacity(t_len + 1);
    hidden.push(vec![0.0f64; h]);
    let mut update = Vec::with_capacity(t_len);
    let mut reset = Vec::with_capacity(t_len);
    let mut candidate = Vec::with_capacity(t_len);

    let mut pre = vec![0.0f64; h];
    let mut tmp = vec![0.0f64; h];
    for x in sequence {
        let prev = hidden.last().unwrap().clone();

        matvec(params.w(Gate::Update), x, h, d, &mut pre);
        matvec(params.u(Gate::Update), &prev, h, h, &mut tmp);
        let z: Vec<f64> = (0..h)
            .map(|i| sigmoid(pre[i] + tmp[i] + params.b(Gate::Update)[i]))
            .collect();

        matvec(params.w(Gate::Reset), x, h, d, &mut pre);
        matvec(params.u(Gate::Reset), &prev, h, h, &mut tmp);
        let r: Vec<f64> = (0..h)
            .map(|i| sigmoid(pre[i] + tmp[i] + params.b(Gate::Reset)[i]))
            .collect();

        let gated: Vec<f64> = r.iter().zip(&prev).map(|(ri, hi)| ri * hi).collect();
        matvec(params.w(Gate::Candidate), x, h, d, &mut pre);
        matvec(params.u(Gate::Candidate), &gated, h, h, &mut tmp);
        let hhat: Vec<f64> = (0..h)
            .map(|i| (pre[i] + tmp[i] + params.b(Gate::Candidate)[i]).tanh())
            .collect();

        let next: Vec<f64> = (0..h)
            .map(|i| (1.0 - z[i]) * prev[i] + z[i] * hhat[i])
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(GruError::NonFinite);
        }
        hidden.push(next);
        update.push(z);
        reset.push(r);
        candidate.push(hhat);
    }

    let logit: f64 = params
        .head_w()
        .iter()
        .zip(hidden.last().unwrap())
        .map(|(w, h)| w * h)
        .sum::<f64>()
        + params.head_b();
    if !logit.is_finite() {
        return Err(GruError::NonFinite);
    }
    let probability = sigmoid(logit);
    Ok((
        probability,
        GruCache {
            hidden,
            update,
            reset,
            candidate,
            inputs: sequence.to_vec(),
            probability,
        },
    ))
}

/// Binary cross-entropy with the probability clamped to [eps, 1-eps].
pub fn bce_loss(probability: f64, label: u8) -> f64 {
    let p = probability.clamp(BCE_EPS, 1.0 - BCE_EPS);
    let y = f64::from(label);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Exact gradients of [`bce_loss`] with respect to every parameter, by
/// backpropagation through time over the cached activations.
pub fn gru_backward(params: &GruParams, cache: &GruCache, label: u8) -> GruParams {
    let h = params.hidden_dim;
    let d = params.input_dim;
    let t_len = cache.inputs.len();
    let mut grads = GruParams::zeros(d, h);
    let layout = grads.layout();

    // head: d loss / d logit = p - y
    let delta = cache.probability - f64::from(label);
    let h_last = &cache.hidden[t_len];
    {
        let g = &mut grads.data;
        for i in 0..h {
            g[layout.head_w + i] += delta * h_last[i];
        }
        g[layout.head_b] += delta;
    }

    let mut dh: Vec<f64> = params.head_w().iter().map(|w| delta * w).collect();

    for t in (0..t_len).rev() {
        let prev = &cache.hidden[t];
        let z = &cache.update[t];
        let r = &cache.reset[t];
        let hhat = &cache.candidate[t];
        let x = &cache.inputs[t];

        // pre-activation gradients for the three gates
        let da_z: Vec<f64> =
            (0..h).map(|i| dh[i] * (hhat[i] - prev[i]) * z[i] * (1.0 - z[i])).collect();
        let da_h: Vec<f64> =
            (0..h).map(|i| dh[i] * z[i] * (1.0 - hhat[i] * hhat[i])).collect();
        let mut uh_t_dah = vec![0.0f64; h];
        matvec_t_acc(params.u(Gate::Candidate), &da_h, h, h, &mut uh_t_dah);
        let da_r: Vec<f64> =
            (0..h).map(|i| uh_t_dah[i] * prev[i] * r[i] * (1.0 - r[i])).collect();

        let gated: Vec<f64> = r.iter().zip(prev).map(|(ri, hi)| ri * hi).collect();

        // accumulate parameter gradients
        {
            let w_block = h * d;
            let u_block = h * h;
            let g = &mut grads.data;
            for (gate_idx, da) in [(0usize, &da_z), (1, &da_r), (2, &da_h)] {
                let recur = if gate_idx == 2 { &gated } else { prev };
                for i in 0..h {
                    let wi = layout.w + gate_idx * w_block + i * d;
                    for j in 0..d {
                        g[wi + j] += da[i] * x[j];
                    }
                    let ui = layout.u + gate_idx * u_block + i * h;
                    for j in 0..h {
                        g[ui + j] += da[i] * recur[j];
                    }
                    g[layout.b + gate_idx * h + i] += da[i];
                }
            }
        }

        // gradient w.r.t. h_{t-1}
        let mut dh_prev: Vec<f64> = (0..h).map(|i| dh[i] * (1.0 - z[i])).collect();
        matvec_t_acc(params.u(Gate::Update), &da_z, h, h, &mut dh_prev);
        matvec_t_acc(params.u(Gate::Reset), &da_r, h, h, &mut dh_prev);
        for i in 0..h {
            dh_prev[i] += uh_t_dah[i] * r[i];
        }
        dh = dh_prev;
    }
    grads
}

/// Optimizer and schedule settings for [`train`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden_dim: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    /// Stop after this many epochs without a new best validation accuracy.
    pub patience: usize,
    /// Multiply the learning rate by `lr_decay` every `lr_decay_every`
    /// epochs (fixed step schedule).
    pub lr_decay: f64,
    pub lr_decay_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_dim: 40,
            batch_size: 32,
            learning_rate: 0.15,
            momentum: 0.9,
            max_epochs: 120,
            patience: 20,
            lr_decay: 0.5,
            lr_decay_every: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub test_accuracy: f64,
    pub test_f1: f64,
    pub best_validation_accuracy: f64,
    pub epochs_run: usize,
    pub train_size: usize,
    pub validation_size: usize,
    pub test_size: usize,
}

/// Mean BCE loss of the current parameters over a sample set.
pub fn mean_loss(params: &GruParams, samples: &[WindowSample]) -> Result<f64, GruError> {
    let mut total = 0.0;
    for s in samples {
        let (p, _) = gru_forward(params, &s.sequence)?;
        total += bce_loss(p, s.label);
    }
    Ok(total / samples.len().max(1) as f64)
}

fn accuracy_and_f1(params: &GruParams, samples: &[WindowSample]) -> Result<(f64, f64), GruError> {
    let mut correct = 0usize;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for s in samples {
        let (p, _) = gru_forward(params, &s.sequence)?;
        let pred = u8::from(p >= 0.5);
        if pred == s.label {
            correct += 1;
        }
        match (pred, s.label) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fn_ += 1,
            _ => {}
        }
    }
    let accuracy = correct as f64 / samples.len().max(1) as f64;
    let f1 = if 2 * tp + fp + fn_ == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    Ok((accuracy, f1))
}

/// Run `epochs` of mini-batch momentum SGD in place, returning the mean
/// training loss after each epoch. `epoch_offset` keeps the learning-rate
/// schedule aligned when called repeatedly.
pub fn sgd_epochs(
    params: &mut GruParams,
    velocity: &mut Vec<f64>,
    samples: &[WindowSample],
    cfg: &TrainConfig,
    epochs: usize,
    epoch_offset: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, GruError> {
    if velocity.len() != params.n_params() {
        velocity.resize(params.n_params(), 0.0);
    }
    let mut losses = Vec::with_capacity(epochs);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    for e in 0..epochs {
        let epoch = epoch_offset + e;
        let lr = cfg.learning_rate * cfg.lr_decay.powi((epoch / cfg.lr_decay_every.max(1)) as i32);
        order.shuffle(rng);
        for batch in order.chunks(cfg.batch_size.max(1)) {
            let mut grad_sum = GruParams::zeros(params.input_dim, params.hidden_dim);
            for &i in batch {
                let (_, cache) = gru_forward(params, &samples[i].sequence)?;
                let g = gru_backward(params, &cache, samples[i].label);
                for (acc, gi) in grad_sum.raw_mut().iter_mut().zip(g.raw()) {
                    *acc += gi;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            for ((p, v), g) in
                params.raw_mut().iter_mut().zip(velocity.iter_mut()).zip(grad_sum.raw())
            {
                *v = cfg.momentum * *v - lr * g * scale;
                *p += *v;
            }
        }
        if !params.all_finite() {
            return Err(GruError::NonFinite);
        }
        losses.push(mean_loss(params, samples)?);
    }
    Ok(losses)
}

/// Train a GRU on labeled windows with a random train/validation/test
/// split (fractions must sum to 1 and each part must be non-empty). The
/// parameters with the best validation accuracy are kept and evaluated on
/// the test split.
pub fn train(
    dataset: &[WindowSample],
    split: (f64, f64, f64),
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(GruParams, TrainMetrics), GruError> {
    let input_dim = dataset
        .first()
        .map(|s| s.sequence.first().map(|v| v.len()).unwrap_or(0))
        .ok_or_else(|| GruError::EmptySplit("dataset is empty".into()))?;
    if (split.0 + split.1 + split.2 - 1.0).abs() > 1e-9 {
        return Err(GruError::EmptySplit("split fractions must sum to 1".into()));
    }
    let splitter = SeedSplitter::new(seed);
    let mut rng = splitter.rng("split", 0);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(&mut rng);
    let n = dataset.len();
    let n_train = (split.0 * n as f64).round() as usize;
    let n_val = (split.1 * n as f64).round() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(GruError::EmptySplit(format!(
            "split {:?} of {n} samples leaves an empty part",
            split
        )));
    }
    let gather = |idx: &[usize]| -> Vec<WindowSample> {
        idx.iter().map(|&i| dataset[i].clone()).collect()
    };
    let train_set = gather(&order[..n_train]);
    let val_set = gather(&order[n_train..n_train + n_val]);
    let test_set = gather(&order[n_train + n_val..]);

    let mut init_rng = splitter.rng("init", 0);
    let mut params = GruParams::init(input_dim, cfg.hidden_dim, &mut init_rng);
    let mut velocity = vec![0.0f64; params.n_params()];
    let mut sgd_rng = splitter.rng("sgd", 0);

    let mut best_params = params.clone();
    let mut best_val = -1.0f64;
    let mut best_epoch = 0usize;
    let mut epochs_run = 0usize;
    for epoch in 0..cfg.max_epochs {
        sgd_epochs(&mut params, &mut velocity, &train_set, cfg, 1, epoch, &mut sgd_rng)?;
        epochs_run = epoch + 1;
        let (val_acc, _) = accuracy_and_f1(&params, &val_set)?;
        if val_acc > best_val {
            best_val = val_acc;
            best_params = params.clone();
            best_epoch = epoch;
        } else if epoch - best_epoch >= cfg.patience {
            break;
        }
    }

    let (test_accuracy, test_f1) = accuracy_and_f1(&best_params, &test_set)?;
    Ok((
        best_params,
        TrainMetrics {
            test_accuracy,
            test_f1,
            best_validation_accuracy: best_val,
            epochs_run,
            train_size: train_set.len(),
            validation_size: val_set.len(),
            test_size: test_set.len(),
        },
    ))
}

/// Mean BCE loss as a function of the flat parameter vector; used by the
/// finite-difference gradient checks.
pub fn loss_at(params: &GruParams, sample: &WindowSample) -> Result<f64, GruError> {
    let (p, _) = gru_forward(params, &sample.sequence)?;
    Ok(bce_loss(p, sample.label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sample(rng: &mut ChaCha8Rng, t: usize, d: usize) -> WindowSample {
        WindowSample {
            sequence: (0..t)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect(),
            label: u8::from(rng.random_bool(0.5)),
        }
    }

    #[test]
    fn zero_params_give_half_probability() {
        let params = GruParams::zeros(3, 4);
        let (p, _) = gru_forward(&params, &[vec![0.5, -1.0, 2.0]]).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn single_step_matches_hand_arithmetic() {
        // 1-dimensional input, 2 hidden units, one step from h0 = 0.
        let mut params = GruParams::zeros(1, 2);
        {
            let l = params.layout();
            let data = params.raw_mut();
            // update W = [0.3, -0.2], reset W = [0.1, 0.4], candidate W = [0.5, -0.5]
            data[l.w] = 0.3;
            data[l.w + 1] = -0.2;
            data[l.w + 2] = 0.1;
            data[l.w + 3] = 0.4;
            data[l.w + 4] = 0.5;
            data[l.w + 5] = -0.5;
            // biases: z += 0.05, candidate += -0.1 (reset bias stays 0)
            data[l.b] = 0.05;
            data[l.b + 1] = 0.05;
            data[l.b + 4] = -0.1;
            data[l.b + 5] = -0.1;
            // head: v = [1.0, -2.0], c = 0.2
            data[l.head_w] = 1.0;
            data[l.head_w + 1] = -2.0;
            data[l.head_b] = 0.2;
        }
        let x = 0.8f64;
        // hand recurrence (h0 = 0 so U terms vanish and r is irrelevant)
        let z0 = 1.0 / (1.0 + (-(0.3 * x + 0.05f64)).exp());
        let z1 = 1.0 / (1.0 + (-(-0.2 * x + 0.05f64)).exp());
        let hh0 = (0.5 * x - 0.1f64).tanh();
        let hh1 = (-0.5 * x - 0.1f64).tanh();
        let h0 = z0 * hh0;
        let h1 = z1 * hh1;
        let expected = 1.0 / (1.0 + (-(1.0 * h0 - 2.0 * h1 + 0.2f64)).exp());

        let (p, cache) = gru_forward(&params, &[vec![x]]).unwrap();
        assert_abs_diff_eq!(p, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(cache.hidden[1][0], h0, epsilon = 1e-15);
        assert_abs_diff_eq!(cache.hidden[1][1], h1, epsilon = 1e-15);
    }

    #[test]
    fn outputs_stay_in_open_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let mut prng = ChaCha8Rng::seed_from_u64(rng.random());
            let params = GruParams::init(3, 2, &mut prng);
            let s = random_sample(&mut rng, 3, 3);
            let (p, _) = gru_forward(&params, &s.sequence).unwrap();
            assert!(p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn hidden_state_stays_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let mut prng = ChaCha8Rng::seed_from_u64(rng.random());
            // large-ish weights still cannot push |h| past 1
            let mut params = GruParams::init(4, 3, &mut prng);
            for v in params.raw_mut() {
                *v *= 10.0;
            }
            let s = random_sample(&mut rng, 8, 4);
            let (_, cache) = gru_forward(&params, &s.sequence).unwrap();
            for h in &cache.hidden[1..] {
                for v in h {
                    assert!(v.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn empty_sequence_is_rejected() {
        let params = GruParams::zeros(2, 2);
        assert!(matches!(gru_forward(&params, &[]), Err(GruError::EmptySequence)));
    }

    #[test]
    fn bce_values() {
        assert_abs_diff_eq!(bce_loss(0.5, 1), std::f64::consts::LN_2, epsilon = 1e-12);
        assert!(bce_loss(1.0 - 1e-12, 1) < 1e-9);
        // independent arithmetic: -ln(1 - 0.73)
        assert_abs_diff_eq!(bce_loss(0.73, 0), -(0.27f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn head_bias_gradient_is_p_minus_y() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = GruParams::init(3, 4, &mut rng);
        let s = random_sample(&mut rng, 5, 3);
        let (p, cache) = gru_forward(&params, &s.sequence).unwrap();
        let grads = gru_backward(&params, &cache, s.label);
        let l = params.layout();
        assert_abs_diff_eq!(grads.raw()[l.head_b], p - f64::from(s.label), epsilon = 1e-15);
    }

    #[test]
    fn zero_params_symmetric_batch_has_zero_gradient() {
        let params = GruParams::zeros(2, 3);
        let x = vec![vec![0.4, -0.7], vec![0.1, 0.2]];
        let (_, cache) = gru_forward(&params, &x).unwrap();
        let g1 = gru_backward(&params, &cache, 1);
        let g0 = gru_backward(&params, &cache, 0);
        for (a, b) in g1.raw().iter().zip(g0.raw()) {
            assert_abs_diff_eq!(a + b, 0.0, epsilon = 1e-15);
        }
    }

    fn gradcheck_once(seed: u64, t: usize, d: usize, h: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GruParams::init(d, h, &mut rng);
        let sample = random_sample(&mut rng, t, d);
        let (_, cache) = gru_forward(&params, &sample.sequence).unwrap();
        let analytic = gru_backward(&params, &cache, sample.label);

        let eps = 1e-5;
        let mut worst = 0.0f64;
        for i in 0..params.n_params() {
            let mut plus = params.clone();
            plus.raw_mut()[i] += eps;
            let mut minus = params.clone();
            minus.raw_mut()[i] -= eps;
            let fd = (loss_at(&plus, &sample).unwrap() - loss_at(&minus, &sample).unwrap())
                / (2.0 * eps);
            let g = analytic.raw()[i];
            let rel = (g - fd).abs() / (g.abs() + fd.abs()).max(1e-8);
            worst = worst.max(rel);
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..5 {
            let worst = gradcheck_once(seed, 4, 3, 3);
            assert!(worst < 1e-4, "seed {seed}: worst relative error {worst}");
        }
    }

    #[test]
    fn memorizes_a_small_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let samples: Vec<WindowSample> = (0..32).map(|_| random_sample(&mut rng, 4, 6)).collect();
        let cfg = TrainConfig {
            hidden_dim: 16,
            max_epochs: 500,
            learning_rate: 0.25,
            lr_decay: 1.0,
            ..TrainConfig::default()
        };
        let mut init_rng = ChaCha8Rng::seed_from_u64(1);
        let mut params = GruParams::init(6, cfg.hidden_dim, &mut init_rng);
        let mut velocity = vec![0.0; params.n_params()];
        let mut sgd_rng = ChaCha8Rng::seed_from_u64(2);
        let losses =
            sgd_epochs(&mut params, &mut velocity, &samples, &cfg, 500, 0, &mut sgd_rng).unwrap();
        let final_loss = *losses.last().unwrap();
        assert!(final_loss < 0.05, "memorization loss {final_loss}");
        // after warmup the loss trend is non-increasing over 10-epoch windows
        for e in 60..losses.len() {
            assert!(
                losses[e] <= losses[e - 10] + 1e-3,
                "loss rose from {} to {} at epoch {e}",
                losses[e - 10],
                losses[e]
            );
        }
    }

    #[test]
    fn training_is_seed_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let samples: Vec<WindowSample> = (0..60)
            .map(|_| {
                let mut s = random_sample(&mut rng, 3, 4);
                s.label = u8::from(s.sequence[2][0] > 0.0);
                s
            })
            .collect();
        let cfg = TrainConfig { hidden_dim: 8, max_epochs: 15, ..TrainConfig::default() };
        let (pa, ma) = train(&samples, (0.7, 0.2, 0.1), &cfg, 99).unwrap();
        let (pb, mb) = train(&samples, (0.7, 0.2, 0.1), &cfg, 99).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(ma, mb);
    }

    #[test]
    fn empty_split_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples: Vec<WindowSample> = (0..5).map(|_| random_sample(&mut rng, 2, 2)).collect();
        let cfg = TrainConfig { hidden_dim: 4, ..TrainConfig::default() };
        assert!(train(&samples, (1.0, 0.0, 0.0), &cfg, 0).is_err());
        assert!(train(&[], (0.7, 0.2, 0.1), &cfg, 0).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let params = GruParams::init(5, 3, &mut rng);
        let restored = GruParams::from_json(&params.to_json()).unwrap();
        assert_eq!(restored, params);

        let json = params.to_json().replacen("\"format_version\":1", "\"format_version\":9", 1);
        assert!(matches!(
            GruParams::from_json(&json),
            Err(GruError::FormatVersion { found: 9, .. })
        ));
    }
}
