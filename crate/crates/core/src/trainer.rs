//! Desk-scale candidate generation: one single-hidden-layer MLP per
//! `(run, repetition, architecture)`, trained with mini-batch gradient descent on softmax
//! cross-entropy plus an L2 weight-decay penalty, early-stopped on the repetition's validation
//! fold.
//!
//! Only Train-role rows ever reach the gradient, and feature standardisation statistics come
//! from Train-role rows only. Validation rows decide when to stop and which epoch's weights are
//! kept; Holdout and Test rows are only evaluated.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::record::{
    Activation, Architecture, CandidatePool, CandidateRecord, Provenance, RecordKey, Role,
    SetMetrics,
};
use crate::seed::derive_seed;
use crate::splitplan::{SampleMask, SplitPlan};

// ---------------------------------------------------------------------------------------------
// dataset

/// Dense classification dataset, features row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_features: usize,
    pub n_classes: usize,
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} feature rows for {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument("dataset is empty".into()));
        }
        let n_features = rows[0].len();
        if n_features == 0 {
            return Err(Error::InvalidArgument("dataset has no feature columns".into()));
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != n_features {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} features, expected {n_features}",
                    r.len()
                )));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i} holds a non-finite feature")));
            }
            features.extend(r);
        }
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        Ok(Dataset {
            n_features,
            n_classes,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.n_features;
        &mut self.features[i * n..(i + 1) * n]
    }

    /// Reads feature columns followed by a final integer label column. A first row that does not
    /// parse as numbers is treated as a header. Labels are remapped to `0..n_classes` in
    /// ascending order of their original values.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut rows = Vec::new();
        let mut raw_labels = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::malformed(format!(
                    "line {}: need at least one feature and a label",
                    line + 1
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().take(rec.len() - 1).map(str::parse::<f64>).collect();
            let label = rec[rec.len() - 1].parse::<i64>();
            match (parsed, label) {
                (Ok(f), Ok(l)) => {
                    rows.push(f);
                    raw_labels.push(l);
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::malformed(format!(
                        "line {}: expected numeric features and an integer label",
                        line + 1
                    )))
                }
            }
        }
        let mut distinct = raw_labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw_labels
            .iter()
            .map(|l| distinct.binary_search(l).unwrap_or(0))
            .collect();
        Dataset::new(rows, labels)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.n_features).map(|j| format!("x{j}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            rec.push(self.labels[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------------------------
// config

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_epochs: u32,
    pub patience: u32,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 100,
            patience: 10,
            batch_size: 32,
            learning_rate: 0.05,
            weight_decay: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.max_epochs == 0 {
            return bad("max_epochs must be >= 1".into());
        }
        if self.patience > self.max_epochs {
            return bad(format!(
                "patience {} exceeds max_epochs {}",
                self.patience, self.max_epochs
            ));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return bad(format!("weight_decay must be non-negative, got {}", self.weight_decay));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------------------------
// early stopping

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Improved,
    Continue,
    Stop,
}

/// Patience counter over validation losses. An epoch improves when its loss is strictly below
/// the best seen so far; training stops once `patience` consecutive epochs fail to improve.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: u32,
    best: f64,
    best_epoch: Option<usize>,
    since_best: u32,
}

impl EarlyStopping {
    pub fn new(patience: u32) -> Self {
        EarlyStopping {
            patience,
            best: f64::INFINITY,
            best_epoch: None,
            since_best: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, loss: f64) -> StopDecision {
        if loss < self.best {
            self.best = loss;
            self.best_epoch = Some(epoch);
            self.since_best = 0;
            // a zero patience still stops right after the epoch is recorded
            if self.patience == 0 {
                return StopDecision::Stop;
            }
            return StopDecision::Improved;
        }
        self.since_best += 1;
        if self.since_best >= self.patience {
            StopDecision::Stop
        } else {
            StopDecision::Continue
        }
    }

    pub fn best_epoch(&self) -> Option<usize> {
        self.best_epoch
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochTrace {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    pub validation_accuracy: Vec<f64>,
    /// First epoch with the minimal validation loss; `None` when no epoch finished.
    pub best_epoch: Option<usize>,
}

impl EpochTrace {
    pub fn epochs(&self) -> usize {
        self.validation_loss.len()
    }

    /// True when no epoch within `patience` after the best one improves on it and the stop
    /// point is explained by either patience, the epoch cap or an abort.
    pub fn satisfies_patience(&self, patience: u32, max_epochs: u32, aborted: bool) -> bool {
        let Some(best) = self.best_epoch else {
            return self.epochs() == 0;
        };
        let losses = &self.validation_loss;
        let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
        if losses[best] != min || losses[..best].contains(&min) {
            return false;
        }
        let window_end = (best + 1 + patience as usize).min(losses.len());
        if losses[best + 1..window_end].iter().any(|&l| l < losses[best]) {
            return false;
        }
        let expected_stop = best + 1 + patience as usize;
        aborted || losses.len() == expected_stop || losses.len() == max_epochs as usize
    }
}

// ---------------------------------------------------------------------------------------------
// network

#[inline]
fn activate(a: Activation, x: f64) -> f64 {
    const SELU_SCALE: f64 = 1.050_700_987_355_480_5;
    const SELU_ALPHA: f64 = 1.673_263_242_354_377_3;
    match a {
        Activation::Identity => x,
        Activation::Gelu => 0.5 * x * (1.0 + erf(x / std::f64::consts::SQRT_2)),
        Activation::LeakyRelu => {
            if x > 0.0 {
                x
            } else {
                0.01 * x
            }
        }
        Activation::Relu => x.max(0.0),
        Activation::Selu => {
            if x > 0.0 {
                SELU_SCALE * x
            } else {
                SELU_SCALE * SELU_ALPHA * x.exp_m1()
            }
        }
        Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        Activation::Tanh => x.tanh(),
    }
}

/// Derivative with respect to the pre-activation `x`, given `y = activate(x)`.
#[inline]
fn activate_grad(a: Activation, x: f64, y: f64) -> f64 {
    const SELU_SCALE: f64 = 1.050_700_987_355_480_5;
    const SELU_ALPHA: f64 = 1.673_263_242_354_377_3;
    match a {
        Activation::Identity => 1.0,
        Activation::Gelu => {
            let cdf = 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
            let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            cdf + x * pdf
        }
        Activation::LeakyRelu => {
            if x > 0.0 {
                1.0
            } else {
                0.01
            }
        }
        Activation::Relu => {
            if x > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Activation::Selu => {
            if x > 0.0 {
                SELU_SCALE
            } else {
                y + SELU_SCALE * SELU_ALPHA
            }
        }
        Activation::Sigmoid => y * (1.0 - y),
        Activation::Tanh => 1.0 - y * y,
    }
}

/// Single-hidden-layer perceptron with a softmax output. Inputs are standardised with the
/// stored per-feature mean and scale before the first layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
    pub activation: Activation,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// `n_hidden x n_in`
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `n_out x n_hidden`
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

struct Workspace {
    x: Vec<f64>,
    z: Vec<f64>,
    h: Vec<f64>,
    p: Vec<f64>,
    dh: Vec<f64>,
}

impl Workspace {
    fn new(m: &Mlp) -> Self {
        Workspace {
            x: vec![0.0; m.n_in],
            z: vec![0.0; m.n_hidden],
            h: vec![0.0; m.n_hidden],
            p: vec![0.0; m.n_out],
            dh: vec![0.0; m.n_hidden],
        }
    }
}

struct Grads {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl Grads {
    fn zeros(m: &Mlp) -> Self {
        Grads {
            w1: vec![0.0; m.w1.len()],
            b1: vec![0.0; m.b1.len()],
            w2: vec![0.0; m.w2.len()],
            b2: vec![0.0; m.b2.len()],
        }
    }

    fn clear(&mut self) {
        self.w1.fill(0.0);
        self.b1.fill(0.0);
        self.w2.fill(0.0);
        self.b2.fill(0.0);
    }
}

impl Mlp {
    /// Weights uniform in `±1/sqrt(fan_in)` per layer.
    pub fn init(
        n_in: usize,
        arch: Architecture,
        n_out: usize,
        mean: Vec<f64>,
        scale: Vec<f64>,
        rng: &mut impl Rng,
    ) -> Self {
        let n_hidden = arch.neurons as usize;
        let l1 = 1.0 / (n_in as f64).sqrt();
        let l2 = 1.0 / (n_hidden as f64).sqrt();
        let mut uni = |n: usize, lim: f64| -> Vec<f64> {
            (0..n).map(|_| rng.random_range(-lim..=lim)).collect()
        };
        let w1 = uni(n_hidden * n_in, l1);
        let b1 = uni(n_hidden, l1);
        let w2 = uni(n_out * n_hidden, l2);
        let b2 = uni(n_out, l2);
        Mlp {
            n_in,
            n_hidden,
            n_out,
            activation: arch.activation,
            mean,
            scale,
            w1,
            b1,
            w2,
            b2,
        }
    }

    /// Forward pass into `ws`; returns the cross-entropy of `label`.
    fn forward(&self, row: &[f64], label: usize, ws: &mut Workspace) -> f64 {
        for (((x, v), m), s) in ws.x.iter_mut().zip(row).zip(&self.mean).zip(&self.scale) {
            *x = (v - m) / s;
        }
        for k in 0..self.n_hidden {
            let w = &self.w1[k * self.n_in..(k + 1) * self.n_in];
            let z = self.b1[k] + w.iter().zip(&ws.x).map(|(a, b)| a * b).sum::<f64>();
            ws.z[k] = z;
            ws.h[k] = activate(self.activation, z);
        }
        let mut max = f64::NEG_INFINITY;
        for c in 0..self.n_out {
            let w = &self.w2[c * self.n_hidden..(c + 1) * self.n_hidden];
            let o = self.b2[c] + w.iter().zip(&ws.h).map(|(a, b)| a * b).sum::<f64>();
            ws.p[c] = o;
            max = max.max(o);
        }
        let mut sum = 0.0;
        for c in 0..self.n_out {
            ws.p[c] = (ws.p[c] - max).exp();
            sum += ws.p[c];
        }
        for c in 0..self.n_out {
            ws.p[c] /= sum;
        }
        // -log softmax, computed from logits for stability
        let logit = ws.p[label].ln();
        -logit
    }

    fn argmax(p: &[f64]) -> usize {
        let mut best = 0;
        for (i, &v) in p.iter().enumerate() {
            if v > p[best] {
                best = i;
            }
        }
        best
    }

    /// Accumulates the gradient of the cross-entropy of the last forward pass.
    fn backward(&self, label: usize, ws: &mut Workspace, g: &mut Grads) {
        ws.dh.fill(0.0);
        for c in 0..self.n_out {
            let d = ws.p[c] - if c == label { 1.0 } else { 0.0 };
            g.b2[c] += d;
            let row = c * self.n_hidden;
            for k in 0..self.n_hidden {
                g.w2[row + k] += d * ws.h[k];
                ws.dh[k] += d * self.w2[row + k];
            }
        }
        for k in 0..self.n_hidden {
            let dz = ws.dh[k] * activate_grad(self.activation, ws.z[k], ws.h[k]);
            g.b1[k] += dz;
            let row = k * self.n_in;
            for j in 0..self.n_in {
                g.w1[row + j] += dz * ws.x[j];
            }
        }
    }

    fn step(&mut self, g: &Grads, batch: usize, lr: f64, wd: f64) {
        let inv = 1.0 / batch as f64;
        for (w, gw) in self.w1.iter_mut().zip(&g.w1) {
            *w -= lr * (gw * inv + wd * *w);
        }
        for (b, gb) in self.b1.iter_mut().zip(&g.b1) {
            *b -= lr * gb * inv;
        }
        for (w, gw) in self.w2.iter_mut().zip(&g.w2) {
            *w -= lr * (gw * inv + wd * *w);
        }
        for (b, gb) in self.b2.iter_mut().zip(&g.b2) {
            *b -= lr * gb * inv;
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut ws = Workspace::new(self);
        self.forward(row, 0, &mut ws);
        Self::argmax(&ws.p)
    }

    /// `(mean cross-entropy, accuracy)` over `idx`; `(NaN, 0)` for an empty set.
    fn evaluate(&self, data: &Dataset, idx: &[usize], ws: &mut Workspace) -> (f64, f64) {
        if idx.is_empty() {
            return (f64::NAN, 0.0);
        }
        let mut loss = 0.0;
        let mut correct = 0usize;
        for &i in idx {
            let y = data.labels[i];
            loss += self.forward(data.row(i), y, ws);
            if Self::argmax(&ws.p) == y {
                correct += 1;
            }
        }
        (loss / idx.len() as f64, correct as f64 / idx.len() as f64)
    }

    /// Hash of the exact parameter bits.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for v in self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2) {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }

    pub fn weights_eq(&self, other: &Mlp) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        bits(&self.w1) == bits(&other.w1)
            && bits(&self.b1) == bits(&other.b1)
            && bits(&self.w2) == bits(&other.w2)
            && bits(&self.b2) == bits(&other.b2)
    }
}

// ---------------------------------------------------------------------------------------------
// training

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainFlags {
    /// The Train partition held a single class.
    pub single_class_train: bool,
    /// Training hit a non-finite loss and stopped early.
    pub non_finite_abort: bool,
}

/// Identity fields copied into the produced record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateIdentity {
    pub dataset_id: String,
    pub run_id: u32,
    pub repetition: u32,
}

#[derive(Debug, Clone)]
pub struct TrainedCandidate {
    pub record: CandidateRecord,
    pub trace: EpochTrace,
    pub flags: TrainFlags,
    /// Parameters restored from the best epoch.
    pub model: Mlp,
    /// Parameter fingerprint after every completed epoch, before any restore.
    pub trajectory: Vec<u64>,
}

fn train_scaler(data: &Dataset, train: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let d = data.n_features;
    let n = train.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in train {
        for (m, v) in mean.iter_mut().zip(data.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for &i in train {
        for ((s, v), m) in var.iter_mut().zip(data.row(i)).zip(&mean) {
            *s += (v - m).powi(2);
        }
    }
    let scale = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

/// Trains one candidate under `mask`. Deterministic for fixed inputs.
pub fn train_candidate(
    data: &Dataset,
    mask: &SampleMask,
    identity: &CandidateIdentity,
    arch: Architecture,
    cfg: &TrainConfig,
) -> Result<TrainedCandidate> {
    cfg.validate()?;
    if mask.len() != data.len() {
        return Err(Error::InvalidArgument(format!(
            "mask covers {} samples, dataset has {}",
            mask.len(),
            data.len()
        )));
    }
    if arch.neurons == 0 {
        return Err(Error::InvalidArgument("architecture needs at least one neuron".into()));
    }
    let idx: Vec<Vec<usize>> = Role::ALL.iter().map(|&r| mask.indices(r)).collect();
    let train = &idx[Role::Train.index()];
    let validation = &idx[Role::Validation.index()];
    if train.is_empty() || validation.is_empty() {
        return Err(Error::Training(
            "mask needs Train and Validation samples".into(),
        ));
    }
    let n_out = data.n_classes.max(2);

    let mut flags = TrainFlags::default();
    let first = data.labels[train[0]];
    flags.single_class_train = train.iter().all(|&i| data.labels[i] == first);

    let (mean, scale) = train_scaler(data, train);
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "init", &[]));
    let mut model = Mlp::init(data.n_features, arch, n_out, mean, scale, &mut init_rng);
    let mut best_model = model.clone();
    let mut ws = Workspace::new(&model);
    let mut grads = Grads::zeros(&model);

    let mut trace = EpochTrace::default();
    let mut stopper = EarlyStopping::new(cfg.patience);
    let mut order = train.clone();
    let mut trajectory = Vec::new();

    for epoch in 0..cfg.max_epochs as usize {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "epoch", &[epoch as u64]));
        order.copy_from_slice(train);
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            for &i in batch {
                let y = data.labels[i];
                loss_sum += model.forward(data.row(i), y, &mut ws);
                model.backward(y, &mut ws, &mut grads);
            }
            model.step(&grads, batch.len(), cfg.learning_rate, cfg.weight_decay);
        }
        let train_loss = loss_sum / train.len() as f64;
        let (val_loss, val_acc) = model.evaluate(data, validation, &mut ws);
        let params_finite = model.w1.iter().chain(&model.w2).all(|w| w.is_finite());
        if !(train_loss.is_finite() && val_loss.is_finite() && params_finite) {
            flags.non_finite_abort = true;
            break;
        }
        trajectory.push(model.fingerprint());
        trace.train_loss.push(train_loss);
        trace.validation_loss.push(val_loss);
        trace.validation_accuracy.push(val_acc);
        let decision = stopper.observe(epoch, val_loss);
        if stopper.best_epoch() == Some(epoch) {
            best_model.clone_from(&model);
        }
        if decision == StopDecision::Stop {
            break;
        }
    }
    trace.best_epoch = stopper.best_epoch();
    let model = best_model;

    let mut metrics = SetMetrics::default();
    for role in Role::ALL {
        let (_, acc) = model.evaluate(data, &idx[role.index()], &mut ws);
        metrics.set(role, acc);
    }

    let record = CandidateRecord {
        dataset_id: identity.dataset_id.clone(),
        run_id: identity.run_id,
        repetition: identity.repetition,
        architecture: arch,
        epochs_trained: trace.epochs() as u32,
        max_epochs: cfg.max_epochs,
        metrics,
        seed: cfg.seed,
    };
    Ok(TrainedCandidate {
        record,
        trace,
        flags,
        model,
        trajectory,
    })
}

// ---------------------------------------------------------------------------------------------
// pool generation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureGrid {
    pub neurons: Vec<u32>,
    pub activations: Vec<Activation>,
}

impl ArchitectureGrid {
    pub fn new(neurons: impl IntoIterator<Item = u32>, activations: &[Activation]) -> Self {
        ArchitectureGrid {
            neurons: neurons.into_iter().collect(),
            activations: activations.to_vec(),
        }
    }

    /// 1..=20 neurons with ReLU, Tanh and Sigmoid.
    pub fn desk() -> Self {
        Self::new(1..=20, &[Activation::Relu, Activation::Tanh, Activation::Sigmoid])
    }

    /// 1..=100 neurons with all seven activations.
    pub fn full() -> Self {
        Self::new(1..=100, &Activation::ALL)
    }

    pub fn architectures(&self) -> Vec<Architecture> {
        let mut out = Vec::with_capacity(self.neurons.len() * self.activations.len());
        for &a in &self.activations {
            for &n in &self.neurons {
                out.push(Architecture::new(n, a));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Seed of one candidate, derived from the master training seed and its identity.
pub fn candidate_seed(master: u64, dataset_id: &str, run_id: u32, repetition: u32, arch: Architecture) -> u64 {
    let tag = format!("candidate/{dataset_id}");
    derive_seed(
        master,
        &tag,
        &[
            u64::from(run_id),
            u64::from(repetition),
            u64::from(arch.neurons),
            arch.activation as u64,
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub dataset_id: String,
    pub run_id: u32,
    pub repetition: u32,
    pub neurons: u32,
    pub activation: Activation,
    pub flags: TrainFlags,
    #[serde(flatten)]
    pub trace: EpochTrace,
}

#[derive(Debug, Clone)]
pub struct PoolOutcome {
    pub pool: CandidatePool,
    pub traces: Vec<TraceLine>,
    /// Candidates that could not be trained, with the reason.
    pub failures: Vec<(RecordKey, String)>,
}

/// Trains every `(run, repetition, architecture)` of `plan`. Work fans out over the current
/// rayon pool; results are merged in record-key order, so thread count never changes output.
pub fn generate_pool(
    data: &Dataset,
    dataset_id: &str,
    plan: &SplitPlan,
    grid: &ArchitectureGrid,
    cfg: &TrainConfig,
) -> Result<PoolOutcome> {
    cfg.validate()?;
    let archs = grid.architectures();
    if archs.is_empty() {
        return Err(Error::InvalidArgument("architecture grid is empty".into()));
    }
    if plan.fold_of_sample.len() != data.len() {
        return Err(Error::InvalidArgument(format!(
            "plan covers {} samples, dataset has {}",
            plan.fold_of_sample.len(),
            data.len()
        )));
    }
    let mut units = Vec::new();
    for run in &plan.runs {
        for rep in 0..run.repetitions() {
            let mask = plan.masks_for(run, rep)?;
            for &arch in &archs {
                units.push((run.run_id, rep as u32, arch, mask.clone()));
            }
        }
    }

    let results: Vec<(RecordKey, Result<TrainedCandidate>)> = units
        .into_par_iter()
        .map(|(run_id, repetition, arch, mask)| {
            let identity = CandidateIdentity {
                dataset_id: dataset_id.to_string(),
                run_id,
                repetition,
            };
            let key = RecordKey {
                dataset_id: dataset_id.to_string(),
                run_id,
                repetition,
                architecture: arch,
            };
            let c = TrainConfig {
                seed: candidate_seed(cfg.seed, dataset_id, run_id, repetition, arch),
                ..cfg.clone()
            };
            (key, train_candidate(data, &mask, &identity, arch, &c))
        })
        .collect();

    let mut records = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (key, res) in results {
        match res {
            Ok(t) => {
                traces.push(TraceLine {
                    dataset_id: key.dataset_id.clone(),
                    run_id: key.run_id,
                    repetition: key.repetition,
                    neurons: key.architecture.neurons,
                    activation: key.architecture.activation,
                    flags: t.flags,
                    trace: t.trace,
                });
                records.push(t.record);
            }
            Err(e) => failures.push((key, e.to_string())),
        }
    }
    let mut pool = CandidatePool::new(records, Provenance::Trained);
    pool.sort();
    traces.sort_by(|a, b| {
        (&a.dataset_id, a.run_id, a.neurons, a.activation, a.repetition)
            .cmp(&(&b.dataset_id, b.run_id, b.neurons, b.activation, b.repetition))
    });
    failures.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(PoolOutcome {
        pool,
        traces,
        failures,
    })
}

pub fn read_traces_jsonl<R: std::io::BufRead>(input: R) -> Result<Vec<TraceLine>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::malformed(format!("trace line {}: {e}", i + 1)))?,
        );
    }
    Ok(out)
}

pub fn write_traces_jsonl<W: Write>(traces: &[TraceLine], mut out: W) -> Result<()> {
    for t in traces {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
