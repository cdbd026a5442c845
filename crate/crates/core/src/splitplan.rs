//! Fold layout: stratified k-fold assignment, the run schedule and per-repetition masks.
//!
//! Fold `k - 1` is the fixed test fold of every run. Each run holds out one of the remaining
//! `k - 1` folds, and the `R = k - 2` folds left over are the train/validation folds: repetition
//! `r` of a run early-stops on the `r`-th of them and trains on the rest.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::Role;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of_sample: Vec<usize>,
    /// `class_counts_per_fold[class][fold]`, classes indexed by label id.
    pub class_counts_per_fold: Vec<Vec<usize>>,
}

impl FoldAssignment {
    /// Rebuilds an assignment from stored fold ids, recomputing class counts from `labels`.
    pub fn from_folds(fold_of_sample: Vec<usize>, k: usize, labels: &[usize]) -> Result<Self> {
        if fold_of_sample.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} fold ids for {} labels",
                fold_of_sample.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = fold_of_sample.iter().find(|&&f| f >= k) {
            return Err(Error::InvalidArgument(format!("fold id {bad} >= k = {k}")));
        }
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![vec![0; k]; n_classes];
        for (&f, &c) in fold_of_sample.iter().zip(labels) {
            counts[c][f] += 1;
        }
        Ok(FoldAssignment {
            k,
            fold_of_sample,
            class_counts_per_fold: counts,
        })
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of_sample {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold: each class's indices are shuffled with a class-specific seed and dealt
/// round-robin over the folds. The deal continues where the previous class stopped, so fold sizes
/// also differ by at most one.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InfeasibleSplit(format!("k = {k}; need at least 2 folds")));
    }
    if k > labels.len() {
        return Err(Error::InfeasibleSplit(format!(
            "k = {k} exceeds the number of samples ({})",
            labels.len()
        )));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }

    let mut fold_of_sample = vec![0; labels.len()];
    let mut next = 0usize;
    for (class, idx) in by_class.iter_mut().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "stratified_kfold", &[class as u64]));
        idx.shuffle(&mut rng);
        for &i in idx.iter() {
            fold_of_sample[i] = next % k;
            next += 1;
        }
    }
    FoldAssignment::from_folds(fold_of_sample, k, labels)
}

/// One run: fixed test fold, its holdout fold and the validation fold of each repetition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSpec {
    pub run_id: u32,
    pub test_fold: usize,
    pub holdout_fold: usize,
    pub validation_folds: Vec<usize>,
}

impl RunSpec {
    pub fn repetitions(&self) -> usize {
        self.validation_folds.len()
    }

    /// Folds that carry the Train role for `repetition`.
    pub fn train_folds(&self, repetition: usize) -> Vec<usize> {
        let v = self.validation_folds[repetition];
        self.validation_folds.iter().copied().filter(|&f| f != v).collect()
    }
}

/// `experiment_repeats * (k - 1)` runs. Within one repeat the holdout visits folds `0..k-1` in
/// order; the validation folds of a run are the remaining non-test folds in ascending order.
pub fn build_run_schedule(k: usize, experiment_repeats: usize) -> Result<Vec<RunSpec>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "k = {k}; the schedule needs a test, a holdout and at least one train/validation fold"
        )));
    }
    let test_fold = k - 1;
    let mut runs = Vec::with_capacity(experiment_repeats * (k - 1));
    for repeat in 0..experiment_repeats {
        for holdout_fold in 0..k - 1 {
            let validation_folds = (0..k - 1).filter(|&f| f != holdout_fold).collect();
            runs.push(RunSpec {
                run_id: (repeat * (k - 1) + holdout_fold) as u32,
                test_fold,
                holdout_fold,
                validation_folds,
            });
        }
    }
    Ok(runs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleMask {
    pub role_of_sample: Vec<Role>,
}

impl SampleMask {
    pub fn len(&self) -> usize {
        self.role_of_sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.role_of_sample.is_empty()
    }

    pub fn indices(&self, role: Role) -> Vec<usize> {
        self.role_of_sample
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| (r == role).then_some(i))
            .collect()
    }

    /// Counts per role in [`Role::ALL`] order.
    pub fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for r in &self.role_of_sample {
            c[r.index()] += 1;
        }
        c
    }

    /// Boolean train mask over all samples.
    pub fn train_mask(&self) -> Vec<bool> {
        self.role_of_sample.iter().map(|&r| r == Role::Train).collect()
    }
}

pub fn masks_for(folds: &[usize], run: &RunSpec, repetition: usize) -> Result<SampleMask> {
    if repetition >= run.repetitions() {
        return Err(Error::InvalidArgument(format!(
            "repetition {repetition} out of range for run {} with {} repetitions",
            run.run_id,
            run.repetitions()
        )));
    }
    let validation = run.validation_folds[repetition];
    let role_of_sample = folds
        .iter()
        .map(|&f| {
            if f == run.test_fold {
                Role::Test
            } else if f == run.holdout_fold {
                Role::Holdout
            } else if f == validation {
                Role::Validation
            } else {
                Role::Train
            }
        })
        .collect();
    Ok(SampleMask { role_of_sample })
}

/// Entropy-normalised class imbalance `1 - H / ln k`: 0 for balanced counts, approaching 1 as the
/// mass concentrates in one class. A single class is defined as 1.
pub fn imbalance(class_counts: &[u64]) -> Result<f64> {
    let n: u64 = class_counts.iter().sum();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "imbalance needs at least one positive class count".into(),
        ));
    }
    let k = class_counts.len();
    if k == 1 {
        return Ok(1.0);
    }
    if class_counts.iter().all(|&c| c == class_counts[0]) {
        return Ok(0.0);
    }
    let n = n as f64;
    let h: f64 = class_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok((1.0 - h / (k as f64).ln()).clamp(0.0, 1.0))
}

/// Class counts of a label vector, indexed by label id.
pub fn class_counts(labels: &[usize]) -> Vec<u64> {
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0u64; n_classes];
    for &c in labels {
        counts[c] += 1;
    }
    counts
}

/// Serialisable split plan: the fold assignment plus the run schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub k: usize,
    pub seed: u64,
    pub fold_of_sample: Vec<usize>,
    pub runs: Vec<RunSpec>,
}

impl SplitPlan {
    pub fn build(labels: &[usize], k: usize, experiment_repeats: usize, seed: u64) -> Result<Self> {
        let assignment = stratified_kfold(labels, k, seed)?;
        let runs = build_run_schedule(k, experiment_repeats)?;
        Ok(SplitPlan {
            k,
            seed,
            fold_of_sample: assignment.fold_of_sample,
            runs,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let plan: SplitPlan = serde_json::from_str(s)?;
        if let Some(&bad) = plan.fold_of_sample.iter().find(|&&f| f >= plan.k) {
            return Err(Error::malformed(format!("fold id {bad} >= k = {}", plan.k)));
        }
        Ok(plan)
    }

    pub fn masks_for(&self, run: &RunSpec, repetition: usize) -> Result<SampleMask> {
        masks_for(&self.fold_of_sample, run, repetition)
    }
}
