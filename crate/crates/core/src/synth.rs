//! Synthetic noisy tasks and candidate pools with known ground truth.
//!
//! A task draws features `X`, labels them with a fixed teacher rule `M`, then flips each role's
//! labels independently with that role's rate. A synthetic candidate is described only by how
//! often it agrees with clean labels (`p_clean`) and with flipped labels (`p_noise`); its true
//! generalisation is `p_clean`, since flipped labels carry no signal.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policies::{PolicyId, Selector};
use crate::record::{
    write_records_csv_ext, Architecture, Activation, CandidateRecord, Role, SetMetrics,
    DEFAULT_MAX_NEURONS,
};
use crate::seed::derive_seed;
use crate::trainer::Dataset;

/// Generating rule `M` and the feature distribution it is applied to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TeacherSpec {
    /// Gaussian blobs around random centres, labelled by the nearest centre (a linear rule).
    Blobs {
        n_classes: usize,
        n_features: usize,
        spread: f64,
    },
    /// Points uniform in the unit disc, labelled by equal-area concentric ring.
    Rings { n_classes: usize },
    /// Two interleaved half circles with Gaussian jitter; the label is the moon of origin.
    Moons { noise: f64 },
}

impl TeacherSpec {
    pub fn n_classes(&self) -> usize {
        match self {
            TeacherSpec::Blobs { n_classes, .. } | TeacherSpec::Rings { n_classes } => *n_classes,
            TeacherSpec::Moons { .. } => 2,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TeacherSpec::Blobs { n_features, .. } => *n_features,
            _ => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TeacherSpec::Blobs {
                n_classes,
                n_features,
                spread,
            } => n_classes >= 1 && n_features >= 1 && spread.is_finite() && spread >= 0.0,
            TeacherSpec::Rings { n_classes } => n_classes >= 1,
            TeacherSpec::Moons { noise } => noise.is_finite() && noise >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid teacher {self:?}")))
        }
    }

    /// Fixed parameters of the rule (blob centres); empty for the other teachers.
    fn realize(&self, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        match *self {
            TeacherSpec::Blobs {
                n_classes,
                n_features,
                ..
            } => {
                let n = Normal::new(0.0, 2.0).expect("valid normal");
                (0..n_classes)
                    .map(|_| (0..n_features).map(|_| n.sample(rng)).collect())
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    fn sample(&self, centers: &[Vec<f64>], rng: &mut impl Rng) -> (Vec<f64>, usize) {
        let std = Normal::new(0.0, 1.0).expect("valid normal");
        match *self {
            TeacherSpec::Blobs { spread, .. } => {
                let c = rng.random_range(0..centers.len());
                let x: Vec<f64> = centers[c]
                    .iter()
                    .map(|m| m + spread * std.sample(rng))
                    .collect();
                let label = nearest(centers, &x);
                (x, label)
            }
            TeacherSpec::Rings { n_classes } => {
                let r2: f64 = rng.random();
                let theta = rng.random_range(0.0..2.0 * PI);
                let r = r2.sqrt();
                let label = ((r2 * n_classes as f64) as usize).min(n_classes - 1);
                (vec![r * theta.cos(), r * theta.sin()], label)
            }
            TeacherSpec::Moons { noise } => {
                let c = rng.random_range(0..2usize);
                let t = rng.random_range(0.0..PI);
                let (x, y) = if c == 0 {
                    (t.cos(), t.sin())
                } else {
                    (1.0 - t.cos(), 0.5 - t.sin())
                };
                (
                    vec![x + noise * std.sample(rng), y + noise * std.sample(rng)],
                    c,
                )
            }
        }
    }
}

fn nearest(centers: &[Vec<f64>], x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, m) in centers.iter().enumerate() {
        let d: f64 = m.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Label-flip rate of each role.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseRates {
    pub train: f64,
    pub validation: f64,
    pub holdout: f64,
    pub test: f64,
}

impl NoiseRates {
    pub fn new(train: f64, validation: f64, holdout: f64, test: f64) -> Self {
        NoiseRates {
            train,
            validation,
            holdout,
            test,
        }
    }

    pub fn uniform(rate: f64) -> Self {
        Self::new(rate, rate, rate, rate)
    }

    pub fn get(&self, role: Role) -> f64 {
        match role {
            Role::Train => self.train,
            Role::Validation => self.validation,
            Role::Holdout => self.holdout,
            Role::Test => self.test,
        }
    }

    fn validate(&self) -> Result<()> {
        for role in Role::ALL {
            let e = self.get(role);
            if !(0.0..1.0).contains(&e) {
                return Err(Error::InvalidArgument(format!(
                    "noise rate for {role:?} must lie in [0,1), got {e}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleSamples {
    pub features: Vec<Vec<f64>>,
    pub clean_labels: Vec<usize>,
    pub observed_labels: Vec<usize>,
}

impl RoleSamples {
    pub fn len(&self) -> usize {
        self.clean_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clean_labels.is_empty()
    }

    pub fn flipped(&self) -> usize {
        self.clean_labels
            .iter()
            .zip(&self.observed_labels)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn flip_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.flipped() as f64 / self.len() as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyTask {
    pub teacher: TeacherSpec,
    /// Realised teacher parameters (blob centres).
    pub teacher_centers: Vec<Vec<f64>>,
    pub noise: NoiseRates,
    pub seed: u64,
    /// Indexed by `Role::index()`.
    pub roles: Vec<RoleSamples>,
}

impl NoisyTask {
    pub fn role(&self, role: Role) -> &RoleSamples {
        &self.roles[role.index()]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn flip(label: usize, n_classes: usize, rng: &mut impl Rng) -> usize {
    let other = rng.random_range(0..n_classes - 1);
    if other >= label {
        other + 1
    } else {
        other
    }
}

/// Draws `n_per_role[r]` samples per role, labels them with the teacher and flips each role's
/// labels independently with its noise rate, to a uniformly random other class.
pub fn make_noisy_task(
    n_per_role: [usize; 4],
    teacher: &TeacherSpec,
    noise: NoiseRates,
    seed: u64,
) -> Result<NoisyTask> {
    teacher.validate()?;
    noise.validate()?;
    let n_classes = teacher.n_classes();
    if n_classes < 2 && Role::ALL.iter().any(|&r| noise.get(r) > 0.0) {
        return Err(Error::InvalidArgument(
            "label noise needs at least two classes".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "teacher", &[]));
    let centers = teacher.realize(&mut rng);
    let mut roles = Vec::with_capacity(4);
    for role in Role::ALL {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, "samples", &[role.index() as u64]));
        let mut flip_rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, "flips", &[role.index() as u64]));
        let eps = noise.get(role);
        let n = n_per_role[role.index()];
        let mut features = Vec::with_capacity(n);
        let mut clean = Vec::with_capacity(n);
        let mut observed = Vec::with_capacity(n);
        for _ in 0..n {
            let (x, y) = teacher.sample(&centers, &mut rng);
            let flipped = flip_rng.random::<f64>() < eps;
            features.push(x);
            clean.push(y);
            observed.push(if flipped {
                flip(y, n_classes, &mut flip_rng)
            } else {
                y
            });
        }
        roles.push(RoleSamples {
            features,
            clean_labels: clean,
            observed_labels: observed,
        });
    }
    Ok(NoisyTask {
        teacher: teacher.clone(),
        teacher_centers: centers,
        noise,
        seed,
        roles,
    })
}

/// Plain labelled dataset from a teacher, with optional uniform label noise.
pub fn generate_dataset(teacher: &TeacherSpec, n: usize, label_noise: f64, seed: u64) -> Result<Dataset> {
    let task = make_noisy_task([n, 0, 0, 0], teacher, NoiseRates::new(label_noise, 0.0, 0.0, 0.0), seed)?;
    let role = task.role(Role::Train);
    let mut ds = Dataset::new(role.features.clone(), role.observed_labels.clone())?;
    ds.n_classes = teacher.n_classes();
    Ok(ds)
}

// ---------------------------------------------------------------------------------------------
// candidates

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCandidate {
    pub name: String,
    /// Probability of predicting the clean label of a clean point.
    pub p_clean: f64,
    /// Probability of reproducing a flipped label.
    pub p_noise: f64,
    pub architecture: Architecture,
    pub epochs_trained: u32,
    pub max_epochs: u32,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticCandidate {
    pub fn new(name: &str, p_clean: f64, p_noise: f64, architecture: Architecture, epochs_trained: u32) -> Self {
        SyntheticCandidate {
            name: name.to_string(),
            p_clean,
            p_noise,
            architecture,
            epochs_trained,
            max_epochs: 100,
            seed: 0,
        }
    }

    pub fn true_generalization(&self) -> f64 {
        self.p_clean
    }

    pub fn is_noise_fitter(&self) -> bool {
        self.p_noise > self.p_clean
    }

    pub fn validate(&self) -> Result<()> {
        for (what, p) in [("p_clean", self.p_clean), ("p_noise", self.p_noise)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{} of {} must lie in [0,1], got {p}",
                    what, self.name
                )));
            }
        }
        if self.epochs_trained > self.max_epochs {
            return Err(Error::InvalidArgument(format!(
                "{} trained {} epochs of at most {}",
                self.name, self.epochs_trained, self.max_epochs
            )));
        }
        Ok(())
    }
}

/// Closed-form accuracy against labels flipped with rate `eps`.
pub fn expected_accuracy(cand: &SyntheticCandidate, eps: f64) -> f64 {
    (1.0 - eps) * cand.p_clean + eps * cand.p_noise
}

/// Accuracy against a role's observed labels, realised sample by sample: each clean point is
/// hit with probability `p_clean`, each flipped point with `p_noise`. Deterministic for the
/// candidate's seed. An empty role yields the closed-form value.
pub fn observed_accuracy(cand: &SyntheticCandidate, role: Role, task: &NoisyTask) -> f64 {
    let samples = task.role(role);
    if samples.is_empty() {
        return expected_accuracy(cand, task.noise.get(role));
    }
    let mut rng =
        ChaCha8Rng::seed_from_u64(derive_seed(cand.seed, "observed", &[role.index() as u64]));
    let mut hits = 0usize;
    for (c, o) in samples.clean_labels.iter().zip(&samples.observed_labels) {
        let p = if c == o { cand.p_clean } else { cand.p_noise };
        if rng.random::<f64>() < p {
            hits += 1;
        }
    }
    hits as f64 / samples.len() as f64
}

/// Core record for a synthetic candidate. The repetition field carries the pool index so keys
/// stay unique when architectures repeat.
pub fn to_record(cand: &SyntheticCandidate, index: usize, task: &NoisyTask) -> CandidateRecord {
    let mut metrics = SetMetrics::default();
    for role in Role::ALL {
        metrics.set(role, observed_accuracy(cand, role, task));
    }
    CandidateRecord {
        dataset_id: "synthetic".into(),
        run_id: 0,
        repetition: index as u32,
        architecture: cand.architecture,
        epochs_trained: cand.epochs_trained,
        max_epochs: cand.max_epochs,
        metrics,
        seed: cand.seed,
    }
}

/// Writes a pool in the core record schema plus `true_generalization` and `p_noise` columns.
pub fn write_pool_csv<W: Write>(pool: &[SyntheticCandidate], task: &NoisyTask, out: W) -> Result<()> {
    let records: Vec<CandidateRecord> = pool
        .iter()
        .enumerate()
        .map(|(i, c)| to_record(c, i, task))
        .collect();
    let truth = pool.iter().map(|c| c.true_generalization().to_string()).collect();
    let noise = pool.iter().map(|c| c.p_noise.to_string()).collect();
    write_records_csv_ext(
        &records,
        &[("true_generalization", truth), ("p_noise", noise)],
        out,
    )
}

/// Covariate scheme for sampled pools. Each candidate draws a memorisation level `c ~ U(0,1)`
/// which sets `p_noise = c`; fitting noise costs clean accuracy, more neurons and more epochs:
///
/// * `p_clean = p_clean_max - (p_clean_max - p_clean_min) * c * U(0.5, 1)`
/// * `neurons = 1 + round((max_neurons - 1) * c * U(0.7, 1))`
/// * `epochs  = max(1, round(max_epochs * (0.3 + 0.7 * c * U(0.7, 1))))`
///
/// Activations are uniform over all seven.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingScheme {
    pub size: usize,
    pub p_clean_min: f64,
    pub p_clean_max: f64,
    pub max_neurons: u32,
    pub max_epochs: u32,
}

impl Default for SamplingScheme {
    fn default() -> Self {
        SamplingScheme {
            size: 50,
            p_clean_min: 0.6,
            p_clean_max: 0.95,
            max_neurons: 20,
            max_epochs: 100,
        }
    }
}

impl SamplingScheme {
    pub fn sample(&self, seed: u64) -> Result<Vec<SyntheticCandidate>> {
        let ok = self.size > 0
            && (0.0..=1.0).contains(&self.p_clean_min)
            && (0.0..=1.0).contains(&self.p_clean_max)
            && self.p_clean_min <= self.p_clean_max
            && (1..=DEFAULT_MAX_NEURONS).contains(&self.max_neurons)
            && self.max_epochs >= 1;
        if !ok {
            return Err(Error::InvalidArgument(format!("invalid sampling scheme {self:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(self.size);
        for i in 0..self.size {
            let c: f64 = rng.random();
            let p_clean = self.p_clean_max
                - (self.p_clean_max - self.p_clean_min) * c * rng.random_range(0.5..=1.0);
            let neurons = 1 + ((self.max_neurons - 1) as f64 * c * rng.random_range(0.7..=1.0)).round() as u32;
            let epochs = ((self.max_epochs as f64) * (0.3 + 0.7 * c * rng.random_range(0.7..=1.0)))
                .round()
                .clamp(1.0, self.max_epochs as f64) as u32;
            let activation = Activation::ALL[rng.random_range(0..Activation::ALL.len())];
            out.push(SyntheticCandidate {
                name: format!("c{i}"),
                p_clean,
                p_noise: c,
                architecture: Architecture::new(neurons, activation),
                epochs_trained: epochs,
                max_epochs: self.max_epochs,
                seed: 0,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoolSpec {
    Explicit { candidates: Vec<SyntheticCandidate> },
    Sampled(SamplingScheme),
}

impl PoolSpec {
    /// The two-model pool of the label-noise thought experiment: `A` fits noise with more
    /// capacity, `B` learns only the clean rule.
    pub fn noise_fitter_pair() -> Self {
        PoolSpec::Explicit {
            candidates: vec![
                SyntheticCandidate::new("A", 0.8, 1.0, Architecture::new(20, Activation::Relu), 80),
                SyntheticCandidate::new("B", 1.0, 0.0, Architecture::new(5, Activation::Relu), 40),
            ],
        }
    }

    fn realize(&self, seed: u64) -> Result<Vec<SyntheticCandidate>> {
        match self {
            PoolSpec::Explicit { candidates } => {
                if candidates.is_empty() {
                    return Err(Error::InvalidArgument("synthetic pool is empty".into()));
                }
                Ok(candidates.clone())
            }
            PoolSpec::Sampled(s) => s.sample(seed),
        }
    }
}

// ---------------------------------------------------------------------------------------------
// regret

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretOutcome {
    pub policy: PolicyId,
    pub picked: usize,
    pub picked_name: String,
    pub regret: f64,
    pub picked_noise_fitter: bool,
    pub score: f64,
}

/// Regret of one policy's Individual pick: best true generalisation in the pool minus that of
/// the pick.
pub fn evaluate_selection_regret(
    policy: PolicyId,
    pool: &[SyntheticCandidate],
    task: &NoisyTask,
) -> Result<RegretOutcome> {
    evaluate_with(&Selector::default(), policy, pool, task)
}

pub fn evaluate_with(
    selector: &Selector,
    policy: PolicyId,
    pool: &[SyntheticCandidate],
    task: &NoisyTask,
) -> Result<RegretOutcome> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("synthetic pool is empty".into()));
    }
    for c in pool {
        c.validate()?;
    }
    let records: Vec<CandidateRecord> = pool
        .iter()
        .enumerate()
        .map(|(i, c)| to_record(c, i, task))
        .collect();
    let refs: Vec<&CandidateRecord> = records.iter().collect();
    let sel = selector.individual(policy, &refs)?;
    let picked = sel.selected.repetition as usize;
    let best = pool
        .iter()
        .map(SyntheticCandidate::true_generalization)
        .fold(f64::NEG_INFINITY, f64::max);
    let cand = &pool[picked];
    Ok(RegretOutcome {
        policy,
        picked,
        picked_name: cand.name.clone(),
        regret: best - cand.true_generalization(),
        picked_noise_fitter: cand.is_noise_fitter(),
        score: sel.score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationSpec {
    pub teacher: TeacherSpec,
    pub n_per_role: [usize; 4],
    pub noise: NoiseRates,
    pub pool: PoolSpec,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self::noise_scenario()
    }
}

impl SimulationSpec {
    /// Holdout labels 20% wrong, Train and Validation 5%, over the two-model pool. Each role
    /// holds 1000 points so a single draw rarely reverses the expected ordering.
    pub fn noise_scenario() -> Self {
        SimulationSpec {
            teacher: TeacherSpec::Blobs {
                n_classes: 3,
                n_features: 2,
                spread: 1.0,
            },
            n_per_role: [1000; 4],
            noise: NoiseRates::new(0.05, 0.05, 0.2, 0.0),
            pool: PoolSpec::noise_fitter_pair(),
            trials: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRegret {
    pub policy: PolicyId,
    pub trials: usize,
    pub mean_regret: f64,
    pub max_regret: f64,
    pub noise_fitter_picks: usize,
    pub noise_fitter_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub spec: SimulationSpec,
    pub policies: Vec<PolicyRegret>,
    /// `outcomes[t][p]`: trial `t`, policy `p` in `policies` order.
    pub outcomes: Vec<Vec<RegretOutcome>>,
}

impl SimulationReport {
    pub fn policy(&self, id: PolicyId) -> Option<&PolicyRegret> {
        self.policies.iter().find(|p| p.policy == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs `spec.trials` independent trials. Each trial draws a fresh task and fresh candidate
/// realisations from seeds derived from `spec.seed`; trials run in parallel and are collected in
/// trial order.
pub fn simulate(spec: &SimulationSpec, policies: &[PolicyId], selector: &Selector) -> Result<SimulationReport> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("simulation needs at least one trial".into()));
    }
    if policies.is_empty() {
        return Err(Error::InvalidArgument("no policies to simulate".into()));
    }
    let outcomes: Vec<Vec<RegretOutcome>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<RegretOutcome>> {
            let t = t as u64;
            let task = make_noisy_task(
                spec.n_per_role,
                &spec.teacher,
                spec.noise,
                derive_seed(spec.seed, "task", &[t]),
            )?;
            let mut pool = spec.pool.realize(derive_seed(spec.seed, "pool", &[t]))?;
            for (i, c) in pool.iter_mut().enumerate() {
                c.seed = derive_seed(spec.seed, "candidate", &[t, i as u64]);
            }
            policies
                .iter()
                .map(|&p| evaluate_with(selector, p, &pool, &task))
                .collect()
        })
        .collect::<Result<_>>()?;

    let n = spec.trials as f64;
    let summary = policies
        .iter()
        .enumerate()
        .map(|(j, &policy)| {
            let col = outcomes.iter().map(|row| &row[j]);
            let picks = col.clone().filter(|o| o.picked_noise_fitter).count();
            PolicyRegret {
                policy,
                trials: spec.trials,
                mean_regret: col.clone().map(|o| o.regret).sum::<f64>() / n,
                max_regret: col.map(|o| o.regret).fold(0.0, f64::max),
                noise_fitter_picks: picks,
                noise_fitter_frequency: picks as f64 / n,
            }
        })
        .collect();
    Ok(SimulationReport {
        spec: spec.clone(),
        policies: summary,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair() -> Vec<SyntheticCandidate> {
        match PoolSpec::noise_fitter_pair() {
            PoolSpec::Explicit { candidates } => candidates,
            _ => unreachable!(),
        }
    }

    fn blobs() -> TeacherSpec {
        TeacherSpec::Blobs {
            n_classes: 3,
            n_features: 2,
            spread: 1.0,
        }
    }

    #[test]
    fn closed_form_mixture() {
        let p = pair();
        assert!((expected_accuracy(&p[0], 0.2) - 0.84).abs() < 1e-12);
        assert!((expected_accuracy(&p[1], 0.2) - 0.80).abs() < 1e-12);
        assert_eq!(expected_accuracy(&p[0], 0.0), 0.8);
    }

    #[test]
    fn zero_noise_keeps_labels() {
        let t = make_noisy_task([50; 4], &blobs(), NoiseRates::uniform(0.0), 3).unwrap();
        for r in &t.roles {
            assert_eq!(r.clean_labels, r.observed_labels);
        }
        let b = pair()[1].clone();
        for role in Role::ALL {
            assert_eq!(observed_accuracy(&b, role, &t), 1.0);
        }
    }

    #[test]
    fn same_seed_same_task() {
        let noise = NoiseRates::new(0.1, 0.1, 0.2, 0.0);
        let a = make_noisy_task([40; 4], &TeacherSpec::Rings { n_classes: 3 }, noise, 9).unwrap();
        let b = make_noisy_task([40; 4], &TeacherSpec::Rings { n_classes: 3 }, noise, 9).unwrap();
        assert_eq!(a, b);
        let c = make_noisy_task([40; 4], &TeacherSpec::Rings { n_classes: 3 }, noise, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn flips_go_to_other_classes_at_the_right_rate() {
        let t = make_noisy_task([4000; 4], &blobs(), NoiseRates::new(0.05, 0.1, 0.2, 0.3), 1).unwrap();
        for role in Role::ALL {
            let eps = t.noise.get(role);
            let r = t.role(role);
            let se = (eps * (1.0 - eps) / r.len() as f64).sqrt();
            assert!((r.flip_fraction() - eps).abs() <= 3.0 * se, "{role:?}");
            assert!(r.observed_labels.iter().all(|&y| y < 3));
        }
        // a flipped label never equals its clean label by construction
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for y in 0..4 {
            for _ in 0..50 {
                assert_ne!(flip(y, 4, &mut rng), y);
            }
        }
    }

    #[test]
    fn teacher_labels_follow_the_rule() {
        let t = make_noisy_task([200, 0, 0, 0], &blobs(), NoiseRates::default(), 4).unwrap();
        let r = t.role(Role::Train);
        for (x, &y) in r.features.iter().zip(&r.clean_labels) {
            assert_eq!(nearest(&t.teacher_centers, x), y);
        }
        let rings = make_noisy_task([300, 0, 0, 0], &TeacherSpec::Rings { n_classes: 2 }, NoiseRates::default(), 4).unwrap();
        let r = rings.role(Role::Train);
        for (x, &y) in r.features.iter().zip(&r.clean_labels) {
            let r2 = x[0] * x[0] + x[1] * x[1];
            assert_eq!(y, usize::from(r2 >= 0.5 - 1e-12));
        }
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(make_noisy_task([1; 4], &blobs(), NoiseRates::uniform(1.0), 0).is_err());
        assert!(make_noisy_task([1; 4], &blobs(), NoiseRates::uniform(-0.1), 0).is_err());
        let one = TeacherSpec::Rings { n_classes: 1 };
        assert!(make_noisy_task([1; 4], &one, NoiseRates::uniform(0.1), 0).is_err());
    }

    #[test]
    fn empirical_accuracy_tracks_mixture() {
        let noise = NoiseRates::new(0.05, 0.1, 0.2, 0.3);
        let t = make_noisy_task([5000; 4], &blobs(), noise, 2).unwrap();
        let mut c = SyntheticCandidate::new("m", 0.7, 0.4, Architecture::new(3, Activation::Tanh), 10);
        c.seed = 77;
        for role in Role::ALL {
            let r = t.role(role);
            // condition on the realised flip count, then compare to the Bernoulli mean
            let f = r.flip_fraction();
            let p = (1.0 - f) * c.p_clean + f * c.p_noise;
            let se = (p * (1.0 - p) / r.len() as f64).sqrt();
            assert!((observed_accuracy(&c, role, &t) - p).abs() <= 3.0 * se, "{role:?}");
        }
    }

    #[test]
    fn holdout_policy_picks_noise_fitter_on_noisy_holdout() {
        // with 100 holdout points holding exactly the expected 20 flips, A's observed accuracy
        // sits near 0.84 and B's is exactly 0.80
        let mut found = false;
        for seed in 0..200 {
            let t = make_noisy_task([100; 4], &blobs(), NoiseRates::new(0.0, 0.0, 0.2, 0.0), seed).unwrap();
            if t.role(Role::Holdout).flipped() != 20 {
                continue;
            }
            let mut p = pair();
            p[0].seed = 1;
            let b = observed_accuracy(&p[1], Role::Holdout, &t);
            assert!((b - 0.80).abs() < 1e-12);
            let out = evaluate_selection_regret(PolicyId::Holdout, &p, &t).unwrap();
            if observed_accuracy(&p[0], Role::Holdout, &t) > b {
                assert_eq!(out.picked_name, "A");
                assert!((out.regret - 0.2).abs() < 1e-12);
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn noise_free_and_degenerate_pools_have_zero_regret() {
        let t = make_noisy_task([200; 4], &blobs(), NoiseRates::uniform(0.0), 5).unwrap();
        let mut p = pair();
        p[0].seed = 3;
        for policy in PolicyId::ALL {
            let o = evaluate_selection_regret(policy, &p, &t).unwrap();
            if !policy.is_topsis() {
                assert_eq!(o.regret, 0.0, "{policy}");
            }
        }
        let same = vec![pair()[0].clone(); 4];
        let t = make_noisy_task([100; 4], &blobs(), NoiseRates::uniform(0.2), 5).unwrap();
        for policy in PolicyId::ALL {
            assert_eq!(evaluate_selection_regret(policy, &same, &t).unwrap().regret, 0.0);
        }
    }

    #[test]
    fn scenario_separates_holdout_from_ttvh() {
        let spec = SimulationSpec {
            trials: 100,
            ..SimulationSpec::noise_scenario()
        };
        let r = simulate(&spec, &[PolicyId::Holdout, PolicyId::Ttvh], &Selector::default()).unwrap();
        let h = r.policy(PolicyId::Holdout).unwrap();
        let t = r.policy(PolicyId::Ttvh).unwrap();
        assert!(h.noise_fitter_picks > t.noise_fitter_picks);
        assert!(h.noise_fitter_frequency >= 0.95);
        assert!(h.mean_regret >= 0.15);
        let again = simulate(&spec, &[PolicyId::Holdout, PolicyId::Ttvh], &Selector::default()).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn sampled_pools_follow_the_scheme() {
        let s = SamplingScheme::default();
        let pool = s.sample(4).unwrap();
        assert_eq!(pool.len(), s.size);
        for c in &pool {
            c.validate().unwrap();
            assert!(c.p_clean >= s.p_clean_min - 1e-12 && c.p_clean <= s.p_clean_max + 1e-12);
            assert!((1..=s.max_neurons).contains(&c.architecture.neurons));
        }
        // memorisation drives capacity up
        let hi: Vec<_> = pool.iter().filter(|c| c.p_noise > 0.7).collect();
        let lo: Vec<_> = pool.iter().filter(|c| c.p_noise < 0.3).collect();
        let mean_n = |v: &[&SyntheticCandidate]| {
            v.iter().map(|c| c.architecture.neurons as f64).sum::<f64>() / v.len() as f64
        };
        assert!(mean_n(&hi) > mean_n(&lo));
    }

    #[test]
    fn pool_csv_is_readable_by_the_core_reader() {
        let t = make_noisy_task([20; 4], &blobs(), NoiseRates::uniform(0.1), 6).unwrap();
        let p = pair();
        let mut buf = Vec::new();
        write_pool_csv(&p, &t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().next().unwrap().ends_with("true_generalization,p_noise"));
        let back = crate::record::read_records_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        let json = t.to_json().unwrap();
        let t2: NoisyTask = serde_json::from_str(&json).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn generated_datasets_have_requested_shape() {
        let d = generate_dataset(&TeacherSpec::Moons { noise: 0.1 }, 600, 0.0, 1).unwrap();
        assert_eq!((d.len(), d.n_features, d.n_classes), (600, 2, 2));
        let d = generate_dataset(&TeacherSpec::Blobs { n_classes: 4, n_features: 2, spread: 1.0 }, 600, 0.1, 1).unwrap();
        assert_eq!(d.n_classes, 4);
    }

    proptest! {
        #[test]
        fn regret_is_never_negative(
            ps in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, 1u32..=20), 1..8),
            eps in 0.0f64..0.5,
            seed in any::<u64>(),
        ) {
            let pool: Vec<_> = ps
                .iter()
                .enumerate()
                .map(|(i, &(c, n, neurons))| {
                    let mut s = SyntheticCandidate::new(&format!("m{i}"), c, n, Architecture::new(neurons, Activation::Relu), 10);
                    s.seed = seed ^ i as u64;
                    s
                })
                .collect();
            let t = make_noisy_task([30; 4], &blobs(), NoiseRates::uniform(eps), seed).unwrap();
            for policy in [PolicyId::Holdout, PolicyId::Ttvh, PolicyId::Ttvhn, PolicyId::Test] {
                let o = evaluate_selection_regret(policy, &pool, &t).unwrap();
                prop_assert!(o.regret >= 0.0);
            }
        }
    }
}
