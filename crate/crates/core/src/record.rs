//! Candidate records, pools, validation and the record codecs.
//!
//! Accuracies are fractions in `[0, 1]`. Reports that display percentages multiply by 100 at
//! the edge; nothing in the pipeline stores percentages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest hidden-layer width accepted by [`validate_pool`].
pub const DEFAULT_MAX_NEURONS: u32 = 100;

/// Hidden-layer activation. Declaration order is the tiebreak order used by the policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Activation {
    Identity,
    Gelu,
    LeakyRelu,
    Relu,
    Selu,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub const ALL: [Activation; 7] = [
        Activation::Identity,
        Activation::Gelu,
        Activation::LeakyRelu,
        Activation::Relu,
        Activation::Selu,
        Activation::Sigmoid,
        Activation::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Identity => "Identity",
            Activation::Gelu => "GELU",
            Activation::LeakyRelu => "LeakyReLU",
            Activation::Relu => "ReLU",
            Activation::Selu => "SELU",
            Activation::Sigmoid => "Sigmoid",
            Activation::Tanh => "Tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Activation::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownActivation(s.to_string()))
    }
}

impl TryFrom<String> for Activation {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Activation> for String {
    fn from(a: Activation) -> String {
        a.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Architecture {
    pub neurons: u32,
    pub activation: Activation,
}

impl Architecture {
    pub fn new(neurons: u32, activation: Activation) -> Self {
        Architecture {
            neurons,
            activation,
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.neurons, self.activation)
    }
}

/// The four disjoint sample roles of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Train,
    Validation,
    Holdout,
    Test,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Train, Role::Validation, Role::Holdout, Role::Test];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Per-set accuracies as fractions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SetMetrics {
    pub train: f64,
    pub validation: f64,
    pub holdout: f64,
    pub test: f64,
}

impl SetMetrics {
    pub fn new(train: f64, validation: f64, holdout: f64, test: f64) -> Self {
        SetMetrics {
            train,
            validation,
            holdout,
            test,
        }
    }

    pub fn get(&self, role: Role) -> f64 {
        match role {
            Role::Train => self.train,
            Role::Validation => self.validation,
            Role::Holdout => self.holdout,
            Role::Test => self.test,
        }
    }

    pub fn set(&mut self, role: Role, value: f64) {
        match role {
            Role::Train => self.train = value,
            Role::Validation => self.validation = value,
            Role::Holdout => self.holdout = value,
            Role::Test => self.test = value,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.train, self.validation, self.holdout, self.test]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub dataset_id: String,
    pub run_id: u32,
    pub repetition: u32,
    pub architecture: Architecture,
    pub epochs_trained: u32,
    pub max_epochs: u32,
    pub metrics: SetMetrics,
    pub seed: u64,
}

/// Identity of a record within a pool.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RecordKey {
    pub dataset_id: String,
    pub run_id: u32,
    pub repetition: u32,
    pub architecture: Architecture,
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/run{}/rep{}/{}",
            self.dataset_id, self.run_id, self.repetition, self.architecture
        )
    }
}

impl CandidateRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            dataset_id: self.dataset_id.clone(),
            run_id: self.run_id,
            repetition: self.repetition,
            architecture: self.architecture,
        }
    }

    /// Ordering used for canonical pool order: dataset, run, architecture, repetition.
    pub fn sort_key(&self) -> (&str, u32, Architecture, u32) {
        (
            self.dataset_id.as_str(),
            self.run_id,
            self.architecture,
            self.repetition,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Trained,
    Synthetic,
    Ingested,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    pub records: Vec<CandidateRecord>,
    pub provenance: Provenance,
}

impl CandidatePool {
    pub fn new(records: Vec<CandidateRecord>, provenance: Provenance) -> Self {
        CandidatePool {
            records,
            provenance,
        }
    }

    /// Sorts records into canonical order (see [`CandidateRecord::sort_key`]).
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }

    pub fn dataset_ids(&self) -> Vec<String> {
        let ids: BTreeSet<&str> = self.records.iter().map(|r| r.dataset_id.as_str()).collect();
        ids.into_iter().map(str::to_string).collect()
    }

    /// Records grouped by `(dataset_id, run_id)`, in key order.
    pub fn by_run(&self) -> BTreeMap<(String, u32), Vec<&CandidateRecord>> {
        let mut out: BTreeMap<(String, u32), Vec<&CandidateRecord>> = BTreeMap::new();
        for r in &self.records {
            out.entry((r.dataset_id.clone(), r.run_id)).or_default().push(r);
        }
        out
    }
}

// ---------------------------------------------------------------------------------------------
// validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MetricField {
    Train,
    Validation,
    Holdout,
    Test,
}

#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize)]
pub enum Violation {
    EmptyPool,
    MetricOutOfRange {
        key: RecordKey,
        field: MetricField,
        value: f64,
    },
    NeuronsOutOfRange {
        key: RecordKey,
        neurons: u32,
        max: u32,
    },
    ZeroMaxEpochs {
        key: RecordKey,
    },
    EpochsExceedMax {
        key: RecordKey,
        epochs_trained: u32,
        max_epochs: u32,
    },
    DuplicateKey {
        key: RecordKey,
        count: usize,
    },
    InconsistentRepetitions {
        dataset_id: String,
        run_id: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPool => write!(f, "pool is empty"),
            Violation::MetricOutOfRange { key, field, value } => {
                write!(f, "{key}: metric out of [0,1] ({field:?} = {value})")
            }
            Violation::NeuronsOutOfRange { key, neurons, max } => {
                write!(f, "{key}: neurons {neurons} outside 1..={max}")
            }
            Violation::ZeroMaxEpochs { key } => write!(f, "{key}: max_epochs must be >= 1"),
            Violation::EpochsExceedMax {
                key,
                epochs_trained,
                max_epochs,
            } => write!(
                f,
                "{key}: epochs_trained {epochs_trained} exceeds max_epochs {max_epochs}"
            ),
            Violation::DuplicateKey { key, count } => {
                write!(f, "{key}: duplicate key ({count} records)")
            }
            Violation::InconsistentRepetitions {
                dataset_id,
                run_id,
            } => write!(
                f,
                "{dataset_id}/run{run_id}: repetition set differs from other runs of the dataset"
            ),
        }
    }
}

/// Checks every record invariant and pool-wide key uniqueness with the default neuron bound.
pub fn validate_pool(pool: &CandidatePool) -> Vec<Violation> {
    validate_pool_with(pool, DEFAULT_MAX_NEURONS)
}

/// Like [`validate_pool`] with an explicit neuron bound. The report is sorted, so it does not
/// depend on record order.
pub fn validate_pool_with(pool: &CandidatePool, max_neurons: u32) -> Vec<Violation> {
    let mut out = Vec::new();
    if pool.records.is_empty() {
        out.push(Violation::EmptyPool);
        return out;
    }

    let mut counts: BTreeMap<RecordKey, usize> = BTreeMap::new();
    let mut reps: BTreeMap<&str, BTreeMap<u32, BTreeSet<u32>>> = BTreeMap::new();

    for r in &pool.records {
        let key = r.key();
        let fields = [
            (MetricField::Train, r.metrics.train),
            (MetricField::Validation, r.metrics.validation),
            (MetricField::Holdout, r.metrics.holdout),
            (MetricField::Test, r.metrics.test),
        ];
        for (field, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                out.push(Violation::MetricOutOfRange {
                    key: key.clone(),
                    field,
                    value,
                });
            }
        }
        let n = r.architecture.neurons;
        if n == 0 || n > max_neurons {
            out.push(Violation::NeuronsOutOfRange {
                key: key.clone(),
                neurons: n,
                max: max_neurons,
            });
        }
        if r.max_epochs == 0 {
            out.push(Violation::ZeroMaxEpochs { key: key.clone() });
        }
        if r.epochs_trained > r.max_epochs {
            out.push(Violation::EpochsExceedMax {
                key: key.clone(),
                epochs_trained: r.epochs_trained,
                max_epochs: r.max_epochs,
            });
        }
        reps.entry(r.dataset_id.as_str())
            .or_default()
            .entry(r.run_id)
            .or_default()
            .insert(r.repetition);
        *counts.entry(key).or_default() += 1;
    }

    for (key, count) in counts {
        if count > 1 {
            out.push(Violation::DuplicateKey { key, count });
        }
    }

    for (dataset, runs) in reps {
        let union: BTreeSet<u32> = runs.values().flatten().copied().collect();
        for (run_id, set) in runs {
            if set != union {
                out.push(Violation::InconsistentRepetitions {
                    dataset_id: dataset.to_string(),
                    run_id,
                });
            }
        }
    }

    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out
}

// ---------------------------------------------------------------------------------------------
// codecs

/// Column names of the candidate CSV schema, in order.
pub const RECORD_COLUMNS: [&str; 12] = [
    "dataset_id",
    "run_id",
    "repetition",
    "neurons",
    "activation",
    "epochs_trained",
    "max_epochs",
    "acc_train",
    "acc_validation",
    "acc_holdout",
    "acc_test",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RecordRow {
    dataset_id: String,
    run_id: u32,
    repetition: u32,
    neurons: u32,
    activation: String,
    epochs_trained: u32,
    max_epochs: u32,
    acc_train: f64,
    acc_validation: f64,
    acc_holdout: f64,
    acc_test: f64,
    seed: u64,
}

impl From<&CandidateRecord> for RecordRow {
    fn from(r: &CandidateRecord) -> Self {
        RecordRow {
            dataset_id: r.dataset_id.clone(),
            run_id: r.run_id,
            repetition: r.repetition,
            neurons: r.architecture.neurons,
            activation: r.architecture.activation.name().to_string(),
            epochs_trained: r.epochs_trained,
            max_epochs: r.max_epochs,
            acc_train: r.metrics.train,
            acc_validation: r.metrics.validation,
            acc_holdout: r.metrics.holdout,
            acc_test: r.metrics.test,
            seed: r.seed,
        }
    }
}

impl TryFrom<RecordRow> for CandidateRecord {
    type Error = Error;

    fn try_from(row: RecordRow) -> Result<Self> {
        Ok(CandidateRecord {
            architecture: Architecture::new(row.neurons, row.activation.parse()?),
            dataset_id: row.dataset_id,
            run_id: row.run_id,
            repetition: row.repetition,
            epochs_trained: row.epochs_trained,
            max_epochs: row.max_epochs,
            metrics: SetMetrics::new(
                row.acc_train,
                row.acc_validation,
                row.acc_holdout,
                row.acc_test,
            ),
            seed: row.seed,
        })
    }
}

impl CandidateRecord {
    /// The record's CSV fields in [`RECORD_COLUMNS`] order.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.dataset_id.clone(),
            self.run_id.to_string(),
            self.repetition.to_string(),
            self.architecture.neurons.to_string(),
            self.architecture.activation.name().to_string(),
            self.epochs_trained.to_string(),
            self.max_epochs.to_string(),
            self.metrics.train.to_string(),
            self.metrics.validation.to_string(),
            self.metrics.holdout.to_string(),
            self.metrics.test.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Writes records in the candidate CSV schema.
pub fn write_records_csv<W: Write>(records: &[CandidateRecord], out: W) -> Result<()> {
    write_records_csv_ext(records, &[], out)
}

/// Writes records followed by extension columns. `extensions` pairs a column name with one
/// value per record. Readers of the base schema ignore the extra columns.
pub fn write_records_csv_ext<W: Write>(
    records: &[CandidateRecord],
    extensions: &[(&str, Vec<String>)],
    out: W,
) -> Result<()> {
    for (name, values) in extensions {
        if values.len() != records.len() {
            return Err(Error::InvalidArgument(format!(
                "extension column {name} has {} values for {} records",
                values.len(),
                records.len()
            )));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = RECORD_COLUMNS.to_vec();
    header.extend(extensions.iter().map(|(n, _)| *n));
    w.write_record(&header)?;
    for (i, r) in records.iter().enumerate() {
        let mut fields = r.csv_fields();
        fields.extend(extensions.iter().map(|(_, v)| v[i].clone()));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records from the candidate CSV schema. Columns are matched by header name; unknown
/// columns are ignored, unknown activations rejected.
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<CandidateRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    for col in RECORD_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::malformed(format!("missing column {col:?}")));
        }
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<RecordRow>() {
        out.push(CandidateRecord::try_from(row?)?);
    }
    Ok(out)
}

/// Writes one JSON object per line with the CSV field names.
pub fn write_records_jsonl<W: Write>(records: &[CandidateRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &RecordRow::from(r))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records_jsonl<R: BufRead>(input: R) -> Result<Vec<CandidateRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: RecordRow = serde_json::from_str(&line)?;
        out.push(CandidateRecord::try_from(row)?);
    }
    Ok(out)
}
