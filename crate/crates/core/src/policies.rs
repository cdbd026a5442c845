//! Named selection policies and aggregation levels.
//!
//! A policy scores every candidate of a run: single-set policies by one accuracy, TOPSIS
//! policies by closeness over the criteria spelled out by their name (after the leading `T`):
//! `T`rain, `V`alidation, `H`oldout and `T`est accuracies are maximised, `N`eurons minimised,
//! `E`pochs maximised and `B` (epochs, begin of training) minimised.
//!
//! Aggregation decides what is compared:
//! * `Individual` picks the best candidate of the run directly (TOPSIS policies restrict the pick
//!   to the Pareto non-dominated candidates).
//! * `Local` averages competition ranks per architecture within the run, picks the best
//!   architecture, then its best-ranked repetition.
//! * `Global` averages ranks per architecture over every run of the dataset, fixes one
//!   architecture, then picks its best-ranked repetition in each run.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcdm::{pareto_filter, topsis_rank, CriterionSpec, DecisionMatrix, Direction};
use crate::record::{Architecture, CandidateRecord, Role, SetMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyId {
    Train,
    Validation,
    Holdout,
    Test,
    Tht,
    Ttvh,
    Ttvht,
    Ttvhn,
    Ttvhtn,
    Thtn,
    Ttvhne,
    Ttvhnb,
    Thtnb,
    Thtne,
    Ttvhtne,
    Ttvhtnb,
}

impl PolicyId {
    pub const ALL: [PolicyId; 16] = [
        PolicyId::Train,
        PolicyId::Validation,
        PolicyId::Holdout,
        PolicyId::Test,
        PolicyId::Tht,
        PolicyId::Ttvh,
        PolicyId::Ttvht,
        PolicyId::Ttvhn,
        PolicyId::Ttvhtn,
        PolicyId::Thtn,
        PolicyId::Ttvhne,
        PolicyId::Ttvhnb,
        PolicyId::Thtnb,
        PolicyId::Thtne,
        PolicyId::Ttvhtne,
        PolicyId::Ttvhtnb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyId::Train => "Train",
            PolicyId::Validation => "Validation",
            PolicyId::Holdout => "Holdout",
            PolicyId::Test => "Test",
            PolicyId::Tht => "THT",
            PolicyId::Ttvh => "TTVH",
            PolicyId::Ttvht => "TTVHT",
            PolicyId::Ttvhn => "TTVHN",
            PolicyId::Ttvhtn => "TTVHTN",
            PolicyId::Thtn => "THTN",
            PolicyId::Ttvhne => "TTVHNE",
            PolicyId::Ttvhnb => "TTVHNB",
            PolicyId::Thtnb => "THTNB",
            PolicyId::Thtne => "THTNE",
            PolicyId::Ttvhtne => "TTVHTNE",
            PolicyId::Ttvhtnb => "TTVHTNB",
        }
    }

    pub fn is_topsis(self) -> bool {
        !matches!(
            self,
            PolicyId::Train | PolicyId::Validation | PolicyId::Holdout | PolicyId::Test
        )
    }

    pub fn valid_ids() -> String {
        PolicyId::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        PolicyId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownPolicy {
                name: s.to_string(),
                valid: PolicyId::valid_ids(),
            })
    }
}

impl TryFrom<String> for PolicyId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicyId> for String {
    fn from(p: PolicyId) -> String {
        p.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AggregationId {
    Individual,
    Local,
    Global,
}

impl AggregationId {
    pub const ALL: [AggregationId; 3] =
        [AggregationId::Individual, AggregationId::Local, AggregationId::Global];

    pub fn name(self) -> &'static str {
        match self {
            AggregationId::Individual => "Individual",
            AggregationId::Local => "Local",
            AggregationId::Global => "Global",
        }
    }
}

impl fmt::Display for AggregationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AggregationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        AggregationId::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownAggregation(s.to_string()))
    }
}

impl TryFrom<String> for AggregationId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AggregationId> for String {
    fn from(a: AggregationId) -> String {
        a.name().to_string()
    }
}

/// A quantity a policy looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Accuracy(Role),
    Neurons,
    Epochs(Direction),
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Accuracy(Role::Train) => "train",
            Criterion::Accuracy(Role::Validation) => "validation",
            Criterion::Accuracy(Role::Holdout) => "holdout",
            Criterion::Accuracy(Role::Test) => "test",
            Criterion::Neurons => "neurons",
            Criterion::Epochs(_) => "epochs",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Criterion::Accuracy(_) => Direction::Maximize,
            Criterion::Neurons => Direction::Minimize,
            Criterion::Epochs(d) => d,
        }
    }

    pub fn value(self, r: &CandidateRecord) -> f64 {
        match self {
            Criterion::Accuracy(role) => r.metrics.get(role),
            Criterion::Neurons => f64::from(r.architecture.neurons),
            Criterion::Epochs(_) => f64::from(r.epochs_trained),
        }
    }
}

/// The criteria a policy's name spells out, in train/validation/holdout/test/neurons/epochs order.
pub fn criteria_set(policy: PolicyId) -> Vec<Criterion> {
    use Criterion::*;
    use Role::*;
    const E: Criterion = Epochs(Direction::Maximize);
    const B: Criterion = Epochs(Direction::Minimize);
    match policy {
        PolicyId::Train => vec![Accuracy(Train)],
        PolicyId::Validation => vec![Accuracy(Validation)],
        PolicyId::Holdout => vec![Accuracy(Holdout)],
        PolicyId::Test => vec![Accuracy(Test)],
        PolicyId::Tht => vec![Accuracy(Holdout), Accuracy(Test)],
        PolicyId::Ttvh => vec![Accuracy(Train), Accuracy(Validation), Accuracy(Holdout)],
        PolicyId::Ttvht => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Accuracy(Test),
        ],
        PolicyId::Ttvhn => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Neurons,
        ],
        PolicyId::Ttvhtn => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Accuracy(Test),
            Neurons,
        ],
        PolicyId::Thtn => vec![Accuracy(Holdout), Accuracy(Test), Neurons],
        PolicyId::Ttvhne => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Neurons,
            E,
        ],
        PolicyId::Ttvhnb => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Neurons,
            B,
        ],
        PolicyId::Thtnb => vec![Accuracy(Holdout), Accuracy(Test), Neurons, B],
        PolicyId::Thtne => vec![Accuracy(Holdout), Accuracy(Test), Neurons, E],
        PolicyId::Ttvhtne => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Accuracy(Test),
            Neurons,
            E,
        ],
        PolicyId::Ttvhtnb => vec![
            Accuracy(Train),
            Accuracy(Validation),
            Accuracy(Holdout),
            Accuracy(Test),
            Neurons,
            B,
        ],
    }
}

/// Criterion specs of a policy with unit weights.
pub fn criteria_of(policy: PolicyId) -> Vec<CriterionSpec> {
    CriterionWeights::default().specs(policy)
}

/// Per-criterion TOPSIS weights keyed by criterion name (`train`, `validation`, `holdout`,
/// `test`, `neurons`, `epochs`). Missing names weigh 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CriterionWeights(pub BTreeMap<String, f64>);

impl CriterionWeights {
    pub fn weight(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(1.0)
    }

    pub fn specs(&self, policy: PolicyId) -> Vec<CriterionSpec> {
        criteria_set(policy)
            .into_iter()
            .map(|c| CriterionSpec::new(c.name(), c.direction(), self.weight(c.name())))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tiebreak {
    Neurons,
    Activation,
    Repetition,
    RecordKey,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub policy: PolicyId,
    pub aggregation: AggregationId,
    pub dataset_id: String,
    pub run_id: u32,
    pub selected: CandidateRecord,
    /// The scalar the policy ranks by: closeness for TOPSIS policies, the accuracy otherwise.
    pub score: f64,
    pub closeness: Option<f64>,
    /// Average competition rank of the chosen architecture (Local/Global).
    pub mean_rank: Option<f64>,
    pub tiebreak_trace: Vec<Tiebreak>,
    /// Size of the Pareto non-dominated set of the run (TOPSIS policies).
    pub pareto_retained: Option<usize>,
    pub pool_size: usize,
}

/// Per-run scores of one policy, over records in canonical order.
struct RunScores<'a> {
    records: Vec<&'a CandidateRecord>,
    scores: Vec<f64>,
    retained: Option<Vec<usize>>,
}

impl RunScores<'_> {
    /// Competition ranks: 1 is best, ties share the smallest rank.
    fn ranks(&self) -> Vec<usize> {
        let mut sorted = self.scores.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        self.scores
            .iter()
            .map(|s| 1 + sorted.partition_point(|x| x > s))
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Selector {
    pub weights: CriterionWeights,
}

impl Selector {
    pub fn new(weights: CriterionWeights) -> Self {
        Selector { weights }
    }

    fn score_run<'a>(&self, policy: PolicyId, records: &[&'a CandidateRecord]) -> Result<RunScores<'a>> {
        if records.is_empty() {
            return Err(Error::InvalidArgument("cannot select from an empty pool".into()));
        }
        let mut records = records.to_vec();
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let criteria = criteria_set(policy);

        if !policy.is_topsis() {
            let c = criteria[0];
            let scores = records.iter().map(|r| c.value(r)).collect();
            return Ok(RunScores {
                records,
                scores,
                retained: None,
            });
        }

        let rows = records
            .iter()
            .map(|r| criteria.iter().map(|c| c.value(r)).collect())
            .collect();
        let ids = records.iter().map(|r| r.key().to_string()).collect();
        let matrix = DecisionMatrix::new(ids, rows, self.weights.specs(policy))?;
        let topsis = topsis_rank(&matrix);
        let retained = pareto_filter(&matrix);
        Ok(RunScores {
            records,
            scores: topsis.closeness,
            retained: Some(retained),
        })
    }

    pub fn individual(&self, policy: PolicyId, records: &[&CandidateRecord]) -> Result<SelectionResult> {
        let run = self.score_run(policy, records)?;
        let candidates: Vec<usize> = match &run.retained {
            Some(r) => r.clone(),
            None => (0..run.records.len()).collect(),
        };
        let best_score = candidates
            .iter()
            .map(|&i| run.scores[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = candidates
            .into_iter()
            .filter(|&i| run.scores[i] == best_score)
            .collect();
        let (pick, trace) = break_ties(&run.records, tied);
        Ok(self.result(policy, AggregationId::Individual, &run, pick, None, trace))
    }

    pub fn local(&self, policy: PolicyId, records: &[&CandidateRecord]) -> Result<SelectionResult> {
        let run = self.score_run(policy, records)?;
        let ranks = run.ranks();
        let mut per_arch: BTreeMap<Architecture, (f64, usize)> = BTreeMap::new();
        for (r, &rank) in run.records.iter().zip(&ranks) {
            let e = per_arch.entry(r.architecture).or_default();
            e.0 += rank as f64;
            e.1 += 1;
        }
        let (arch, mean_rank, mut trace) = best_architecture(&per_arch);
        let members: Vec<usize> = (0..run.records.len())
            .filter(|&i| run.records[i].architecture == arch)
            .collect();
        let (pick, member_trace) = best_member(&run.records, &ranks, &members);
        trace.extend(member_trace);
        Ok(self.result(policy, AggregationId::Local, &run, pick, Some(mean_rank), trace))
    }

    /// One result per run of a single dataset. Runs are identified by `run_id`.
    pub fn global(&self, policy: PolicyId, records: &[&CandidateRecord]) -> Result<Vec<SelectionResult>> {
        if records.is_empty() {
            return Err(Error::InvalidArgument("cannot select from an empty pool".into()));
        }
        let mut by_run: BTreeMap<u32, Vec<&CandidateRecord>> = BTreeMap::new();
        for r in records {
            by_run.entry(r.run_id).or_default().push(r);
        }
        let mut runs = Vec::with_capacity(by_run.len());
        let mut per_arch: BTreeMap<Architecture, (f64, usize)> = BTreeMap::new();
        for recs in by_run.values() {
            let run = self.score_run(policy, recs)?;
            let ranks = run.ranks();
            for (r, &rank) in run.records.iter().zip(&ranks) {
                let e = per_arch.entry(r.architecture).or_default();
                e.0 += rank as f64;
                e.1 += 1;
            }
            runs.push((run, ranks));
        }
        let (arch, mean_rank, trace) = best_architecture(&per_arch);

        runs.iter()
            .map(|(run, ranks)| {
                let members: Vec<usize> = (0..run.records.len())
                    .filter(|&i| run.records[i].architecture == arch)
                    .collect();
                if members.is_empty() {
                    let first = run.records[0];
                    return Err(Error::MissingArchitecture {
                        dataset_id: first.dataset_id.clone(),
                        run_id: first.run_id,
                        architecture: arch.to_string(),
                    });
                }
                let (pick, member_trace) = best_member(&run.records, ranks, &members);
                let mut t = trace.clone();
                t.extend(member_trace);
                Ok(self.result(policy, AggregationId::Global, run, pick, Some(mean_rank), t))
            })
            .collect()
    }

    fn result(
        &self,
        policy: PolicyId,
        aggregation: AggregationId,
        run: &RunScores<'_>,
        pick: usize,
        mean_rank: Option<f64>,
        tiebreak_trace: Vec<Tiebreak>,
    ) -> SelectionResult {
        let selected = run.records[pick].clone();
        SelectionResult {
            policy,
            aggregation,
            dataset_id: selected.dataset_id.clone(),
            run_id: selected.run_id,
            score: run.scores[pick],
            closeness: policy.is_topsis().then_some(run.scores[pick]),
            mean_rank,
            tiebreak_trace,
            pareto_retained: run.retained.as_ref().map(Vec::len),
            pool_size: run.records.len(),
            selected,
        }
    }

    /// Every `(policy, aggregation)` over every dataset and run of `records`. Results come back
    /// ordered by aggregation, policy, dataset and run regardless of evaluation order.
    pub fn select_all(
        &self,
        records: &[CandidateRecord],
        policies: &[PolicyId],
        aggregations: &[AggregationId],
    ) -> Result<Vec<SelectionResult>> {
        let mut by_dataset: BTreeMap<&str, Vec<&CandidateRecord>> = BTreeMap::new();
        for r in records {
            by_dataset.entry(r.dataset_id.as_str()).or_default().push(r);
        }
        let mut units = Vec::new();
        for &agg in aggregations {
            for &policy in policies {
                for recs in by_dataset.values() {
                    units.push((agg, policy, recs));
                }
            }
        }
        let nested: Vec<Result<Vec<SelectionResult>>> = units
            .par_iter()
            .map(|&(agg, policy, recs)| match agg {
                AggregationId::Global => self.global(policy, recs),
                _ => {
                    let mut by_run: BTreeMap<u32, Vec<&CandidateRecord>> = BTreeMap::new();
                    for r in recs.iter() {
                        by_run.entry(r.run_id).or_default().push(r);
                    }
                    by_run
                        .values()
                        .map(|run| match agg {
                            AggregationId::Individual => self.individual(policy, run),
                            _ => self.local(policy, run),
                        })
                        .collect()
                }
            })
            .collect();
        let mut out = Vec::new();
        for n in nested {
            out.extend(n?);
        }
        out.sort_by(|a, b| {
            (a.aggregation, a.policy, &a.dataset_id, a.run_id)
                .cmp(&(b.aggregation, b.policy, &b.dataset_id, b.run_id))
        });
        Ok(out)
    }
}

/// Chain: fewer neurons, activation order, repetition index, full record key.
fn break_ties(records: &[&CandidateRecord], mut tied: Vec<usize>) -> (usize, Vec<Tiebreak>) {
    let mut trace = Vec::new();
    type Key = fn(&CandidateRecord) -> u64;
    let steps: [(Tiebreak, Key); 3] = [
        (Tiebreak::Neurons, |r| u64::from(r.architecture.neurons)),
        (Tiebreak::Activation, |r| r.architecture.activation as u64),
        (Tiebreak::Repetition, |r| u64::from(r.repetition)),
    ];
    for (tb, key) in steps {
        if tied.len() <= 1 {
            break;
        }
        trace.push(tb);
        let best = tied.iter().map(|&i| key(records[i])).min().unwrap_or(0);
        tied.retain(|&i| key(records[i]) == best);
    }
    if tied.len() > 1 {
        trace.push(Tiebreak::RecordKey);
        tied.sort_by(|&a, &b| records[a].key().cmp(&records[b].key()));
    }
    (tied[0], trace)
}

/// Lowest mean rank; ties go to fewer neurons, then activation order.
fn best_architecture(per_arch: &BTreeMap<Architecture, (f64, usize)>) -> (Architecture, f64, Vec<Tiebreak>) {
    let means: Vec<(Architecture, f64)> = per_arch
        .iter()
        .map(|(a, (sum, n))| (*a, sum / *n as f64))
        .collect();
    let best = means.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min);
    let tied: Vec<Architecture> = means
        .iter()
        .filter(|(_, m)| *m == best)
        .map(|(a, _)| *a)
        .collect();
    let mut trace = Vec::new();
    let mut tied = tied;
    if tied.len() > 1 {
        trace.push(Tiebreak::Neurons);
        let n = tied.iter().map(|a| a.neurons).min().unwrap_or(0);
        tied.retain(|a| a.neurons == n);
    }
    if tied.len() > 1 {
        trace.push(Tiebreak::Activation);
        tied.sort();
    }
    (tied[0], best, trace)
}

/// Best individual rank within an architecture; ties go to the lower repetition index.
fn best_member(records: &[&CandidateRecord], ranks: &[usize], members: &[usize]) -> (usize, Vec<Tiebreak>) {
    let best = members.iter().map(|&i| ranks[i]).min().unwrap_or(usize::MAX);
    let tied: Vec<usize> = members.iter().copied().filter(|&i| ranks[i] == best).collect();
    break_ties(records, tied)
}

pub fn select_individual(policy: PolicyId, records: &[&CandidateRecord]) -> Result<SelectionResult> {
    Selector::default().individual(policy, records)
}

pub fn select_local(policy: PolicyId, records: &[&CandidateRecord]) -> Result<SelectionResult> {
    Selector::default().local(policy, records)
}

pub fn select_global(policy: PolicyId, records: &[&CandidateRecord]) -> Result<Vec<SelectionResult>> {
    Selector::default().global(policy, records)
}

// ---------------------------------------------------------------------------------------------
// selections CSV

/// One row of the selections CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub policy: PolicyId,
    pub aggregation: AggregationId,
    pub dataset_id: String,
    pub run_id: u32,
    pub repetition: u32,
    pub neurons: u32,
    pub activation: crate::record::Activation,
    pub epochs_trained: u32,
    pub acc_train: f64,
    pub acc_validation: f64,
    pub acc_holdout: f64,
    pub acc_test: f64,
    pub closeness: Option<f64>,
}

impl SelectionRow {
    pub fn metrics(&self) -> SetMetrics {
        SetMetrics::new(self.acc_train, self.acc_validation, self.acc_holdout, self.acc_test)
    }
}

impl From<&SelectionResult> for SelectionRow {
    fn from(s: &SelectionResult) -> Self {
        let r = &s.selected;
        SelectionRow {
            policy: s.policy,
            aggregation: s.aggregation,
            dataset_id: s.dataset_id.clone(),
            run_id: s.run_id,
            repetition: r.repetition,
            neurons: r.architecture.neurons,
            activation: r.architecture.activation,
            epochs_trained: r.epochs_trained,
            acc_train: r.metrics.train,
            acc_validation: r.metrics.validation,
            acc_holdout: r.metrics.holdout,
            acc_test: r.metrics.test,
            closeness: s.closeness,
        }
    }
}

pub fn write_selections_csv<W: Write>(rows: &[SelectionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record([
            "policy",
            "aggregation",
            "dataset_id",
            "run_id",
            "repetition",
            "neurons",
            "activation",
            "epochs_trained",
            "acc_train",
            "acc_validation",
            "acc_holdout",
            "acc_test",
            "closeness",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_selections_csv<R: Read>(input: R) -> Result<Vec<SelectionRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Activation, CandidateRecord};
    use proptest::prelude::*;

    fn rec(rep: u32, neurons: u32, act: Activation, m: [f64; 4], epochs: u32) -> CandidateRecord {
        CandidateRecord {
            dataset_id: "d".into(),
            run_id: 0,
            repetition: rep,
            architecture: Architecture::new(neurons, act),
            epochs_trained: epochs,
            max_epochs: 100,
            metrics: SetMetrics::new(m[0], m[1], m[2], m[3]),
            seed: 0,
        }
    }

    fn refs(v: &[CandidateRecord]) -> Vec<&CandidateRecord> {
        v.iter().collect()
    }

    #[test]
    fn names_round_trip_and_unknown_lists_valid() {
        for p in PolicyId::ALL {
            assert_eq!(p.name().parse::<PolicyId>().unwrap(), p);
        }
        let err = "TTX".parse::<PolicyId>().unwrap_err().to_string();
        assert!(err.contains("TTVHN") && err.contains("Holdout"));
    }

    #[test]
    fn criteria_decomposition() {
        let names = |p| {
            criteria_of(p)
                .into_iter()
                .map(|c| (c.name, c.direction))
                .collect::<Vec<_>>()
        };
        use Direction::*;
        assert_eq!(
            names(PolicyId::Ttvhn),
            vec![
                ("train".into(), Maximize),
                ("validation".into(), Maximize),
                ("holdout".into(), Maximize),
                ("neurons".into(), Minimize)
            ]
        );
        assert_eq!(names(PolicyId::Holdout), vec![("holdout".into(), Maximize)]);
        assert_eq!(
            names(PolicyId::Ttvhtnb),
            vec![
                ("train".into(), Maximize),
                ("validation".into(), Maximize),
                ("holdout".into(), Maximize),
                ("test".into(), Maximize),
                ("neurons".into(), Minimize),
                ("epochs".into(), Minimize)
            ]
        );
        assert_eq!(names(PolicyId::Thtne).last().unwrap().1, Maximize);
        for p in PolicyId::ALL {
            assert_eq!(criteria_of(p).len() == 1, !p.is_topsis());
        }
    }

    #[test]
    fn unanimous_optimum_selected_by_every_policy() {
        let pool = vec![
            rec(0, 2, Activation::Relu, [0.95, 0.95, 0.95, 0.95], 50),
            rec(0, 5, Activation::Relu, [0.90, 0.90, 0.90, 0.90], 20),
            rec(1, 8, Activation::Tanh, [0.80, 0.85, 0.70, 0.75], 30),
        ];
        // epochs criteria pull in opposite directions, so drop E/B policies here
        for p in PolicyId::ALL {
            if criteria_set(p).iter().any(|c| matches!(c, Criterion::Epochs(_))) {
                continue;
            }
            let s = select_individual(p, &refs(&pool)).unwrap();
            assert_eq!(s.selected, pool[0], "{p}");
        }
    }

    #[test]
    fn holdout_tie_goes_to_fewer_neurons() {
        let pool = vec![
            rec(0, 5, Activation::Relu, [0.9, 0.9, 0.8, 0.8], 10),
            rec(0, 3, Activation::Relu, [0.7, 0.7, 0.8, 0.8], 10),
        ];
        let s = select_individual(PolicyId::Holdout, &refs(&pool)).unwrap();
        assert_eq!(s.selected.architecture.neurons, 3);
        assert_eq!(s.tiebreak_trace, vec![Tiebreak::Neurons]);
    }

    #[test]
    fn full_tiebreak_chain() {
        let m = [0.5; 4];
        let pool = vec![
            rec(1, 3, Activation::Tanh, m, 1),
            rec(2, 3, Activation::Relu, m, 1),
            rec(1, 3, Activation::Relu, m, 1),
        ];
        let s = select_individual(PolicyId::Test, &refs(&pool)).unwrap();
        assert_eq!(s.selected, pool[2]);
        assert_eq!(
            s.tiebreak_trace,
            vec![Tiebreak::Neurons, Tiebreak::Activation, Tiebreak::Repetition]
        );
    }

    #[test]
    fn topsis_pick_is_pareto_member() {
        let pool = vec![
            rec(0, 10, Activation::Relu, [0.99, 0.94, 0.92, 0.85], 40),
            rec(0, 2, Activation::Relu, [0.86, 0.85, 0.85, 0.85], 40),
            rec(0, 4, Activation::Relu, [0.80, 0.80, 0.80, 0.80], 40),
        ];
        let s = select_individual(PolicyId::Ttvhn, &refs(&pool)).unwrap();
        assert_eq!(s.pareto_retained, Some(2));
        assert_ne!(s.selected, pool[2]);
        assert!(s.closeness.is_some());
    }

    #[test]
    fn local_uniform_dominance() {
        let mut pool = Vec::new();
        for rep in 0..8 {
            pool.push(rec(rep, 4, Activation::Tanh, [0.9 + rep as f64 * 0.001; 4], 10));
            pool.push(rec(rep, 2, Activation::Relu, [0.5 + rep as f64 * 0.001; 4], 10));
            pool.push(rec(rep, 7, Activation::Gelu, [0.6; 4], 10));
        }
        let s = select_local(PolicyId::Validation, &refs(&pool)).unwrap();
        assert_eq!(s.selected.architecture, Architecture::new(4, Activation::Tanh));
        assert_eq!(s.selected.repetition, 7);
        assert_eq!(s.mean_rank, Some(4.5));
    }

    #[test]
    fn local_compares_one_value_per_architecture() {
        // 700 architectures x 8 repetitions
        let mut pool = Vec::new();
        for n in 1..=100u32 {
            for act in Activation::ALL {
                for rep in 0..8 {
                    let v = ((n * 7 + act as u32 * 13 + rep * 31) % 97) as f64 / 100.0;
                    pool.push(rec(rep, n, act, [v; 4], 5));
                }
            }
        }
        assert_eq!(pool.len(), 5600);
        let run = Selector::default().score_run(PolicyId::Holdout, &refs(&pool)).unwrap();
        let ranks = run.ranks();
        let mut per_arch: BTreeMap<Architecture, (f64, usize)> = BTreeMap::new();
        for (r, &rank) in run.records.iter().zip(&ranks) {
            let e = per_arch.entry(r.architecture).or_default();
            e.0 += rank as f64;
            e.1 += 1;
        }
        assert_eq!(per_arch.len(), 700);
        assert!(per_arch.values().all(|&(_, n)| n == 8));
        select_local(PolicyId::Holdout, &refs(&pool)).unwrap();
    }

    #[test]
    fn local_equal_average_rank_prefers_fewer_neurons() {
        let pool = vec![
            rec(0, 6, Activation::Relu, [0.9; 4], 10),
            rec(1, 6, Activation::Relu, [0.7; 4], 10),
            rec(0, 3, Activation::Relu, [0.7; 4], 10),
            rec(1, 3, Activation::Relu, [0.9; 4], 10),
        ];
        let s = select_local(PolicyId::Holdout, &refs(&pool)).unwrap();
        assert_eq!(s.selected.architecture.neurons, 3);
        assert_eq!(s.selected.repetition, 1);
        assert_eq!(s.tiebreak_trace, vec![Tiebreak::Neurons]);
    }

    #[test]
    fn competition_ranks() {
        let pool = vec![
            rec(0, 1, Activation::Relu, [0.9; 4], 1),
            rec(0, 2, Activation::Relu, [0.8; 4], 1),
            rec(0, 3, Activation::Relu, [0.9; 4], 1),
            rec(0, 4, Activation::Relu, [0.7; 4], 1),
        ];
        let run = Selector::default().score_run(PolicyId::Test, &refs(&pool)).unwrap();
        assert_eq!(run.ranks(), vec![1, 3, 1, 4]);
    }

    fn multi_run_pool(runs: u32) -> Vec<CandidateRecord> {
        let mut pool = Vec::new();
        for run in 0..runs {
            for rep in 0..3 {
                for (n, base) in [(2u32, 0.6), (5, 0.9), (9, 0.7)] {
                    let mut r = rec(rep, n, Activation::Relu, [base + 0.01 * rep as f64; 4], 10);
                    r.run_id = run;
                    r.metrics.test = base - 0.01 * ((run + rep) % 3) as f64;
                    pool.push(r);
                }
            }
        }
        pool
    }

    #[test]
    fn global_fixes_architecture_across_runs() {
        let pool = multi_run_pool(18);
        let results = select_global(PolicyId::Holdout, &refs(&pool)).unwrap();
        assert_eq!(results.len(), 18);
        for (run, s) in results.iter().enumerate() {
            assert_eq!(s.run_id, run as u32);
            assert_eq!(s.selected.architecture.neurons, 5);
            assert_eq!(s.selected.repetition, 2);
        }
    }

    #[test]
    fn global_on_single_run_matches_local_architecture() {
        let pool = multi_run_pool(1);
        for p in [PolicyId::Holdout, PolicyId::Test, PolicyId::Ttvhn] {
            let g = select_global(p, &refs(&pool)).unwrap();
            let l = select_local(p, &refs(&pool)).unwrap();
            assert_eq!(g.len(), 1);
            assert_eq!(g[0].selected, l.selected);
        }
    }

    #[test]
    fn global_reports_run_missing_architecture() {
        let mut pool = multi_run_pool(3);
        pool.retain(|r| !(r.run_id == 2 && r.architecture.neurons == 5));
        match select_global(PolicyId::Holdout, &refs(&pool)) {
            Err(Error::MissingArchitecture { run_id, .. }) => assert_eq!(run_id, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn selections_csv_round_trip() {
        let pool = multi_run_pool(2);
        let results = Selector::default()
            .select_all(&pool, &[PolicyId::Holdout, PolicyId::Ttvh], &AggregationId::ALL)
            .unwrap();
        assert_eq!(results.len(), 2 * 3 * 2);
        let rows: Vec<SelectionRow> = results.iter().map(SelectionRow::from).collect();
        let mut buf = Vec::new();
        write_selections_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("policy,aggregation,dataset_id,run_id,repetition,neurons,activation,epochs_trained,acc_train,acc_validation,acc_holdout,acc_test,closeness"));
        assert_eq!(read_selections_csv(buf.as_slice()).unwrap(), rows);
    }

    fn arb_pool() -> impl Strategy<Value = Vec<CandidateRecord>> {
        prop::collection::vec(
            (1u32..6, 0usize..3, prop::array::uniform4(0u8..6), 0u32..30),
            2..25,
        )
        .prop_map(|items| {
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::new();
            for (n, act, acc, epochs) in items {
                let act = [Activation::Relu, Activation::Tanh, Activation::Sigmoid][act];
                for rep in 0..4 {
                    if seen.insert((n, act, rep)) {
                        let m = acc.map(|a| f64::from(a) / 5.0);
                        out.push(rec(rep, n, act, m, epochs));
                        break;
                    }
                }
            }
            out
        })
    }

    proptest! {
        #[test]
        fn topsis_picks_are_non_dominated(pool in arb_pool(), pi in 4usize..16) {
            let policy = PolicyId::ALL[pi];
            let s = select_individual(policy, &refs(&pool)).unwrap();
            let crit = criteria_set(policy);
            for other in &pool {
                let mut ge = true;
                let mut gt = false;
                for c in &crit {
                    let (a, b) = match c.direction() {
                        Direction::Maximize => (c.value(other), c.value(&s.selected)),
                        Direction::Minimize => (-c.value(other), -c.value(&s.selected)),
                    };
                    ge &= a >= b;
                    gt |= a > b;
                }
                prop_assert!(!(ge && gt), "{} dominated", policy);
            }
        }

        #[test]
        fn single_set_argmax(pool in arb_pool(), pi in 0usize..4) {
            let policy = PolicyId::ALL[pi];
            let c = criteria_set(policy)[0];
            let s = select_individual(policy, &refs(&pool)).unwrap();
            prop_assert!(pool.iter().all(|r| c.value(r) <= c.value(&s.selected)));
        }

        #[test]
        fn permutation_invariance(pool in arb_pool(), pi in 0usize..16, rot in 0usize..25) {
            let policy = PolicyId::ALL[pi];
            let mut permuted = pool.clone();
            let len = permuted.len();
            permuted.rotate_left(rot % len);
            permuted.reverse();
            prop_assert_eq!(
                select_individual(policy, &refs(&pool)).unwrap(),
                select_individual(policy, &refs(&permuted)).unwrap()
            );
            prop_assert_eq!(
                select_local(policy, &refs(&pool)).unwrap(),
                select_local(policy, &refs(&permuted)).unwrap()
            );
        }

        #[test]
        fn adding_fully_dominated_candidate_keeps_the_front(pool in arb_pool(), pi in 4usize..16) {
            let policy = PolicyId::ALL[pi];
            let before = select_individual(policy, &refs(&pool)).unwrap();
            // worse than everything on every criterion of every policy... except the epoch
            // criteria, which point both ways; set epochs to the pool's worst for this policy
            let crit = criteria_set(policy);
            let epochs = match crit.iter().find_map(|c| match c {
                Criterion::Epochs(d) => Some(*d),
                _ => None,
            }) {
                Some(Direction::Maximize) => 0,
                Some(Direction::Minimize) => 1000,
                None => 0,
            };
            let mut worse = rec(0, 50, Activation::Identity, [0.0; 4], epochs);
            worse.max_epochs = 1000;
            let mut grown = pool.clone();
            grown.push(worse);
            let after = select_individual(policy, &refs(&grown)).unwrap();
            // closeness is computed over the whole pool, so the newcomer can shift norms and the
            // negative ideal and reorder the front; the front itself must not move
            prop_assert_eq!(before.pareto_retained, after.pareto_retained);
            prop_assert_ne!(after.selected.architecture.neurons, 50);
        }
    }
}
