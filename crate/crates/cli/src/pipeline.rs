//! The stages behind each subcommand. Every stage reads its inputs from the output directory
//! (or the config), computes in memory, and writes its files in one go. Parallel work is merged
//! in key order, so the thread count never changes a byte of output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use mcsel::mcdm::{pareto_filter, CriterionSpec, DecisionMatrix};
use mcsel::policies::{
    read_selections_csv, write_selections_csv, AggregationId, PolicyId, SelectionResult, SelectionRow,
    Selector,
};
use mcsel::record::{read_records_csv, validate_pool, write_records_csv, CandidateRecord};
use mcsel::seed::derive_seed;
use mcsel::splitplan::{class_counts, imbalance, SplitPlan};
use mcsel::stats::{comparison_matrix, disagreement, mean_std, ComparisonMatrix, PolicySeries, Target};
use mcsel::synth::{generate_dataset, make_noisy_task, simulate, write_pool_csv, SimulationReport};
use mcsel::trainer::{generate_pool, write_traces_jsonl, Dataset, PoolOutcome, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::config::{DatasetSpec, ExperimentConfig};
use crate::error::CliError;

// ---------------------------------------------------------------------------------------------
// output layout

pub const POOL_FILE: &str = "pool.csv";
pub const TRACES_FILE: &str = "traces.jsonl";
pub const FAILURES_FILE: &str = "train_failures.csv";
pub const IMBALANCE_FILE: &str = "imbalance.csv";
pub const SELECTIONS_FILE: &str = "selections.csv";
pub const AUDIT_FILE: &str = "audit.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_TEXT_FILE: &str = "summary.txt";
pub const REGRET_FILE: &str = "regret.json";
pub const REGRET_TABLE_FILE: &str = "regret.csv";
pub const SYNTHETIC_POOL_FILE: &str = "synthetic_pool.csv";

pub fn plan_path(out: &Path, dataset_id: &str) -> PathBuf {
    out.join("plans").join(format!("{dataset_id}.json"))
}

pub fn matrix_stem(target: Target) -> String {
    format!("wilcoxon_{}", target.name())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn data_err(path: &Path) -> impl Fn(mcsel::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

/// Runs `f` on a dedicated pool of `jobs` threads.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}

// ---------------------------------------------------------------------------------------------
// datasets and plans

pub fn load_dataset(cfg: &ExperimentConfig, spec: &DatasetSpec) -> Result<Dataset, CliError> {
    match (&spec.path, &spec.synth) {
        (Some(path), _) => {
            let bytes = read_file(path)?;
            Dataset::read_csv(bytes.as_slice()).map_err(data_err(path))
        }
        (None, Some(s)) => {
            let seed = derive_seed(cfg.seed, &format!("dataset/{}", spec.id), &[]);
            Ok(generate_dataset(&s.teacher, s.n, s.label_noise, seed)?)
        }
        (None, None) => Err(CliError::Config(format!("dataset {} has no source", spec.id))),
    }
}

pub fn build_plan(cfg: &ExperimentConfig, spec: &DatasetSpec, data: &Dataset) -> Result<SplitPlan, CliError> {
    let seed = derive_seed(cfg.seed, &format!("split/{}", spec.id), &[]);
    SplitPlan::build(&data.labels, cfg.split.k, cfg.split.repeats, seed)
        .map_err(|e| CliError::Data(format!("dataset {}: {e}", spec.id)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceRow {
    pub dataset_id: String,
    pub n_samples: usize,
    pub n_classes: usize,
    pub imbalance: f64,
}

/// Writes one plan per dataset and the imbalance table; returns the table.
pub fn cmd_split(cfg: &ExperimentConfig) -> Result<Vec<ImbalanceRow>, CliError> {
    cfg.require_datasets()?;
    let mut rows = Vec::new();
    for spec in &cfg.datasets {
        let data = load_dataset(cfg, spec)?;
        let plan = build_plan(cfg, spec, &data)?;
        write_file(&plan_path(&cfg.out, &spec.id), plan.to_json()?.as_bytes())?;
        if spec.synth.is_some() {
            let mut buf = Vec::new();
            data.write_csv(&mut buf)?;
            write_file(&cfg.out.join("datasets").join(format!("{}.csv", spec.id)), &buf)?;
        }
        let counts = class_counts(&data.labels);
        let row = ImbalanceRow {
            dataset_id: spec.id.clone(),
            n_samples: data.len(),
            n_classes: counts.len(),
            imbalance: imbalance(&counts)?,
        };
        info!(
            "{}: {} samples, {} classes, imbalance {:.4}, {} runs",
            row.dataset_id,
            row.n_samples,
            row.n_classes,
            row.imbalance,
            plan.runs.len()
        );
        rows.push(row);
    }
    write_file(&cfg.out.join(IMBALANCE_FILE), &to_csv(&rows)?)?;
    Ok(rows)
}

pub fn read_plan(cfg: &ExperimentConfig, dataset_id: &str) -> Result<SplitPlan, CliError> {
    let path = plan_path(&cfg.out, dataset_id);
    let text = String::from_utf8(read_file(&path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    SplitPlan::from_json(&text).map_err(data_err(&path))
}

// ---------------------------------------------------------------------------------------------
// training

pub fn train_config(cfg: &ExperimentConfig) -> TrainConfig {
    TrainConfig {
        seed: derive_seed(cfg.seed, "train", &[]),
        ..cfg.train.clone()
    }
}

pub fn train_dataset(
    cfg: &ExperimentConfig,
    spec: &DatasetSpec,
    data: &Dataset,
    plan: &SplitPlan,
) -> Result<PoolOutcome, CliError> {
    let out = generate_pool(data, &spec.id, plan, &cfg.grid.grid(), &train_config(cfg))
        .map_err(|e| CliError::Data(format!("dataset {}: {e}", spec.id)))?;
    for (key, reason) in &out.failures {
        warn!("training {key} failed: {reason}");
    }
    let flagged = out.traces.iter().filter(|t| t.flags.single_class_train).count();
    if flagged > 0 {
        warn!("{}: {flagged} candidates trained on a single-class partition", spec.id);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub dataset_id: String,
    pub run_id: u32,
    pub repetition: u32,
    pub architecture: String,
    pub reason: String,
}

/// Trains every dataset against its stored plan; writes the pool, traces and failures.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    cfg.require_datasets()?;
    let mut records = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for spec in &cfg.datasets {
        let data = load_dataset(cfg, spec)?;
        let plan = read_plan(cfg, &spec.id)?;
        let out = with_jobs(cfg.jobs, || train_dataset(cfg, spec, &data, &plan))??;
        info!("{}: trained {} candidates", spec.id, out.pool.records.len());
        records.extend(out.pool.records);
        traces.extend(out.traces);
        failures.extend(out.failures.into_iter().map(|(k, reason)| FailureRow {
            dataset_id: k.dataset_id,
            run_id: k.run_id,
            repetition: k.repetition,
            architecture: k.architecture.to_string(),
            reason,
        }));
    }
    let mut pool = mcsel::CandidatePool::new(records, mcsel::Provenance::Trained);
    pool.sort();
    for v in validate_pool(&pool) {
        warn!("pool check: {v}");
    }
    let mut buf = Vec::new();
    write_records_csv(&pool.records, &mut buf)?;
    write_file(&cfg.out.join(POOL_FILE), &buf)?;
    let mut buf = Vec::new();
    write_traces_jsonl(&traces, &mut buf)?;
    write_file(&cfg.out.join(TRACES_FILE), &buf)?;
    write_file(&cfg.out.join(FAILURES_FILE), &to_csv(&failures)?)?;
    Ok(pool.records.len())
}

// ---------------------------------------------------------------------------------------------
// selection

pub fn read_pool(path: &Path) -> Result<Vec<CandidateRecord>, CliError> {
    let bytes = read_file(path)?;
    read_records_csv(bytes.as_slice()).map_err(data_err(path))
}

pub fn select_records(cfg: &ExperimentConfig, records: &[CandidateRecord]) -> Result<Vec<SelectionResult>, CliError> {
    let selector = Selector::new(cfg.select.criterion_weights());
    Ok(selector.select_all(records, &cfg.select.policies, &cfg.select.aggregations)?)
}

/// Selects from `pool.csv` (or `pool`); writes selections and the decision audit.
pub fn cmd_select(cfg: &ExperimentConfig, pool: Option<&Path>) -> Result<Vec<SelectionRow>, CliError> {
    let path = pool.map(Path::to_path_buf).unwrap_or_else(|| cfg.out.join(POOL_FILE));
    let records = read_pool(&path)?;
    let problems = validate_pool(&mcsel::CandidatePool::new(records.clone(), mcsel::Provenance::Ingested));
    if !problems.is_empty() {
        let text: Vec<String> = problems.iter().take(10).map(|v| v.to_string()).collect();
        return Err(CliError::Data(format!(
            "{} fails validation ({} problems): {}",
            path.display(),
            problems.len(),
            text.join("; ")
        )));
    }
    let results = with_jobs(cfg.jobs, || select_records(cfg, &records))??;
    let rows: Vec<SelectionRow> = results.iter().map(SelectionRow::from).collect();
    let mut buf = Vec::new();
    write_selections_csv(&rows, &mut buf)?;
    write_file(&cfg.out.join(SELECTIONS_FILE), &buf)?;
    let audit = serde_json::to_vec_pretty(&results).map_err(|e| CliError::Data(e.to_string()))?;
    write_file(&cfg.out.join(AUDIT_FILE), &audit)?;
    info!("{} selections", rows.len());
    Ok(rows)
}

// ---------------------------------------------------------------------------------------------
// comparison

/// Label of a row in summaries and matrices.
pub fn row_label(aggregation: AggregationId, policy: PolicyId) -> String {
    format!("{aggregation}/{policy}")
}

fn grouped(cfg: &ExperimentConfig, rows: &[SelectionRow]) -> BTreeMap<(AggregationId, PolicyId), Vec<SelectionRow>> {
    let mut out: BTreeMap<(AggregationId, PolicyId), Vec<SelectionRow>> = BTreeMap::new();
    for r in rows {
        if cfg.select.policies.contains(&r.policy) && cfg.select.aggregations.contains(&r.aggregation) {
            out.entry((r.aggregation, r.policy)).or_default().push(r.clone());
        }
    }
    out
}

pub fn policy_series(cfg: &ExperimentConfig, rows: &[SelectionRow], target: Target) -> Vec<PolicySeries> {
    grouped(cfg, rows)
        .into_iter()
        .map(|((agg, policy), rs)| PolicySeries {
            label: row_label(agg, policy),
            values: rs
                .iter()
                .map(|r| ((r.dataset_id.clone(), r.run_id), target.value(&r.metrics())))
                .collect(),
        })
        .collect()
}

/// Mean and standard deviation of each reported column for one row label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub n: usize,
    pub neurons_mean: f64,
    pub neurons_std: f64,
    pub epochs_mean: f64,
    pub epochs_std: f64,
    pub train_mean: f64,
    pub train_std: f64,
    pub validation_mean: f64,
    pub validation_std: f64,
    pub holdout_mean: f64,
    pub holdout_std: f64,
    pub test_mean: f64,
    pub test_std: f64,
    pub train_validation_mean: f64,
    pub train_validation_std: f64,
    pub holdout_test_mean: f64,
    pub holdout_test_std: f64,
    pub all_mean: f64,
    pub all_std: f64,
}

pub fn summarize(cfg: &ExperimentConfig, rows: &[SelectionRow]) -> Vec<SummaryRow> {
    grouped(cfg, rows)
        .into_iter()
        .map(|((agg, policy), rs)| {
            let col = |f: &dyn Fn(&SelectionRow) -> f64| mean_std(&rs.iter().map(f).collect::<Vec<_>>());
            let (neurons_mean, neurons_std) = col(&|r| f64::from(r.neurons));
            let (epochs_mean, epochs_std) = col(&|r| f64::from(r.epochs_trained));
            let (train_mean, train_std) = col(&|r| r.acc_train);
            let (validation_mean, validation_std) = col(&|r| r.acc_validation);
            let (holdout_mean, holdout_std) = col(&|r| r.acc_holdout);
            let (test_mean, test_std) = col(&|r| r.acc_test);
            let (train_validation_mean, train_validation_std) = col(&|r| disagreement(&r.metrics()).train_validation);
            let (holdout_test_mean, holdout_test_std) = col(&|r| disagreement(&r.metrics()).holdout_test);
            let (all_mean, all_std) = col(&|r| disagreement(&r.metrics()).all);
            SummaryRow {
                label: row_label(agg, policy),
                n: rs.len(),
                neurons_mean,
                neurons_std,
                epochs_mean,
                epochs_std,
                train_mean,
                train_std,
                validation_mean,
                validation_std,
                holdout_mean,
                holdout_std,
                test_mean,
                test_std,
                train_validation_mean,
                train_validation_std,
                holdout_test_mean,
                holdout_test_std,
                all_mean,
                all_std,
            }
        })
        .collect()
}

pub fn summary_text(rows: &[SummaryRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(6).max(6);
    let heads = ["# Neurons", "# Epochs", "Train", "Validation", "Holdout", "Test", "Train-Val", "Hold-Test", "All"];
    let mut s = format!("{:<width$}", "Policy");
    for h in heads {
        let _ = write!(s, " {h:>17}");
    }
    s.push('\n');
    for r in rows {
        let cells = [
            (r.neurons_mean, r.neurons_std, 2),
            (r.epochs_mean, r.epochs_std, 2),
            (r.train_mean, r.train_std, 4),
            (r.validation_mean, r.validation_std, 4),
            (r.holdout_mean, r.holdout_std, 4),
            (r.test_mean, r.test_std, 4),
            (r.train_validation_mean, r.train_validation_std, 4),
            (r.holdout_test_mean, r.holdout_test_std, 4),
            (r.all_mean, r.all_std, 4),
        ];
        let _ = write!(s, "{:<width$}", r.label);
        for (m, sd, p) in cells {
            let _ = write!(s, " {:>17}", format!("{m:.p$}({sd:.p$})"));
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub summary: Vec<SummaryRow>,
    pub test_accuracy: ComparisonMatrix,
    pub all_disagreement: ComparisonMatrix,
}

pub fn compare_rows(cfg: &ExperimentConfig, rows: &[SelectionRow]) -> Result<Comparison, CliError> {
    let summary = summarize(cfg, rows);
    if summary.is_empty() {
        return Err(CliError::Data("no selections match the configured policies and aggregations".into()));
    }
    let matrix = |t: Target| -> Result<ComparisonMatrix, CliError> {
        Ok(comparison_matrix(&policy_series(cfg, rows, t), t, cfg.compare.alpha, cfg.compare.pairing)?)
    };
    Ok(Comparison {
        summary,
        test_accuracy: matrix(Target::TestAccuracy)?,
        all_disagreement: matrix(Target::AllDisagreement)?,
    })
}

/// Reads selections; writes the mean/std summary and both Wilcoxon matrices.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<Comparison, CliError> {
    let path = cfg.out.join(SELECTIONS_FILE);
    let bytes = read_file(&path)?;
    let rows = read_selections_csv(bytes.as_slice()).map_err(data_err(&path))?;
    let cmp = compare_rows(cfg, &rows)?;
    write_file(&cfg.out.join(SUMMARY_FILE), &to_csv(&cmp.summary)?)?;
    write_file(&cfg.out.join(SUMMARY_TEXT_FILE), summary_text(&cmp.summary).as_bytes())?;
    for m in [&cmp.test_accuracy, &cmp.all_disagreement] {
        let stem = matrix_stem(m.target);
        let mut buf = Vec::new();
        m.write_csv(&mut buf)?;
        write_file(&cfg.out.join(format!("{stem}.csv")), &buf)?;
        let mut buf = Vec::new();
        m.write_cells_csv(&mut buf)?;
        write_file(&cfg.out.join(format!("{stem}_cells.csv")), &buf)?;
        write_file(&cfg.out.join(format!("{stem}.txt")), m.to_string().as_bytes())?;
    }
    Ok(cmp)
}

// ---------------------------------------------------------------------------------------------
// simulation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    pub policy: PolicyId,
    pub trials: usize,
    pub mean_regret: f64,
    pub max_regret: f64,
    pub noise_fitter_picks: usize,
    pub noise_fitter_frequency: f64,
}

/// Runs the configured simulation; writes the JSON report, the per-policy table and the first
/// trial's pool.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<SimulationReport, CliError> {
    let mut spec = cfg
        .simulate
        .clone()
        .ok_or_else(|| CliError::Config("no [simulate] section in the config".into()))?;
    spec.seed = derive_seed(cfg.seed, "simulate", &[spec.seed]);
    let selector = Selector::new(cfg.select.criterion_weights());
    let report = with_jobs(cfg.jobs, || simulate(&spec, &cfg.select.policies, &selector))??;
    let json = report.to_json()?;
    write_file(&cfg.out.join(REGRET_FILE), json.as_bytes())?;
    let table: Vec<RegretRow> = report
        .policies
        .iter()
        .map(|p| RegretRow {
            policy: p.policy,
            trials: p.trials,
            mean_regret: p.mean_regret,
            max_regret: p.max_regret,
            noise_fitter_picks: p.noise_fitter_picks,
            noise_fitter_frequency: p.noise_fitter_frequency,
        })
        .collect();
    write_file(&cfg.out.join(REGRET_TABLE_FILE), &to_csv(&table)?)?;

    // the first trial, rebuilt exactly as simulate drew it
    let task = make_noisy_task(spec.n_per_role, &spec.teacher, spec.noise, derive_seed(spec.seed, "task", &[0]))?;
    let mut pool = match &spec.pool {
        mcsel::synth::PoolSpec::Explicit { candidates } => candidates.clone(),
        mcsel::synth::PoolSpec::Sampled(s) => s.sample(derive_seed(spec.seed, "pool", &[0]))?,
    };
    for (i, c) in pool.iter_mut().enumerate() {
        c.seed = derive_seed(spec.seed, "candidate", &[0, i as u64]);
    }
    let mut buf = Vec::new();
    write_pool_csv(&pool, &task, &mut buf)?;
    write_file(&cfg.out.join(SYNTHETIC_POOL_FILE), &buf)?;
    for p in &table {
        info!(
            "{}: mean regret {:.4}, noise-fitter picks {}/{}",
            p.policy, p.mean_regret, p.noise_fitter_picks, p.trials
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------------------------
// plot data

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub run_id: u32,
    pub repetition: u32,
    pub neurons: u32,
    pub activation: String,
    pub holdout: f64,
    pub test: f64,
    pub on_front: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedPoint {
    pub label: String,
    pub run_id: u32,
    pub holdout: f64,
    pub test: f64,
}

/// Holdout/test points of one dataset's pool and the indices of its Pareto front, the front
/// ordered by ascending holdout then descending test.
pub fn holdout_test_front(records: &[&CandidateRecord]) -> Result<(Vec<ScatterRow>, Vec<usize>), CliError> {
    let rows: Vec<Vec<f64>> = records.iter().map(|r| vec![r.metrics.holdout, r.metrics.test]).collect();
    let m = DecisionMatrix::from_rows(
        rows,
        vec![CriterionSpec::maximize("holdout"), CriterionSpec::maximize("test")],
    )?;
    let mut front = pareto_filter(&m);
    let on: std::collections::BTreeSet<usize> = front.iter().copied().collect();
    front.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a].metrics, &records[b].metrics);
        ra.holdout
            .total_cmp(&rb.holdout)
            .then(rb.test.total_cmp(&ra.test))
            .then(a.cmp(&b))
    });
    let scatter = records
        .iter()
        .enumerate()
        .map(|(i, r)| ScatterRow {
            run_id: r.run_id,
            repetition: r.repetition,
            neurons: r.architecture.neurons,
            activation: r.architecture.activation.to_string(),
            holdout: r.metrics.holdout,
            test: r.metrics.test,
            on_front: on.contains(&i),
        })
        .collect();
    Ok((scatter, front))
}

/// Per dataset: every candidate's (holdout, test) point, the Pareto-front polyline and the
/// points each policy selected.
pub fn cmd_report(cfg: &ExperimentConfig) -> Result<Vec<String>, CliError> {
    let records = read_pool(&cfg.out.join(POOL_FILE))?;
    let sel_path = cfg.out.join(SELECTIONS_FILE);
    let selections = read_selections_csv(read_file(&sel_path)?.as_slice()).map_err(data_err(&sel_path))?;
    let mut by_dataset: BTreeMap<&str, Vec<&CandidateRecord>> = BTreeMap::new();
    for r in &records {
        by_dataset.entry(r.dataset_id.as_str()).or_default().push(r);
    }
    let dir = cfg.out.join("plots");
    let mut written = Vec::new();
    for (id, recs) in by_dataset {
        let (scatter, front) = holdout_test_front(&recs)?;
        let front_rows: Vec<ScatterRow> = front.iter().map(|&i| scatter[i].clone()).collect();
        let picked: Vec<SelectedPoint> = selections
            .iter()
            .filter(|s| s.dataset_id == id)
            .map(|s| SelectedPoint {
                label: row_label(s.aggregation, s.policy),
                run_id: s.run_id,
                holdout: s.acc_holdout,
                test: s.acc_test,
            })
            .collect();
        for (suffix, bytes) in [
            ("scatter", to_csv(&scatter)?),
            ("front", to_csv(&front_rows)?),
            ("selected", to_csv(&picked)?),
        ] {
            let name = format!("{id}_{suffix}.csv");
            write_file(&dir.join(&name), &bytes)?;
            written.push(name);
        }
    }
    Ok(written)
}

/// split, train, select, compare and report in sequence.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Comparison, CliError> {
    cmd_split(cfg)?;
    cmd_train(cfg)?;
    cmd_select(cfg, None)?;
    let cmp = cmd_compare(cfg)?;
    cmd_report(cfg)?;
    Ok(cmp)
}

// ---------------------------------------------------------------------------------------------

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Data(e.to_string()))
}
