//! Disagreement metrics, the paired Wilcoxon signed-rank test and policy comparison matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::record::SetMetrics;

/// Largest effective sample size for which p-values come from the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisagreementReport {
    pub train_validation: f64,
    pub holdout_test: f64,
    /// Mean absolute difference over the six unordered pairs of set accuracies.
    pub all: f64,
}

pub fn disagreement(m: &SetMetrics) -> DisagreementReport {
    let v = m.as_array();
    let mut total = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            total += (v[i] - v[j]).abs();
        }
    }
    DisagreementReport {
        train_validation: (m.train - m.validation).abs(),
        holdout_test: (m.holdout - m.test).abs(),
        all: total / 6.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    /// Row distribution significantly larger than the column.
    Up,
    Eq,
    /// Row distribution significantly smaller than the column.
    Down,
}

impl Symbol {
    pub fn score(self) -> i32 {
        match self {
            Symbol::Up => 1,
            Symbol::Eq => 0,
            Symbol::Down => -1,
        }
    }

    pub fn glyph(self) -> &'static str {
        match self {
            Symbol::Up => "▲",
            Symbol::Eq => "≡",
            Symbol::Down => "▽",
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Symbol::Up => "up",
            Symbol::Eq => "eq",
            Symbol::Down => "down",
        }
    }

    pub fn from_word(s: &str) -> Option<Self> {
        match s {
            "up" => Some(Symbol::Up),
            "eq" => Some(Symbol::Eq),
            "down" => Some(Symbol::Down),
            _ => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Symbol::Up => Symbol::Down,
            Symbol::Eq => Symbol::Eq,
            Symbol::Down => Symbol::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PMethod {
    Exact,
    NormalApprox,
    /// No non-zero differences.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOutcome {
    /// Sum of the ranks of positive differences (`a - b > 0`).
    pub statistic: f64,
    pub p_value: f64,
    pub symbol: Symbol,
    /// Pairs left after discarding zero differences.
    pub n_effective: usize,
    pub method: PMethod,
}

/// Two-sided paired Wilcoxon signed-rank test of `a` against `b`.
///
/// Zero differences are discarded, tied absolute differences share their average rank. With at
/// most [`EXACT_MAX_N`] remaining pairs the p-value is exact (the null distribution of the
/// positive rank sum, tie-aware); above that it uses the normal approximation with tie and
/// continuity corrections. The symbol follows the sign of `W+ - n(n+1)/4`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "paired samples need equal non-zero lengths (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("paired samples must be finite".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonOutcome {
            statistic: 0.0,
            p_value: 1.0,
            symbol: Symbol::Eq,
            n_effective: 0,
            method: PMethod::Degenerate,
        });
    }

    // ranks doubled so that average ranks stay integral
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut rank2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        // positions start+1..=end share (start+1+end)/2, doubled
        let shared = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            rank2[i] = shared;
        }
        tie_sizes.push(end - start);
        start = end;
    }

    let w_plus2: u64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| rank2[i]).sum();
    let total2: u64 = rank2.iter().sum(); // n(n+1)
    // compare 2*W+ with the doubled mean n(n+1)/2
    let centred2 = 2 * w_plus2 as i64 - total2 as i64; // = 4 (W+ - mean)

    let (p_value, method) = if n <= EXACT_MAX_N {
        (exact_p(&rank2, w_plus2), PMethod::Exact)
    } else {
        let nf = n as f64;
        let tie_term: f64 = tie_sizes
            .iter()
            .map(|&t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum::<f64>();
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let dev = (centred2 as f64 / 4.0).abs();
        let z = ((dev - 0.5).max(0.0)) / var.sqrt();
        ((erfc(z / std::f64::consts::SQRT_2)).min(1.0), PMethod::NormalApprox)
    };

    let symbol = if p_value < alpha {
        match centred2.cmp(&0) {
            std::cmp::Ordering::Greater => Symbol::Up,
            std::cmp::Ordering::Less => Symbol::Down,
            std::cmp::Ordering::Equal => Symbol::Eq,
        }
    } else {
        Symbol::Eq
    };

    Ok(WilcoxonOutcome {
        statistic: w_plus2 as f64 / 2.0,
        p_value,
        symbol,
        n_effective: n,
        method,
    })
}

/// `P(|W - mean| >= |w - mean|)` under the null, where each doubled rank enters `2W` with
/// probability one half. Counts are accumulated with a subset-sum table over doubled ranks.
fn exact_p(rank2: &[u64], w_plus2: u64) -> f64 {
    let total2: u64 = rank2.iter().sum();
    let mut counts = vec![0u64; total2 as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in rank2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    // |2*(2W) - total2| >= |2*w_plus2*... |, all in doubled units
    let obs = (2 * w_plus2 as i64 - total2 as i64).abs();
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - total2 as i64).abs() >= obs)
        .map(|(_, &c)| c)
        .sum();
    let p = extreme as f64 / 2f64.powi(rank2.len() as i32);
    p.min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    TestAccuracy,
    AllDisagreement,
}

impl Target {
    /// Which side of a comparison is preferable for this variable.
    pub fn preferred(self) -> Preferred {
        match self {
            Target::TestAccuracy => Preferred::Larger,
            Target::AllDisagreement => Preferred::Smaller,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::TestAccuracy => "test_accuracy",
            Target::AllDisagreement => "all_disagreement",
        }
    }

    pub fn value(self, m: &SetMetrics) -> f64 {
        match self {
            Target::TestAccuracy => m.test,
            Target::AllDisagreement => disagreement(m).all,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preferred {
    Larger,
    Smaller,
}

/// Row labels, symbol rows and row scores of a comparison matrix read back from CSV.
pub type SymbolGrid = (Vec<String>, Vec<Vec<Symbol>>, Vec<i32>);

/// How paired samples are formed from per-run values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Pairing {
    /// One pair per `(dataset, run)` key.
    #[default]
    PerRun,
    /// Runs averaged within each dataset; one pair per dataset.
    PerDataset,
}

/// Values of one row label (e.g. `Individual/TTVH`) keyed by `(dataset_id, run_id)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolicySeries {
    pub label: String,
    pub values: BTreeMap<(String, u32), f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub target: Target,
    pub alpha: f64,
    pub pairing: Pairing,
    pub labels: Vec<String>,
    /// `outcomes[i][j]` compares row `i` against column `j`.
    pub outcomes: Vec<Vec<WilcoxonOutcome>>,
    /// Row sums of up = +1, eq = 0, down = -1.
    pub summary: Vec<i32>,
    pub preferred: Preferred,
    pub zero_handling: String,
}

pub fn comparison_matrix(
    series: &[PolicySeries],
    target: Target,
    alpha: f64,
    pairing: Pairing,
) -> Result<ComparisonMatrix> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("no policies to compare".into()));
    }
    let keys: BTreeSet<&(String, u32)> = series.iter().flat_map(|s| s.values.keys()).collect();
    let mut missing = Vec::new();
    for s in series {
        for k in &keys {
            if !s.values.contains_key(*k) {
                missing.push(format!("{} lacks ({}, run {})", s.label, k.0, k.1));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MisalignedKeys(missing.join("; ")));
    }

    let aligned: Vec<Vec<f64>> = series
        .iter()
        .map(|s| match pairing {
            Pairing::PerRun => s.values.values().copied().collect(),
            Pairing::PerDataset => {
                let mut per: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
                for ((d, _), v) in &s.values {
                    let e = per.entry(d.as_str()).or_default();
                    e.0 += v;
                    e.1 += 1;
                }
                per.values().map(|(sum, n)| sum / *n as f64).collect()
            }
        })
        .collect();

    let p = series.len();
    let mut outcomes = Vec::with_capacity(p);
    for i in 0..p {
        let mut row = Vec::with_capacity(p);
        for j in 0..p {
            row.push(wilcoxon_signed_rank(&aligned[i], &aligned[j], alpha)?);
        }
        outcomes.push(row);
    }
    let summary = outcomes
        .iter()
        .map(|row| row.iter().map(|o| o.symbol.score()).sum())
        .collect();
    Ok(ComparisonMatrix {
        target,
        alpha,
        pairing,
        labels: series.iter().map(|s| s.label.clone()).collect(),
        outcomes,
        summary,
        preferred: target.preferred(),
        zero_handling: "wilcox (zero differences discarded)".into(),
    })
}

impl ComparisonMatrix {
    /// Grid CSV: one row per label, cells `up` / `eq` / `down`, then the summary.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["policy".to_string()];
        header.extend(self.labels.iter().cloned());
        header.push("summary".into());
        w.write_record(&header)?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut row = vec![label.clone()];
            row.extend(self.outcomes[i].iter().map(|o| o.symbol.word().to_string()));
            row.push(self.summary[i].to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long-form CSV with statistic and p-value of every cell.
    pub fn write_cells_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "column", "statistic", "p_value", "symbol", "n_effective"])?;
        for (i, row) in self.outcomes.iter().enumerate() {
            for (j, o) in row.iter().enumerate() {
                w.write_record([
                    self.labels[i].clone(),
                    self.labels[j].clone(),
                    o.statistic.to_string(),
                    o.p_value.to_string(),
                    o.symbol.word().to_string(),
                    o.n_effective.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Symbols read back from [`ComparisonMatrix::write_csv`]: `(labels, grid, summary)`.
    pub fn read_csv_grid(input: &str) -> Result<SymbolGrid> {
        let mut rdr = csv::Reader::from_reader(input.as_bytes());
        let header = rdr.headers()?.clone();
        let labels: Vec<String> = header.iter().skip(1).take(header.len().saturating_sub(2)).map(String::from).collect();
        let mut grid = Vec::new();
        let mut summary = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let cells = rec
                .iter()
                .skip(1)
                .take(labels.len())
                .map(|c| Symbol::from_word(c).ok_or_else(|| Error::malformed(format!("bad symbol {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            grid.push(cells);
            let s = rec.get(labels.len() + 1).unwrap_or("");
            summary.push(s.parse().map_err(|_| Error::malformed(format!("bad summary {s:?}")))?);
        }
        Ok((labels, grid, summary))
    }

    pub fn symbol(&self, row: &str, col: &str) -> Option<Symbol> {
        let i = self.labels.iter().position(|l| l == row)?;
        let j = self.labels.iter().position(|l| l == col)?;
        Some(self.outcomes[i][j].symbol)
    }
}

impl fmt::Display for ComparisonMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.labels.iter().map(|l| l.chars().count()).max().unwrap_or(0).max(7);
        let mut line = format!("{:<width$}", "");
        for l in &self.labels {
            let _ = write!(line, " {:>width$}", l);
        }
        let _ = write!(line, " {:>7}", "Summary");
        writeln!(f, "{}", line.trim_end())?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut line = format!("{:<width$}", label);
            for o in &self.outcomes[i] {
                let _ = write!(line, " {:>width$}", o.symbol.glyph());
            }
            let _ = write!(line, " {:>7}", self.summary[i]);
            writeln!(f, "{line}")?;
        }
        let pref = match self.preferred {
            Preferred::Larger => "larger is better",
            Preferred::Smaller => "smaller is better",
        };
        writeln!(
            f,
            "target: {} ({pref}); alpha = {}; ▲ row significantly larger than column",
            self.target.name(),
            self.alpha
        )
    }
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pairwise_oracle(v: [f64; 4]) -> f64 {
        let mut diffs = Vec::new();
        for (i, x) in v.iter().enumerate() {
            for y in &v[i + 1..] {
                diffs.push((x - y).abs());
            }
        }
        assert_eq!(diffs.len(), 6);
        diffs.iter().sum::<f64>() / diffs.len() as f64
    }

    #[test]
    fn disagreement_examples() {
        let a = disagreement(&SetMetrics::new(0.99, 0.94, 0.92, 0.85));
        assert!((a.train_validation - 0.05).abs() < 1e-12);
        assert!((a.holdout_test - 0.07).abs() < 1e-12);
        assert!((a.all - 0.44 / 6.0).abs() < 1e-12);
        assert!((a.all - pairwise_oracle([0.99, 0.94, 0.92, 0.85])).abs() < 1e-12);

        let b = disagreement(&SetMetrics::new(0.86, 0.85, 0.85, 0.85));
        assert!((b.train_validation - 0.01).abs() < 1e-12);
        assert!(b.holdout_test.abs() < 1e-12);
        assert!((b.all - 0.03 / 6.0).abs() < 1e-12);

        let c = disagreement(&SetMetrics::new(0.7, 0.7, 0.7, 0.7));
        assert_eq!((c.train_validation, c.holdout_test, c.all), (0.0, 0.0, 0.0));
    }

    /// Enumerates every sign pattern over the (average) ranks of the non-zero differences.
    pub(crate) fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        let n = d.len();
        if n == 0 {
            return 1.0;
        }
        let ranks: Vec<f64> = d
            .iter()
            .map(|x| {
                let less = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
                let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect();
        let mean = ranks.iter().sum::<f64>() / 2.0;
        let observed: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
        let mut extreme = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if (w - mean).abs() >= (observed - mean).abs() - 1e-9 {
                extreme += 1;
            }
        }
        extreme as f64 / (1u64 << n) as f64
    }

    #[test]
    fn identical_samples() {
        let a = [0.3, 0.5, 0.9];
        let o = wilcoxon_signed_rank(&a, &a, 0.05).unwrap();
        assert_eq!(o.symbol, Symbol::Eq);
        assert_eq!(o.p_value, 1.0);
        assert_eq!(o.n_effective, 0);
    }

    #[test]
    fn uniform_shift_of_thirty() {
        let b: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let a: Vec<f64> = b.iter().map(|x| x + 1.0).collect();
        let o = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        assert_eq!(o.symbol, Symbol::Up);
        assert_eq!(o.method, PMethod::NormalApprox);
        assert!(o.p_value < 0.001);
        let r = wilcoxon_signed_rank(&b, &a, 0.05).unwrap();
        assert_eq!(r.symbol, Symbol::Down);
        assert_eq!(r.p_value, o.p_value);
    }

    #[test]
    fn known_small_case() {
        // all five differences positive, distinct: p = 2 / 32
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let o = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        assert_eq!(o.statistic, 15.0);
        assert!((o.p_value - 0.0625).abs() < 1e-15);
        assert_eq!(o.symbol, Symbol::Eq);
        // six: 2/64 < 0.05
        let o = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[0.0; 6], 0.05).unwrap();
        assert!((o.p_value - 0.03125).abs() < 1e-15);
        assert_eq!(o.symbol, Symbol::Up);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0], 0.05).is_err());
        assert!(wilcoxon_signed_rank(&[], &[], 0.05).is_err());
    }

    fn series(label: &str, vals: &[f64]) -> PolicySeries {
        PolicySeries {
            label: label.into(),
            values: vals
                .iter()
                .enumerate()
                .map(|(i, v)| (("d".to_string(), i as u32), *v))
                .collect(),
        }
    }

    #[test]
    fn matrix_identical_policies() {
        let v: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        let m = comparison_matrix(
            &[series("A", &v), series("B", &v)],
            Target::TestAccuracy,
            0.05,
            Pairing::PerRun,
        )
        .unwrap();
        assert!(m.outcomes.iter().flatten().all(|o| o.symbol == Symbol::Eq));
        assert_eq!(m.summary, vec![0, 0]);
    }

    #[test]
    fn matrix_shifted_policy() {
        let b: Vec<f64> = (0..50).map(|i| 0.7 + 0.1 * (i as f64 * 1.3).sin()).collect();
        let a: Vec<f64> = b.iter().map(|x| x + 0.05).collect();
        let m = comparison_matrix(
            &[series("A", &a), series("B", &b)],
            Target::TestAccuracy,
            0.05,
            Pairing::PerRun,
        )
        .unwrap();
        assert_eq!(m.symbol("A", "B"), Some(Symbol::Up));
        assert_eq!(m.summary, vec![1, -1]);

        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let (labels, grid, summary) = ComparisonMatrix::read_csv_grid(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(labels, m.labels);
        assert_eq!(grid[0], vec![Symbol::Eq, Symbol::Up]);
        assert_eq!(summary, m.summary);
        let text = m.to_string();
        assert!(text.contains('▲') && text.contains('▽'));
    }

    #[test]
    fn matrix_misaligned_keys() {
        let mut b = series("B", &[0.1, 0.2, 0.3]);
        b.values.remove(&("d".to_string(), 1));
        let err = comparison_matrix(&[series("A", &[0.1, 0.2, 0.3]), b], Target::TestAccuracy, 0.05, Pairing::PerRun)
            .unwrap_err();
        assert!(err.to_string().contains("B lacks (d, run 1)"));
    }

    #[test]
    fn per_dataset_pairing_averages_runs() {
        let mut a = PolicySeries { label: "A".into(), ..Default::default() };
        let mut b = PolicySeries { label: "B".into(), ..Default::default() };
        for d in 0..8 {
            for r in 0..3 {
                a.values.insert((format!("d{d}"), r), 0.5 + d as f64 * 0.01 + r as f64 * 0.001);
                b.values.insert((format!("d{d}"), r), 0.4 + d as f64 * 0.013);
            }
        }
        let m = comparison_matrix(&[a, b], Target::TestAccuracy, 0.05, Pairing::PerDataset).unwrap();
        assert_eq!(m.outcomes[0][1].n_effective, 8);
        assert_eq!(m.symbol("A", "B"), Some(Symbol::Up));
    }

    #[test]
    fn mean_std_basic() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(
            pairs in prop::collection::vec((0i32..6, 0i32..6), 1..12),
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| f64::from(p.0) * 0.25).collect();
            let b: Vec<f64> = pairs.iter().map(|p| f64::from(p.1) * 0.25).collect();
            let o = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
            prop_assert!((o.p_value - brute_force_p(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn shift_and_scale_invariance(
            pairs in prop::collection::vec((-20i32..20, -20i32..20), 1..40),
            shift in -50i32..50,
            scale in 1i32..8,
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let b: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            let base = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
            let tr = |v: &[f64]| v.iter().map(|x| x * f64::from(scale) + f64::from(shift)).collect::<Vec<_>>();
            let moved = wilcoxon_signed_rank(&tr(&a), &tr(&b), 0.05).unwrap();
            prop_assert_eq!(base.p_value, moved.p_value);
            prop_assert_eq!(base.symbol, moved.symbol);
        }

        #[test]
        fn matrix_antisymmetry(
            rows in prop::collection::vec(prop::collection::vec(0i32..10, 30), 2..5),
        ) {
            let s: Vec<PolicySeries> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| series(&format!("P{i}"), &r.iter().map(|v| f64::from(*v) / 10.0).collect::<Vec<_>>()))
                .collect();
            let m = comparison_matrix(&s, Target::AllDisagreement, 0.05, Pairing::PerRun).unwrap();
            for i in 0..s.len() {
                prop_assert_eq!(m.outcomes[i][i].symbol, Symbol::Eq);
                for j in 0..s.len() {
                    prop_assert_eq!(m.outcomes[i][j].symbol, m.outcomes[j][i].symbol.reverse());
                    let direct = wilcoxon_signed_rank(&series_vals(&s[j]), &series_vals(&s[i]), 0.05).unwrap();
                    prop_assert_eq!(m.outcomes[j][i], direct);
                }
            }
        }
    }

    fn series_vals(s: &PolicySeries) -> Vec<f64> {
        s.values.values().copied().collect()
    }
}
