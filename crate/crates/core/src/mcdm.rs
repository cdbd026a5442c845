//! Decision matrices, TOPSIS and Pareto filtering.
//!
//! TOPSIS here is the classical vector-normalised variant: each criterion column is divided by
//! its Euclidean norm and multiplied by its (sum-normalised) weight; the positive ideal takes
//! the best value of every column and the negative ideal the worst; an alternative's closeness
//! is `d- / (d+ + d-)` with Euclidean distances to the two ideals.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Maximize => Direction::Minimize,
            Direction::Minimize => Direction::Maximize,
        }
    }

    /// Value oriented so that larger is better.
    #[inline]
    fn orient(self, v: f64) -> f64 {
        match self {
            Direction::Maximize => v,
            Direction::Minimize => -v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub name: String,
    pub direction: Direction,
    pub weight: f64,
}

impl CriterionSpec {
    pub fn new(name: impl Into<String>, direction: Direction, weight: f64) -> Self {
        CriterionSpec {
            name: name.into(),
            direction,
            weight,
        }
    }

    pub fn maximize(name: impl Into<String>) -> Self {
        Self::new(name, Direction::Maximize, 1.0)
    }

    pub fn minimize(name: impl Into<String>) -> Self {
        Self::new(name, Direction::Minimize, 1.0)
    }
}

/// `m` alternatives by `n` criteria, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    alternatives: Vec<String>,
    values: Vec<f64>,
    criteria: Vec<CriterionSpec>,
}

impl DecisionMatrix {
    pub fn new(
        alternatives: Vec<String>,
        rows: Vec<Vec<f64>>,
        criteria: Vec<CriterionSpec>,
    ) -> Result<Self> {
        let m = alternatives.len();
        let n = criteria.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidMatrix(format!(
                "need at least one alternative and one criterion (got {m} x {n})"
            )));
        }
        if rows.len() != m {
            return Err(Error::InvalidMatrix(format!("{} rows for {m} alternatives", rows.len())));
        }
        let mut values = Vec::with_capacity(m * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} values for {n} criteria",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidMatrix(format!("row {i} holds non-finite value {v}")));
            }
            values.extend(row);
        }
        for c in &criteria {
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(Error::InvalidMatrix(format!(
                    "criterion {:?} has non-positive weight {}",
                    c.name, c.weight
                )));
            }
        }
        Ok(DecisionMatrix {
            alternatives,
            values,
            criteria,
        })
    }

    /// Matrix with alternatives named by their row index.
    pub fn from_rows(rows: Vec<Vec<f64>>, criteria: Vec<CriterionSpec>) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(ids, rows, criteria)
    }

    pub fn n_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[CriterionSpec] {
        &self.criteria
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_criteria();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_criteria() + j]
    }

    /// Weights scaled to sum to one.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let total: f64 = self.criteria.iter().map(|c| c.weight).sum();
        self.criteria.iter().map(|c| c.weight / total).collect()
    }

    /// Does alternative `a` dominate `b` (at least as good everywhere, strictly better once)?
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        let mut strict = false;
        for (j, c) in self.criteria.iter().enumerate() {
            let va = c.direction.orient(self.value(a, j));
            let vb = c.direction.orient(self.value(b, j));
            if va < vb {
                return false;
            }
            if va > vb {
                strict = true;
            }
        }
        strict
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    /// Row-major, same shape as the source matrix.
    pub values: Vec<f64>,
    pub n_criteria: usize,
    /// Columns whose Euclidean norm was zero; left as zeros.
    pub zero_columns: Vec<usize>,
}

impl NormalizedMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_criteria..(i + 1) * self.n_criteria]
    }
}

/// Divides every column by its Euclidean norm, then multiplies it by its normalised weight.
pub fn normalize_matrix(matrix: &DecisionMatrix) -> NormalizedMatrix {
    let (m, n) = (matrix.n_alternatives(), matrix.n_criteria());
    let weights = matrix.normalized_weights();
    let mut values = vec![0.0; m * n];
    let mut zero_columns = Vec::new();
    for j in 0..n {
        let norm = (0..m).map(|i| matrix.value(i, j).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            zero_columns.push(j);
            continue;
        }
        for i in 0..m {
            values[i * n + j] = matrix.value(i, j) / norm * weights[j];
        }
    }
    NormalizedMatrix {
        values,
        n_criteria: n,
        zero_columns,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisResult {
    pub closeness: Vec<f64>,
    /// Alternative indices by descending closeness; equal closeness keeps index order.
    pub ordering: Vec<usize>,
    pub pis: Vec<f64>,
    pub nis: Vec<f64>,
    pub zero_columns: Vec<usize>,
}

pub fn topsis_rank(matrix: &DecisionMatrix) -> TopsisResult {
    let norm = normalize_matrix(matrix);
    let (m, n) = (matrix.n_alternatives(), matrix.n_criteria());

    let mut pis = Vec::with_capacity(n);
    let mut nis = Vec::with_capacity(n);
    for (j, c) in matrix.criteria().iter().enumerate() {
        let col = (0..m).map(|i| norm.values[i * n + j]);
        let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        match c.direction {
            Direction::Maximize => {
                pis.push(hi);
                nis.push(lo);
            }
            Direction::Minimize => {
                pis.push(lo);
                nis.push(hi);
            }
        }
    }

    let closeness: Vec<f64> = (0..m)
        .map(|i| {
            let row = norm.row(i);
            let d_plus = euclidean(row, &pis);
            let d_minus = euclidean(row, &nis);
            if d_plus + d_minus == 0.0 {
                0.5
            } else if d_minus == 0.0 {
                0.0
            } else {
                // algebraically d- / (d+ + d-); this form is monotone under rounding
                1.0 / (1.0 + d_plus / d_minus)
            }
        })
        .collect();

    let mut ordering: Vec<usize> = (0..m).collect();
    ordering.sort_by(|&a, &b| {
        closeness[b]
            .partial_cmp(&closeness[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });

    TopsisResult {
        closeness,
        ordering,
        pis,
        nis,
        zero_columns: norm.zero_columns,
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Indices (ascending) of the non-dominated alternatives. Identical rows never dominate each
/// other, so duplicates of a front member are all kept.
///
/// Rows are visited in descending lexicographic order of their oriented values. A dominator
/// always precedes what it dominates in that order, so each row only needs checking against the
/// front accumulated so far.
pub fn pareto_filter(matrix: &DecisionMatrix) -> Vec<usize> {
    let m = matrix.n_alternatives();
    let criteria = matrix.criteria();
    let oriented: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            matrix
                .row(i)
                .iter()
                .zip(criteria)
                .map(|(&v, c)| c.direction.orient(v))
                .collect()
        })
        .collect();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        for (x, y) in oriented[a].iter().zip(&oriented[b]) {
            match y.partial_cmp(x).unwrap_or(Ordering::Equal) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.cmp(&b)
    });

    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front.iter().any(|&f| dominates_oriented(&oriented[f], &oriented[i])) {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

fn dominates_oriented(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Audit view of a TOPSIS + Pareto evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionAudit {
    pub alternatives: Vec<String>,
    pub criteria: Vec<CriterionSpec>,
    pub closeness: Vec<f64>,
    pub retained: Vec<usize>,
}

impl DecisionAudit {
    pub fn evaluate(matrix: &DecisionMatrix) -> Self {
        DecisionAudit {
            alternatives: matrix.alternatives().to_vec(),
            criteria: matrix.criteria().to_vec(),
            closeness: topsis_rank(matrix).closeness,
            retained: pareto_filter(matrix),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max2() -> Vec<CriterionSpec> {
        vec![CriterionSpec::maximize("a"), CriterionSpec::maximize("b")]
    }

    #[test]
    fn three_four_five_column() {
        let m = DecisionMatrix::from_rows(vec![vec![3.0], vec![4.0]], vec![CriterionSpec::maximize("x")])
            .unwrap();
        let n = normalize_matrix(&m);
        assert!((n.values[0] - 0.6).abs() < 1e-15);
        assert!((n.values[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn weights_are_normalised() {
        let crit = vec![
            CriterionSpec::new("a", Direction::Maximize, 3.0),
            CriterionSpec::new("b", Direction::Maximize, 1.0),
        ];
        let m = DecisionMatrix::from_rows(vec![vec![3.0, 1.0], vec![4.0, 0.0]], crit).unwrap();
        let n = normalize_matrix(&m);
        assert!((n.values[0] - 0.6 * 0.75).abs() < 1e-15);
        assert!((n.values[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_column_is_flagged() {
        let m = DecisionMatrix::from_rows(vec![vec![1.0, 0.0], vec![2.0, 0.0]], max2()).unwrap();
        let n = normalize_matrix(&m);
        assert_eq!(n.zero_columns, vec![1]);
        assert_eq!(n.row(0)[1], 0.0);
        let t = topsis_rank(&m);
        assert_eq!(t.closeness, vec![0.0, 1.0]);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(DecisionMatrix::from_rows(vec![vec![f64::NAN, 1.0]], max2()).is_err());
        assert!(DecisionMatrix::from_rows(vec![vec![1.0]], max2()).is_err());
        assert!(DecisionMatrix::from_rows(vec![], max2()).is_err());
        assert!(DecisionMatrix::from_rows(
            vec![vec![1.0]],
            vec![CriterionSpec::new("a", Direction::Maximize, 0.0)]
        )
        .is_err());
    }

    #[test]
    fn pis_and_nis_coincide_with_alternatives() {
        let m = DecisionMatrix::from_rows(vec![vec![2.0, 5.0], vec![1.0, 3.0]], max2()).unwrap();
        assert_eq!(topsis_rank(&m).closeness, vec![1.0, 0.0]);
    }

    #[test]
    fn symmetric_alternatives() {
        let m = DecisionMatrix::from_rows(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            max2(),
        )
        .unwrap();
        let t = topsis_rank(&m);
        assert_eq!(t.closeness[2], 1.0);
        assert_eq!(t.closeness[0], t.closeness[1]);
        assert_eq!(t.ordering, vec![2, 0, 1]);
    }

    #[test]
    fn identical_alternatives_get_half() {
        let m = DecisionMatrix::from_rows(vec![vec![0.7, 3.0]; 4], max2()).unwrap();
        assert!(topsis_rank(&m).closeness.iter().all(|&c| c == 0.5));
    }

    #[test]
    fn accuracy_vs_neurons_example() {
        // frozen from an independent step-by-step evaluation
        let m = DecisionMatrix::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec![0.90, 10.0], vec![0.80, 2.0], vec![0.85, 5.0]],
            vec![CriterionSpec::maximize("accuracy"), CriterionSpec::minimize("neurons")],
        )
        .unwrap();
        let t = topsis_rank(&m);
        let expected = [0.08785912863058033, 0.9121408713694197, 0.6237758597467782];
        for (c, e) in t.closeness.iter().zip(expected) {
            assert!((c - e).abs() < 1e-12, "{c} vs {e}");
        }
        assert_eq!(t.ordering, vec![1, 2, 0]);
    }

    #[test]
    fn pareto_examples() {
        let m = DecisionMatrix::from_rows(
            vec![vec![2.0, 2.0], vec![1.0, 1.0], vec![1.5, 3.0]],
            max2(),
        )
        .unwrap();
        assert_eq!(pareto_filter(&m), vec![0, 2]);

        let same = DecisionMatrix::from_rows(vec![vec![1.0, 1.0]; 5], max2()).unwrap();
        assert_eq!(pareto_filter(&same), vec![0, 1, 2, 3, 4]);

        let signed_zero =
            DecisionMatrix::from_rows(vec![vec![-0.0, 1.0], vec![0.0, 0.5]], max2()).unwrap();
        assert_eq!(pareto_filter(&signed_zero), vec![0]);
    }

    fn arb_matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = DecisionMatrix> {
        (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
            (
                prop::collection::vec(prop::collection::vec(-5.0f64..5.0, n), m),
                prop::collection::vec((any::<bool>(), 0.1f64..3.0), n),
            )
                .prop_map(|(rows, dirs)| {
                    let crit = dirs
                        .into_iter()
                        .enumerate()
                        .map(|(j, (max, w))| {
                            let d = if max { Direction::Maximize } else { Direction::Minimize };
                            CriterionSpec::new(format!("c{j}"), d, w)
                        })
                        .collect();
                    DecisionMatrix::from_rows(rows, crit).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn closeness_in_unit_interval_and_ordering_is_permutation(m in arb_matrix(10, 5)) {
            let t = topsis_rank(&m);
            prop_assert!(t.closeness.iter().all(|c| (0.0..=1.0).contains(c)));
            let mut o = t.ordering.clone();
            o.sort();
            prop_assert_eq!(o, (0..m.n_alternatives()).collect::<Vec<_>>());
        }

        #[test]
        fn dominance_implies_closeness_order(m in arb_matrix(10, 4)) {
            let t = topsis_rank(&m);
            for a in 0..m.n_alternatives() {
                for b in 0..m.n_alternatives() {
                    if m.dominates(a, b) {
                        prop_assert!(t.closeness[a] >= t.closeness[b]);
                    }
                }
            }
        }

        #[test]
        fn direction_duality(m in arb_matrix(8, 4), col in 0usize..4) {
            let j = col % m.n_criteria();
            let rows: Vec<Vec<f64>> = (0..m.n_alternatives())
                .map(|i| {
                    let mut r = m.row(i).to_vec();
                    r[j] = -r[j];
                    r
                })
                .collect();
            let mut crit = m.criteria().to_vec();
            crit[j].direction = crit[j].direction.flip();
            let dual = DecisionMatrix::from_rows(rows, crit).unwrap();
            prop_assert_eq!(topsis_rank(&m).ordering, topsis_rank(&dual).ordering);
            prop_assert_eq!(pareto_filter(&m), pareto_filter(&dual));
        }

        #[test]
        fn front_is_mutually_non_dominated_and_covers(m in arb_matrix(30, 3)) {
            let front = pareto_filter(&m);
            for &a in &front {
                for &b in &front {
                    prop_assert!(!m.dominates(a, b));
                }
            }
            for i in 0..m.n_alternatives() {
                if !front.contains(&i) {
                    prop_assert!(front.iter().any(|&f| m.dominates(f, i)));
                }
            }
        }
    }
}
