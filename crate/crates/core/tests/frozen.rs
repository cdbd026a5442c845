//! Values computed once by independent tooling and frozen here.

use mcsel::mcdm::{pareto_filter, topsis_rank, CriterionSpec, DecisionMatrix};
use mcsel::policies::{select_individual, PolicyId};
use mcsel::record::{Activation, Architecture, CandidateRecord, SetMetrics};
use mcsel::stats::{wilcoxon_signed_rank, PMethod, Symbol};

fn example() -> DecisionMatrix {
    DecisionMatrix::from_rows(
        vec![
            vec![0.95, 0.90, 0.88, 10.0, 40.0],
            vec![0.92, 0.91, 0.90, 5.0, 30.0],
            vec![0.99, 0.85, 0.80, 20.0, 80.0],
            vec![0.90, 0.89, 0.89, 3.0, 25.0],
        ],
        vec![
            CriterionSpec::maximize("train"),
            CriterionSpec::maximize("validation"),
            CriterionSpec::maximize("holdout"),
            CriterionSpec::minimize("neurons"),
            CriterionSpec::minimize("epochs"),
        ],
    )
    .unwrap()
}

#[test]
fn topsis_closeness_matches_numpy() {
    let r = topsis_rank(&example());
    let want = [0.63753579, 0.88554344, 0.04897004, 0.94939686];
    for (g, w) in r.closeness.iter().zip(want) {
        assert!((g - w).abs() < 5e-9, "{g} vs {w}");
    }
    assert_eq!(r.ordering, vec![3, 1, 0, 2]);
}

#[test]
fn pareto_front_of_example() {
    assert_eq!(pareto_filter(&example()), vec![0, 1, 2, 3]);
    let m = DecisionMatrix::from_rows(
        vec![vec![0.9, 5.0], vec![0.8, 6.0], vec![0.9, 5.0], vec![0.95, 9.0]],
        vec![CriterionSpec::maximize("acc"), CriterionSpec::minimize("size")],
    )
    .unwrap();
    assert_eq!(pareto_filter(&m), vec![0, 2, 3]);
}

#[test]
fn wilcoxon_exact_matches_scipy() {
    let a = [0.91, 0.88, 0.93, 0.90, 0.87, 0.92, 0.89, 0.94];
    let b = [0.89, 0.87, 0.90, 0.91, 0.85, 0.88, 0.86, 0.90];
    let w = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
    assert_eq!(w.method, PMethod::Exact);
    assert!((w.p_value - 0.0234375).abs() < 1e-12);
    assert_eq!(w.symbol, Symbol::Up);
    let r = wilcoxon_signed_rank(&b, &a, 0.05).unwrap();
    assert_eq!(r.symbol, Symbol::Down);
}

#[test]
fn wilcoxon_normal_approximation_matches_scipy() {
    let d = [
        2.340919, -2.255665, 0.718099, -0.26777, -0.152649, 0.084403, -1.719986, 0.068068, -0.565213,
        3.623, 0.525787, -0.052631, 0.018713, -0.368046, -0.755151, -0.090801, 0.781945, 0.061446,
        1.257759, 0.100198, 0.32426, 1.845821, 0.845106, -0.205229, 0.117161, 0.840525, 2.235088,
        0.03038, 0.056441, 1.302314, -0.58646, 0.00828, 1.182539, 0.88035, 0.391517, 0.970104,
        -2.528162, 1.321307, -0.659645, -1.36862,
    ];
    let zeros = vec![0.0; d.len()];
    let w = wilcoxon_signed_rank(&d, &zeros, 0.05).unwrap();
    assert_eq!(w.method, PMethod::NormalApprox);
    assert!((w.p_value - 0.1205498439946762).abs() < 1e-9, "{}", w.p_value);
    assert_eq!(w.symbol, Symbol::Eq);
}

fn record(rep: u32, neurons: u32, m: [f64; 4]) -> CandidateRecord {
    CandidateRecord {
        dataset_id: "d".into(),
        run_id: 0,
        repetition: rep,
        architecture: Architecture::new(neurons, Activation::Relu),
        epochs_trained: 30,
        max_epochs: 100,
        metrics: SetMetrics::new(m[0], m[1], m[2], m[3]),
        seed: 0,
    }
}

#[test]
fn single_set_and_topsis_policies_disagree_on_a_noise_fitter() {
    let pool = [
        record(0, 20, [1.00, 0.97, 0.99, 0.80]),
        record(0, 5, [0.93, 0.92, 0.91, 0.90]),
        record(0, 8, [0.90, 0.89, 0.90, 0.91]),
    ];
    let refs: Vec<&CandidateRecord> = pool.iter().collect();
    let h = select_individual(PolicyId::Holdout, &refs).unwrap();
    assert_eq!(h.selected.architecture.neurons, 20);
    let t = select_individual(PolicyId::Ttvhn, &refs).unwrap();
    assert_eq!(t.selected.architecture.neurons, 5);
    assert!(t.closeness.is_some());
}
