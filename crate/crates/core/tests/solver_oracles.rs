use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use spancca::oracles::{self, DEFAULT_LIMIT};
use spancca::solver::{self, bilinear};
use spancca::{rng, ConstraintSpec, CrossCov, Error, Matrix, Samples, SolverConfig};

fn gaussian(rows: usize, cols: usize, seed: u64) -> CrossCov {
    let mut g = rng::stream(seed, 2, 0);
    CrossCov::new(Matrix::from_fn(rows, cols, |_, _| {
        StandardNormal.sample(&mut g)
    }))
    .unwrap()
}

fn sparse(s: usize) -> ConstraintSpec {
    ConstraintSpec::Sparse { s }
}

/// Closed form for the sparse/sparse problem: the largest top singular value
/// of any `s_x × s_y` submatrix, via nalgebra.
fn submatrix_oracle(m: &CrossCov, sx: usize, sy: usize) -> f64 {
    use itertools::Itertools;
    let mut best = 0.0_f64;
    for rows in (0..m.m()).combinations(sx) {
        for cols in (0..m.n()).combinations(sy) {
            let sub = m.select(&rows, &cols);
            let d = nalgebra::DMatrix::from_row_slice(sx, sy, sub.as_slice());
            best = best.max(d.singular_values().max());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exhaustive_agrees_with_independent_oracle(rows in 2usize..6, cols in 2usize..6, seed in any::<u64>(), a in 0usize..5, b in 0usize..5) {
        let m = gaussian(rows, cols, seed);
        let (sx, sy) = (1 + a % rows, 1 + b % cols);
        let got = oracles::exhaustive_cca(&m, sx, sy, DEFAULT_LIMIT).unwrap();
        let want = submatrix_oracle(&m, sx, sy);
        prop_assert!((got.objective - want).abs() <= 1e-10 * want.max(1.0));
        prop_assert!((bilinear(&m, &got.u, &got.v) - got.objective).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn rank_one_matches_thresholding(rows in 2usize..10, cols in 2usize..10, seed in any::<u64>(), a in 0usize..9, b in 0usize..9) {
        let m = gaussian(rows, cols, seed);
        let (sx, sy) = (1 + a % rows, 1 + b % cols);
        let cfg = SolverConfig::new(1, Samples::Count(2), sparse(sx), sparse(sy)).with_seed(seed);
        let rep = solver::solve(&m, &cfg).unwrap();
        let f = spancca::linalg::truncated_svd(&m, 1, cfg.svd, seed).unwrap();
        let thr = oracles::threshold_cca(&CrossCov::new(f.materialize()).unwrap(), sx, sy).unwrap();
        prop_assert!((rep.best.obj_lowrank - thr.objective).abs() <= 1e-12 * f.s()[0]);
        prop_assert_eq!(rep.best.u.indices(), thr.u.indices());
        prop_assert_eq!(rep.best.v.indices(), thr.v.indices());
    }

    #[test]
    fn more_rounds_never_hurt(rows in 2usize..9, cols in 2usize..9, seed in any::<u64>()) {
        let m = gaussian(rows, cols, seed);
        let mut last = f64::NEG_INFINITY;
        for t in [1, 5, 50, 500] {
            let cfg = SolverConfig::new(2.min(rows).min(cols), Samples::Count(t), sparse(2.min(rows)), ConstraintSpec::Unit).with_seed(seed);
            let obj = solver::solve(&m, &cfg).unwrap().best.obj_lowrank;
            prop_assert!(obj >= last);
            last = obj;
        }
    }
}

#[test]
fn diagonal_instance_finds_the_largest_entry() {
    let m = CrossCov::new(Matrix::from_diag(3, 3, &[3.0, 2.0, 1.0])).unwrap();
    let cfg = SolverConfig::new(3, Samples::Count(64), sparse(1), sparse(1));
    let rep = solver::solve(&m, &cfg).unwrap();
    assert_eq!(rep.best.u.to_pairs(), vec![(0, 1.0)]);
    assert_eq!(rep.best.v.to_pairs(), vec![(0, 1.0)]);
    assert!((rep.obj_full.unwrap() - 3.0).abs() <= 1e-12);
}

#[test]
fn zero_matrix_is_degenerate() {
    let m = CrossCov::new(Matrix::zeros(4, 3)).unwrap();
    let cfg = SolverConfig::new(2, Samples::Count(10), sparse(2), sparse(2));
    let err = solver::solve(&m, &cfg).unwrap_err();
    assert!(matches!(err, Error::DegenerateInput { .. }), "{err:?}");
}

#[test]
fn rank_above_dimension_is_rejected() {
    let m = gaussian(4, 3, 0);
    let cfg = SolverConfig::new(4, Samples::Count(10), sparse(2), sparse(2));
    assert!(matches!(solver::solve(&m, &cfg), Err(Error::Rank { .. })));
}

#[test]
fn exhaustive_refuses_over_the_limit() {
    let m = gaussian(30, 30, 0);
    let err = oracles::exhaustive_cca(&m, 10, 10, 1000).unwrap_err();
    assert!(matches!(err, Error::Capacity { .. }), "{err:?}");
}

#[test]
fn worker_count_does_not_change_the_result() {
    let m = gaussian(25, 15, 3);
    let run = |w| {
        let cfg = SolverConfig::new(4, Samples::Count(5000), sparse(4), sparse(3))
            .with_seed(11)
            .with_workers(w);
        solver::solve(&m, &cfg).unwrap().best
    };
    let one = run(1);
    for w in [2, 3, 8] {
        assert_eq!(run(w), one);
    }
}
