//! Reference solvers: exhaustive support enumeration and hard thresholding.
//!
//! The exhaustive oracle enumerates every admissible support pair, takes the
//! leading singular pair of the restricted block and keeps the best; it is
//! exact but combinatorial. Thresholding truncates the unconstrained leading
//! singular vectors.

use itertools::Itertools;

use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::linalg::{self, jacobi};
use crate::matrix_io::CrossCov;
use crate::projections::{ConstraintSpec, SparseVector};
use crate::solver::bilinear;

/// Default cap on the number of support pairs the exhaustive oracle visits.
pub const DEFAULT_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub u: SparseVector,
    pub v: SparseVector,
    pub objective: f64,
    pub supports_examined: u64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of maximal supports admitted by `spec` in dimension `dim`.
pub fn support_count(spec: &ConstraintSpec, dim: usize) -> u128 {
    match spec {
        ConstraintSpec::Sparse { s } => binomial(dim, *s),
        ConstraintSpec::Unit => 1,
        ConstraintSpec::GroupSparse { groups, g } => binomial(groups.len(), *g),
    }
}

/// Maximal supports in lexicographic order. Smaller supports are never
/// needed: the top singular value of a block only grows when rows or
/// columns are added.
fn supports(spec: &ConstraintSpec, dim: usize) -> Vec<Vec<usize>> {
    match spec {
        ConstraintSpec::Sparse { s } => (0..dim).combinations(*s).collect(),
        ConstraintSpec::Unit => vec![(0..dim).collect()],
        ConstraintSpec::GroupSparse { groups, g } => (0..groups.len())
            .combinations(*g)
            .map(|pick| {
                let mut idx: Vec<usize> = pick
                    .iter()
                    .flat_map(|&k| groups.groups()[k].iter().copied())
                    .collect();
                idx.sort_unstable();
                idx
            })
            .collect(),
    }
}

struct BlockBest {
    sigma: f64,
    rows: Vec<usize>,
    cols: Vec<usize>,
    u: Vec<f64>,
    v: Vec<f64>,
}

fn scan(m: &Matrix, row_sets: &[Vec<usize>], col_sets: &[Vec<usize>]) -> Option<BlockBest> {
    let mut best: Option<BlockBest> = None;
    for rows in row_sets {
        for cols in col_sets {
            let block = m.select(rows, cols);
            let (sigma, u, v) = jacobi::top_singular_triplet(&block);
            if best.as_ref().is_none_or(|b| sigma > b.sigma) {
                best = Some(BlockBest {
                    sigma,
                    rows: rows.clone(),
                    cols: cols.clone(),
                    u,
                    v,
                });
            }
        }
    }
    best
}

fn embed(dim: usize, idx: &[usize], vals: &[f64]) -> SparseVector {
    let pairs: Vec<(usize, f64)> = idx
        .iter()
        .copied()
        .zip(vals.iter().copied())
        .filter(|p| p.1 != 0.0)
        .collect();
    SparseVector::from_pairs(dim, &pairs)
}

/// Exhaustive search over every pair of admissible supports.
///
/// Ties resolve toward the lexicographically smaller `(I, J)`. The support
/// space is split into contiguous chunks of row supports scanned in parallel
/// and reduced in chunk order, so the answer does not depend on `workers`.
pub fn exhaustive_constrained(
    m: &CrossCov,
    constraint_u: &ConstraintSpec,
    constraint_v: &ConstraintSpec,
    limit: u128,
    workers: usize,
) -> Result<OracleResult> {
    constraint_u.validate(m.m())?;
    constraint_v.validate(m.n())?;
    let pairs =
        support_count(constraint_u, m.m()).saturating_mul(support_count(constraint_v, m.n()));
    if pairs > limit {
        return Err(Error::Capacity {
            what: format!("exhaustive search (limit {limit})"),
            required: format!("{pairs} support pairs"),
        });
    }
    let row_sets = supports(constraint_u, m.m());
    let col_sets = supports(constraint_v, m.n());

    let workers = workers.clamp(1, row_sets.len());
    let chunk = row_sets.len().div_ceil(workers);
    let results: Vec<Option<BlockBest>> = if workers == 1 {
        vec![scan(m.matrix(), &row_sets, &col_sets)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = row_sets
                .chunks(chunk)
                .map(|rows| {
                    let col_sets = &col_sets;
                    scope.spawn(move || scan(m.matrix(), rows, col_sets))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("oracle worker panicked"))
                .collect()
        })
    };

    let mut best: Option<BlockBest> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r.sigma > b.sigma) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one support pair");
    let mut u = embed(m.m(), &best.rows, &best.u);
    let mut v = embed(m.n(), &best.cols, &best.v);
    if u.canonicalize_sign() {
        v.negate();
    }
    let objective = bilinear(m, &u, &v);
    Ok(OracleResult {
        u,
        v,
        objective,
        supports_examined: pairs as u64,
    })
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Exhaustive search with cardinality budgets on both sides.
pub fn exhaustive_cca(m: &CrossCov, s_x: usize, s_y: usize, limit: u128) -> Result<OracleResult> {
    exhaustive_constrained(
        m,
        &ConstraintSpec::Sparse { s: s_x },
        &ConstraintSpec::Sparse { s: s_y },
        limit,
        default_workers(),
    )
}

/// Exhaustive search over `u` supports with `v` free on the unit sphere; for
/// each row support the best `v` is the top right singular vector.
pub fn exhaustive_sparse_unit(m: &CrossCov, s_x: usize, limit: u128) -> Result<OracleResult> {
    exhaustive_constrained(
        m,
        &ConstraintSpec::Sparse { s: s_x },
        &ConstraintSpec::Unit,
        limit,
        default_workers(),
    )
}

/// Projects the leading singular vectors of `m` onto the two feasible sets.
pub fn threshold_constrained(
    m: &CrossCov,
    constraint_u: &ConstraintSpec,
    constraint_v: &ConstraintSpec,
) -> Result<OracleResult> {
    let pu = constraint_u.resolve(m.m())?;
    let pv = constraint_v.resolve(m.n())?;
    let (_, u1, v1) = linalg::top_singular_triplet(m);
    let mut u = pu.project(&u1)?;
    let mut v = pv.project(&v1)?;
    if u.canonicalize_sign() {
        v.negate();
    }
    let objective = bilinear(m, &u, &v);
    Ok(OracleResult {
        u,
        v,
        objective,
        supports_examined: 1,
    })
}

/// Hard-thresholds the leading singular pair to `s_x` and `s_y` entries.
pub fn threshold_cca(m: &CrossCov, s_x: usize, s_y: usize) -> Result<OracleResult> {
    threshold_constrained(
        m,
        &ConstraintSpec::Sparse { s: s_x },
        &ConstraintSpec::Sparse { s: s_y },
    )
}

fn is_psd(a: &Matrix) -> bool {
    let n = a.rows();
    let scale = jacobi::svd(a).s[0];
    let shift = 1e-10 * scale;
    // Cholesky of A + shift·I
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)] + shift - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if d < 0.0 {
            return false;
        }
        if d == 0.0 {
            d = f64::MIN_POSITIVE;
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let s = a[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / ljj;
        }
    }
    true
}

/// For symmetric PSD `a` the optimal sparse pair is symmetric: checks that the
/// exhaustive optimum with equal budgets `k` satisfies `u = ±v`.
pub fn psd_symmetry_check(a: &CrossCov, k: usize) -> Result<bool> {
    let n = a.m();
    if a.n() != n {
        return Err(Error::Precondition(format!(
            "matrix is {}x{}, not square",
            n,
            a.n()
        )));
    }
    let tol = 1e-12 * a.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return Err(Error::Precondition(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    if !is_psd(a.matrix()) {
        return Err(Error::Precondition(
            "matrix is not positive semidefinite".into(),
        ));
    }
    let best = exhaustive_cca(a, k, k, DEFAULT_LIMIT)?;
    let (u, v) = (best.u.to_dense(), best.v.to_dense());
    let same = u.iter().zip(&v).all(|(x, y)| (x - y).abs() <= 1e-8);
    let opposite = u.iter().zip(&v).all(|(x, y)| (x + y).abs() <= 1e-8);
    Ok(same || opposite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::Groups;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn seeded(rows: usize, cols: usize, seed: u64) -> CrossCov {
        let mut g = rng::stream(seed, 1234, 0);
        CrossCov::new(Matrix::from_fn(rows, cols, |_, _| {
            StandardNormal.sample(&mut g)
        }))
        .unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
        assert_eq!(binomial(4000, 2000), u128::MAX);
    }

    #[test]
    fn exhaustive_scalar_blocks() {
        let m = CrossCov::from_rows(&[[2.0, 0.0], [0.0, 1.0]]);
        let r = exhaustive_cca(&m, 1, 1, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.u.to_pairs(), vec![(0, 1.0)]);
        assert_eq!(r.v.to_pairs(), vec![(0, 1.0)]);
        assert_eq!(r.objective, 2.0);
        assert_eq!(r.supports_examined, 4);

        let m = CrossCov::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let r = exhaustive_cca(&m, 1, 1, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.u.indices(), &[1]);
        assert_eq!(r.v.indices(), &[1]);
        assert_eq!(r.objective, 4.0);
    }

    #[test]
    fn exhaustive_full_budget_is_sigma1() {
        let m = seeded(6, 5, 1);
        let r = exhaustive_cca(&m, 6, 5, DEFAULT_LIMIT).unwrap();
        let s1 = jacobi::svd(m.matrix()).s[0];
        assert_abs_diff_eq!(r.objective, s1, epsilon = 1e-8);
    }

    #[test]
    fn exhaustive_capacity_guard() {
        let m = seeded(30, 30, 2);
        match exhaustive_cca(&m, 10, 10, DEFAULT_LIMIT) {
            Err(Error::Capacity { required, .. }) => assert!(required.contains("support pairs")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn exhaustive_is_independent_of_workers() {
        let m = seeded(9, 7, 3);
        let cu = ConstraintSpec::Sparse { s: 3 };
        let cv = ConstraintSpec::Sparse { s: 2 };
        let one = exhaustive_constrained(&m, &cu, &cv, DEFAULT_LIMIT, 1).unwrap();
        for w in [2, 5, 84, 1000] {
            assert_eq!(
                exhaustive_constrained(&m, &cu, &cv, DEFAULT_LIMIT, w).unwrap(),
                one
            );
        }
    }

    #[test]
    fn exhaustive_group_and_unit_variants() {
        let m = seeded(6, 4, 4);
        let groups = Groups::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let cu = ConstraintSpec::GroupSparse { groups, g: 3 };
        let r = exhaustive_constrained(&m, &cu, &ConstraintSpec::Unit, DEFAULT_LIMIT, 1).unwrap();
        assert_abs_diff_eq!(r.objective, jacobi::svd(m.matrix()).s[0], epsilon = 1e-10);

        let r = exhaustive_sparse_unit(&m, 2, DEFAULT_LIMIT).unwrap();
        assert!(r.u.nnz() <= 2);
        assert_eq!(r.supports_examined, 15);
    }

    #[test]
    fn threshold_examples() {
        let m = CrossCov::new(Matrix::from_diag(3, 3, &[3.0, 2.0, 1.0])).unwrap();
        let r = threshold_cca(&m, 1, 1).unwrap();
        assert_eq!(r.u.indices(), &[0]);
        assert_eq!(r.v.indices(), &[0]);
        assert_abs_diff_eq!(r.objective, 3.0, epsilon = 1e-15);

        let m = seeded(7, 5, 5);
        let r = threshold_cca(&m, 7, 5).unwrap();
        assert_abs_diff_eq!(r.objective, jacobi::svd(m.matrix()).s[0], epsilon = 1e-8);
    }

    #[test]
    fn threshold_never_beats_exhaustive() {
        for seed in 0..20 {
            let m = seeded(8, 6, 100 + seed);
            let t = threshold_cca(&m, 2, 2).unwrap();
            let e = exhaustive_cca(&m, 2, 2, DEFAULT_LIMIT).unwrap();
            assert!(t.objective <= e.objective + 1e-12);
        }
    }

    #[test]
    fn psd_checks() {
        let eye = CrossCov::new(Matrix::identity(3)).unwrap();
        assert!(psd_symmetry_check(&eye, 1).unwrap());
        let best = exhaustive_cca(&eye, 1, 1, DEFAULT_LIMIT).unwrap();
        assert_eq!(best.u.to_pairs(), vec![(0, 1.0)]);
        assert_eq!(best.v.to_pairs(), vec![(0, 1.0)]);

        let skew = CrossCov::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!(matches!(
            psd_symmetry_check(&skew, 1),
            Err(Error::Precondition(_))
        ));
        let indefinite = CrossCov::from_rows(&[[1.0, 2.0], [2.0, 1.0]]);
        assert!(matches!(
            psd_symmetry_check(&indefinite, 1),
            Err(Error::Precondition(_))
        ));
        let rect = seeded(3, 2, 0);
        assert!(matches!(
            psd_symmetry_check(&rect, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn psd_gram_matrix() {
        let g = seeded(4, 4, 9);
        let a = CrossCov::new(g.t_matmul(g.matrix())).unwrap();
        assert!(psd_symmetry_check(&a, 2).unwrap());
    }
}
