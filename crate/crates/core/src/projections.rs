//! Exact maximizers of `aᵀu` over the supported feasible sets.
//!
//! Every operator returns a unit-norm vector. Ties are resolved toward the
//! lowest index (or the group holding the lowest index), which makes the
//! output a deterministic function of the input.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dense::norm2;
use crate::error::{Error, Result};

/// The input vector carried no mass on any admissible support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("projection input is zero on every admissible support")]
pub struct ZeroInput;

impl From<ZeroInput> for Error {
    fn from(_: ZeroInput) -> Self {
        Error::ZeroInput
    }
}

/// Unit vector stored by its nonzero entries, indices strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from (index, value) pairs; panics on unsorted or out-of-range
    /// indices.
    pub fn from_pairs(dim: usize, pairs: &[(usize, f64)]) -> Self {
        assert!(
            pairs.windows(2).all(|w| w[0].0 < w[1].0),
            "indices must increase"
        );
        assert!(pairs.iter().all(|p| p.0 < dim), "index out of range");
        Self {
            dim,
            indices: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(a: &[f64]) -> Self {
        let mut out = Self::empty(a.len());
        for (i, &v) in a.iter().enumerate() {
            if v != 0.0 {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn to_pairs(&self) -> Vec<(usize, f64)> {
        self.pairs().collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.pairs() {
            out[i] = v;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    /// `aᵀ·self` for dense `a`.
    pub fn dot_dense(&self, a: &[f64]) -> f64 {
        self.pairs().map(|(i, v)| a[i] * v).sum()
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.indices.binary_search(&i) {
            Ok(k) => self.values[k],
            Err(_) => 0.0,
        }
    }

    pub fn negate(&mut self) {
        self.values.iter_mut().for_each(|v| *v = -*v);
    }

    fn clear(&mut self, dim: usize) {
        self.dim = dim;
        self.indices.clear();
        self.values.clear();
    }

    /// Copies `a` restricted to the sorted index list `support`, drops exact
    /// zeros and rescales to unit norm.
    fn fill_normalized(
        &mut self,
        a: &[f64],
        support: impl Iterator<Item = usize>,
    ) -> Result<(), ZeroInput> {
        self.clear(a.len());
        for i in support {
            if a[i] != 0.0 {
                self.indices.push(i);
                self.values.push(a[i]);
            }
        }
        let n = norm2(&self.values);
        if n == 0.0 || !n.is_finite() {
            self.clear(a.len());
            return Err(ZeroInput);
        }
        self.values.iter_mut().for_each(|v| *v /= n);
        Ok(())
    }

    /// Joint sign convention: flips so the largest-magnitude entry (lowest
    /// index on ties) is positive. Returns whether a flip happened.
    pub fn canonicalize_sign(&mut self) -> bool {
        let lead = crate::dense::argmax_abs(&self.values);
        match lead {
            Some(k) if self.values[k] < 0.0 => {
                self.negate();
                true
            }
            _ => false,
        }
    }
}

/// Disjoint groups covering `0..dim`, validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groups {
    dim: usize,
    /// Each group sorted ascending; groups ordered by smallest member.
    groups: Vec<Vec<usize>>,
}

impl Groups {
    pub fn new(dim: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; dim];
        let mut groups: Vec<Vec<usize>> = groups
            .into_iter()
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect();
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Constraint("empty group".into()));
            }
            for &i in g {
                if i >= dim {
                    return Err(Error::Constraint(format!("index {i} outside 0..{dim}")));
                }
                if seen[i] {
                    return Err(Error::Constraint(format!(
                        "index {i} appears in two groups"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Constraint(format!("index {i} belongs to no group")));
        }
        groups.sort_by_key(|g| g[0]);
        Ok(Self { dim, groups })
    }

    /// Parses one group per line, comma-separated 0-based indices. Blank
    /// lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let mut groups = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let g = line
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(k + 1, format!("bad group index: {e}")))?;
            groups.push(g);
        }
        Self::new(dim, groups)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// Declarative description of a feasible set.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSpec {
    /// Unit vectors with at most `s` nonzeros.
    Sparse { s: usize },
    /// The whole unit sphere.
    Unit,
    /// Unit vectors supported on at most `g` of the given groups.
    GroupSparse { groups: Groups, g: usize },
}

impl ConstraintSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            ConstraintSpec::Sparse { s } => {
                if *s == 0 || *s > dim {
                    return Err(Error::Constraint(format!("sparsity {s} outside 1..={dim}")));
                }
            }
            ConstraintSpec::Unit => {}
            ConstraintSpec::GroupSparse { groups, g } => {
                if groups.dim() != dim {
                    return Err(Error::Constraint(format!(
                        "groups cover {} variables, expected {dim}",
                        groups.dim()
                    )));
                }
                if *g == 0 || *g > groups.len() {
                    return Err(Error::Constraint(format!(
                        "group budget {g} outside 1..={}",
                        groups.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Resolves the spec into a projection operator for vectors of length `dim`.
    pub fn resolve(&self, dim: usize) -> Result<Box<dyn Projection>> {
        self.validate(dim)?;
        Ok(match self {
            ConstraintSpec::Sparse { s } => Box::new(SparseUnit { dim, s: *s }),
            ConstraintSpec::Unit => Box::new(UnitSphere { dim }),
            ConstraintSpec::GroupSparse { groups, g } => Box::new(GroupSparseUnit {
                groups: groups.clone(),
                g: *g,
            }),
        })
    }

    /// Upper bound on the number of nonzeros of a feasible vector.
    pub fn max_nnz(&self, dim: usize) -> usize {
        match self {
            ConstraintSpec::Sparse { s } => *s,
            ConstraintSpec::Unit => dim,
            ConstraintSpec::GroupSparse { groups, g } => {
                let mut sizes: Vec<usize> = groups.groups().iter().map(Vec::len).collect();
                sizes.sort_unstable_by(|a, b| b.cmp(a));
                sizes.iter().take(*g).sum()
            }
        }
    }
}

impl fmt::Display for ConstraintSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSpec::Sparse { s } => write!(f, "sparse:{s}"),
            ConstraintSpec::Unit => write!(f, "unit"),
            ConstraintSpec::GroupSparse { groups, g } => {
                write!(f, "groups({} groups):{g}", groups.len())
            }
        }
    }
}

/// Reusable buffers for [`Projection::project_into`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    order: Vec<usize>,
    support: Vec<usize>,
    norms: Vec<f64>,
}

/// Exact maximizer of `aᵀu` over one feasible set.
///
/// Every feasible set here is a union of coordinate subspaces, so the
/// maximizer is `a` restricted to a support and rescaled to unit norm.
pub trait Projection: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Sorted support of the maximizer, or `None` when it is every
    /// coordinate. The slice borrows from `scratch`.
    fn support_into<'s>(&self, a: &[f64], scratch: &'s mut Scratch) -> Option<&'s [usize]>;

    /// Writes the maximizer into `out`, reusing `scratch`.
    fn project_into(
        &self,
        a: &[f64],
        scratch: &mut Scratch,
        out: &mut SparseVector,
    ) -> Result<(), ZeroInput> {
        match self.support_into(a, scratch) {
            Some(support) => out.fill_normalized(a, support.iter().copied()),
            None => out.fill_normalized(a, 0..a.len()),
        }
    }

    fn project(&self, a: &[f64]) -> Result<SparseVector, ZeroInput> {
        let mut out = SparseVector::empty(a.len());
        self.project_into(a, &mut Scratch::default(), &mut out)?;
        Ok(out)
    }
}

/// `Σ aᵢ²` over a support as returned by [`Projection::support_into`].
#[inline]
pub fn sq_norm_on(a: &[f64], support: Option<&[usize]>) -> f64 {
    match support {
        Some(idx) => idx.iter().map(|&i| a[i] * a[i]).sum(),
        None => a.iter().map(|x| x * x).sum(),
    }
}

#[derive(Debug, Clone)]
pub struct SparseUnit {
    dim: usize,
    s: usize,
}

#[derive(Debug, Clone)]
pub struct UnitSphere {
    dim: usize,
}

#[derive(Debug, Clone)]
pub struct GroupSparseUnit {
    groups: Groups,
    g: usize,
}

/// Descending magnitude, ascending index on ties. A strict total order.
#[inline]
fn by_magnitude(a: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| a[j].abs().total_cmp(&a[i].abs()).then(i.cmp(&j))
}

/// Budgets up to this size keep a sorted top-`s` buffer on the stack while
/// scanning once; larger budgets use selection.
const SMALL_BUDGET: usize = 8;

/// Top `s` indices of `a` in [`by_magnitude`] order (for finite `a`), written
/// to `top` in ascending index order. Requires `1 ≤ s ≤ min(SMALL_BUDGET, a.len())`.
#[inline]
fn top_small(a: &[f64], s: usize, top: &mut Vec<usize>) {
    let mut mag = [f64::NEG_INFINITY; SMALL_BUDGET];
    let mut idx = [0usize; SMALL_BUDGET];
    let (mag, idx) = (&mut mag[..s], &mut idx[..s]);
    for (i, x) in a.iter().enumerate() {
        let x = x.abs();
        // indices arrive ascending, so an equal magnitude never displaces
        if x <= mag[s - 1] {
            continue;
        }
        let mut k = s - 1;
        while k > 0 && mag[k - 1] < x {
            mag[k] = mag[k - 1];
            idx[k] = idx[k - 1];
            k -= 1;
        }
        mag[k] = x;
        idx[k] = i;
    }
    for k in 1..s {
        let v = idx[k];
        let mut j = k;
        while j > 0 && idx[j - 1] > v {
            idx[j] = idx[j - 1];
            j -= 1;
        }
        idx[j] = v;
    }
    top.clear();
    for &i in idx.iter() {
        top.push(i);
    }
}

impl Projection for SparseUnit {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support_into<'s>(&self, a: &[f64], scratch: &'s mut Scratch) -> Option<&'s [usize]> {
        debug_assert_eq!(a.len(), self.dim);
        if self.s >= a.len() {
            return None;
        }
        let support = &mut scratch.support;
        if self.s <= SMALL_BUDGET {
            top_small(a, self.s, support);
            return Some(support);
        } else {
            support.clear();
            let order = &mut scratch.order;
            order.clear();
            order.extend(0..a.len());
            // expected linear time selection of the top s
            order.select_nth_unstable_by(self.s - 1, by_magnitude(a));
            support.extend_from_slice(&order[..self.s]);
        }
        support.sort_unstable();
        Some(support)
    }
}

impl Projection for UnitSphere {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support_into<'s>(&self, a: &[f64], _scratch: &'s mut Scratch) -> Option<&'s [usize]> {
        debug_assert_eq!(a.len(), self.dim);
        None
    }
}

impl Projection for GroupSparseUnit {
    fn dim(&self) -> usize {
        self.groups.dim()
    }

    fn support_into<'s>(&self, a: &[f64], scratch: &'s mut Scratch) -> Option<&'s [usize]> {
        debug_assert_eq!(a.len(), self.groups.dim());
        let groups = self.groups.groups();
        if self.g >= groups.len() {
            return None;
        }
        let norms = &mut scratch.norms;
        norms.clear();
        norms.extend(
            groups
                .iter()
                .map(|g| g.iter().map(|&i| a[i] * a[i]).sum::<f64>()),
        );
        let order = &mut scratch.order;
        order.clear();
        order.extend(0..groups.len());
        // groups are stored by smallest member, so position breaks ties
        order.select_nth_unstable_by(self.g - 1, |&i, &j| {
            norms[j].total_cmp(&norms[i]).then(i.cmp(&j))
        });
        let support = &mut scratch.support;
        support.clear();
        for &k in &order[..self.g] {
            support.extend_from_slice(&groups[k]);
        }
        support.sort_unstable();
        Some(support)
    }
}

/// Keeps the `s` largest-magnitude entries of `a` and rescales to unit norm.
pub fn project_sparse_unit(a: &[f64], s: usize) -> Result<SparseVector> {
    let p = ConstraintSpec::Sparse { s }.resolve(a.len())?;
    Ok(p.project(a)?)
}

/// `a / ‖a‖₂`.
pub fn project_unit(a: &[f64]) -> Result<SparseVector> {
    Ok(UnitSphere { dim: a.len() }.project(a)?)
}

/// Keeps the `g` groups of largest restricted norm and rescales.
pub fn project_group_sparse_unit(a: &[f64], groups: &Groups, g: usize) -> Result<SparseVector> {
    let p = ConstraintSpec::GroupSparse {
        groups: groups.clone(),
        g,
    }
    .resolve(a.len())?;
    Ok(p.project(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn is_zero_input(r: Result<SparseVector>) -> bool {
        matches!(r, Err(Error::ZeroInput))
    }

    #[test]
    fn sparse_examples() {
        let u = project_sparse_unit(&[3.0, 0.0, -4.0], 1).unwrap();
        assert_eq!(u.to_pairs(), vec![(2, -1.0)]);

        let u = project_sparse_unit(&[3.0, 0.0, -4.0], 3).unwrap();
        assert_eq!(u.indices(), &[0, 2]);
        assert_abs_diff_eq!(u.values()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(u.values()[1], -0.8, epsilon = 1e-15);

        let u = project_sparse_unit(&[1.0, -1.0, 0.0], 1).unwrap();
        assert_eq!(u.to_pairs(), vec![(0, 1.0)]);
    }

    #[test]
    fn sparse_rejects_zero_and_bad_budget() {
        assert!(is_zero_input(project_sparse_unit(&[0.0, 0.0], 1)));
        assert!(matches!(
            project_sparse_unit(&[1.0], 2),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            project_sparse_unit(&[1.0], 0),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn unit_examples() {
        let u = project_unit(&[3.0, 4.0]).unwrap();
        assert_eq!(u.to_dense(), vec![0.6, 0.8]);
        let a = [0.6, 0.8];
        let u = project_unit(&a).unwrap();
        for (x, y) in u.to_dense().iter().zip(&a) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
        assert!(is_zero_input(project_unit(&[0.0, 0.0])));
    }

    #[test]
    fn group_examples() {
        let groups = Groups::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let u = project_group_sparse_unit(&[1.0, 1.0, 3.0, 0.0], &groups, 1).unwrap();
        assert_eq!(u.to_pairs(), vec![(2, 1.0)]);

        let a = [1.0, 2.0, 2.0, 4.0];
        let u = project_group_sparse_unit(&a, &groups, 2).unwrap();
        assert_eq!(u.to_dense(), vec![0.2, 0.4, 0.4, 0.8]);

        // equal group norms: the group holding index 0 wins
        let u = project_group_sparse_unit(&[0.0, 2.0, 2.0, 0.0], &groups, 1).unwrap();
        assert_eq!(u.to_pairs(), vec![(1, 1.0)]);
    }

    #[test]
    fn groups_validation() {
        assert!(Groups::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Groups::new(3, vec![vec![0, 1]]).is_err());
        assert!(Groups::new(3, vec![vec![0, 1], vec![3]]).is_err());
        assert!(Groups::new(2, vec![vec![0], vec![]]).is_err());
        let g = Groups::parse("# groups\n2, 3\n\n0,1\n", 4).unwrap();
        assert_eq!(g.groups(), &[vec![0, 1], vec![2, 3]]);
        assert!(matches!(
            Groups::parse("0,x\n", 2),
            Err(Error::Parse { line: 1, .. })
        ));
        let spec = ConstraintSpec::GroupSparse { groups: g, g: 3 };
        assert!(spec.validate(4).is_err());
    }

    #[test]
    fn max_nnz_per_kind() {
        assert_eq!(ConstraintSpec::Sparse { s: 3 }.max_nnz(10), 3);
        assert_eq!(ConstraintSpec::Unit.max_nnz(10), 10);
        let groups = Groups::new(5, vec![vec![0], vec![1, 2, 3], vec![4]]).unwrap();
        assert_eq!(ConstraintSpec::GroupSparse { groups, g: 2 }.max_nnz(5), 4);
    }

    /// Best support by enumeration, lexicographically first among ties.
    fn brute_sparse(a: &[f64], s: usize) -> Vec<f64> {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for support in (0..a.len()).combinations(s) {
            let val: f64 = support.iter().map(|&i| a[i] * a[i]).sum();
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, support));
            }
        }
        let (val, support) = best.unwrap();
        let mut out = vec![0.0; a.len()];
        for i in support {
            out[i] = a[i] / val.sqrt();
        }
        out
    }

    #[test]
    fn sparse_matches_enumeration_d10_s3() {
        let mut g = crate::rng::stream(3, 1, 0);
        use rand_distr::{Distribution, StandardNormal};
        for _ in 0..50 {
            let a: Vec<f64> = (0..10).map(|_| StandardNormal.sample(&mut g)).collect();
            let got = project_sparse_unit(&a, 3).unwrap().to_dense();
            let want = brute_sparse(&a, 3);
            for (x, y) in got.iter().zip(&want) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn selection_is_linear_time_on_large_input() {
        let n = 10_000_000;
        let a: Vec<f64> = (0..n)
            .map(|i| ((i as f64) * 0.618_033_988_75).fract() - 0.5)
            .collect();
        let p = SparseUnit { dim: n, s: 1000 };
        let mut out = SparseVector::empty(n);
        let mut scratch = Scratch::default();
        let start = std::time::Instant::now();
        p.project_into(&a, &mut scratch, &mut out).unwrap();
        let elapsed = start.elapsed();
        assert_eq!(out.nnz(), 1000);
        assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    }

    proptest! {
        #[test]
        fn small_and_large_budgets_pick_the_same_support(
            a in prop::collection::vec(-3i32..=3, 1..128),
            s in 1usize..=2 * SMALL_BUDGET,
        ) {
            // small integers force plenty of magnitude ties
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let s = s.min(a.len());
            let mut order: Vec<usize> = (0..a.len()).collect();
            order.sort_by(by_magnitude(&a));
            let mut want = order[..s].to_vec();
            want.sort_unstable();
            let p = SparseUnit { dim: a.len(), s };
            let mut scratch = Scratch::default();
            let got = p.support_into(&a, &mut scratch).map_or_else(|| (0..a.len()).collect(), <[usize]>::to_vec);
            prop_assert_eq!(got, want);
        }
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 1..40)
            .prop_filter("nonzero", |v| v.iter().any(|x| *x != 0.0))
    }

    proptest! {
        #[test]
        fn outputs_are_unit_and_within_budget(a in vec_strategy(), s_frac in 0.0f64..1.0) {
            let s = 1 + ((a.len() - 1) as f64 * s_frac) as usize;
            let u = project_sparse_unit(&a, s).unwrap();
            prop_assert!((u.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(u.nnz() <= s);
            prop_assert!(u.indices().windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn scale_equivariance(a in vec_strategy(), s_frac in 0.0f64..1.0, exp in -20i32..20, lam in 0.01f64..100.0) {
            let s = 1 + ((a.len() - 1) as f64 * s_frac) as usize;
            let u = project_sparse_unit(&a, s).unwrap();
            let pow2 = 2f64.powi(exp);
            let scaled: Vec<f64> = a.iter().map(|x| x * pow2).collect();
            prop_assert_eq!(&project_sparse_unit(&scaled, s).unwrap(), &u);
            let scaled: Vec<f64> = a.iter().map(|x| x * lam).collect();
            let w = project_sparse_unit(&scaled, s).unwrap();
            prop_assert_eq!(w.indices(), u.indices());
            for (x, y) in w.values().iter().zip(u.values()) {
                prop_assert!((x - y).abs() <= 1e-14);
            }
        }

        #[test]
        fn beats_random_feasible_points(a in prop::collection::vec(-5.0f64..5.0, 4..12), seed in any::<u64>()) {
            prop_assume!(a.iter().any(|x| *x != 0.0));
            let s = 2;
            let u = project_sparse_unit(&a, s).unwrap();
            let best = u.dot_dense(&a);
            let mut g = crate::rng::stream(seed, 2, 0);
            use rand::Rng;
            use rand_distr::{Distribution, StandardNormal};
            for _ in 0..200 {
                let i = g.random_range(0..a.len());
                let j = (i + g.random_range(1..a.len())) % a.len();
                let (x, y): (f64, f64) = (StandardNormal.sample(&mut g), StandardNormal.sample(&mut g));
                let n = (x * x + y * y).sqrt();
                let val = (a[i] * x + a[j] * y) / n;
                prop_assert!(val <= best + 1e-12);
            }
        }
    }
}
