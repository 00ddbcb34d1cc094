//! Randomized truncated SVD and the factor-space products used by the solver.

pub mod jacobi;

use rand_distr::{Distribution, StandardNormal};

use crate::dense::{argmax_abs, axpy, dot, norm2, Matrix};
use crate::error::{Error, Result};
use crate::matrix_io::CrossCov;
use crate::rng;

pub use jacobi::{svd as dense_svd, DenseSvd};

/// Rank-r factors `U·diag(S)·Vᵀ` of the surrogate matrix `B`.
///
/// `U` (m×r) and `V` (n×r) are stored row-major so the row of a single
/// variable is contiguous. The scaled products `U·S` and `V·S` are cached
/// for the per-round kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct RankRFactors {
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
    us: Vec<f64>,
    vs: Vec<f64>,
    /// Upper bound on `‖V‖₂` (1 up to rounding for orthonormal `V`).
    v_gain: f64,
}

impl RankRFactors {
    /// Assembles factors; checks shapes and the singular-value ordering.
    pub fn new(u: Matrix, s: Vec<f64>, v: Matrix) -> Result<Self> {
        let r = s.len();
        if r == 0 || u.cols() != r || v.cols() != r {
            return Err(Error::Shape(format!(
                "factor shapes U {:?}, S {}, V {:?} disagree",
                u.shape(),
                r,
                v.shape()
            )));
        }
        if s.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "singular values must be finite, nonnegative and non-increasing".into(),
            ));
        }
        let scale = |m: &Matrix| -> Vec<f64> {
            m.as_slice()
                .chunks_exact(r)
                .flat_map(|row| row.iter().zip(&s).map(|(x, sk)| x * sk))
                .collect()
        };
        let (us, vs) = (scale(&u), scale(&v));
        // ‖V‖₂² = ‖VᵀV‖₂ ≤ largest absolute row sum of VᵀV
        let gram = v.t_matmul(&v);
        let v_gain = (0..r)
            .map(|i| gram.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0_f64, f64::max)
            .sqrt();
        Ok(Self {
            u,
            s,
            v,
            us,
            vs,
            v_gain,
        })
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn m(&self) -> usize {
        self.u.rows()
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    /// Dense `B = U·diag(S)·Vᵀ`. Only for small problems and tests.
    pub fn materialize(&self) -> Matrix {
        let us = Matrix::from_fn(self.m(), self.rank(), |i, k| self.u[(i, k)] * self.s[k]);
        us.matmul(&self.v.transpose())
    }

    /// `out = U·diag(S)·c`.
    #[inline]
    pub fn left_apply_into(&self, c: &[f64], out: &mut [f64]) {
        rows_dot(&self.us, c, out);
    }

    /// `out = V·diag(S)·Uᵀ·x` where `x = scale·a` on `support` and zero
    /// elsewhere (`None` keeps every coordinate).
    #[inline]
    pub fn right_apply_restricted_into(
        &self,
        a: &[f64],
        support: Option<&[usize]>,
        scale: f64,
        coeff: &mut [f64],
        out: &mut [f64],
    ) {
        self.restricted_coeff_into(a, support, scale, coeff);
        self.right_from_coeff_into(coeff, out);
    }

    /// `coeff = scale·Uᵀ·a` with `a` restricted to `support`.
    #[inline]
    pub fn restricted_coeff_into(
        &self,
        a: &[f64],
        support: Option<&[usize]>,
        scale: f64,
        coeff: &mut [f64],
    ) {
        #[inline(always)]
        fn fixed<const R: usize>(
            u: &[f64],
            a: &[f64],
            support: Option<&[usize]>,
            scale: f64,
            coeff: &mut [f64],
        ) {
            let mut acc = [0.0; R];
            let mut add = |ai: f64, row: &[f64]| {
                let row: &[f64; R] = row.try_into().unwrap();
                for k in 0..R {
                    acc[k] += ai * row[k];
                }
            };
            match support {
                Some(idx) => idx.iter().for_each(|&i| add(a[i], &u[i * R..(i + 1) * R])),
                None => a
                    .iter()
                    .zip(u.chunks_exact(R))
                    .for_each(|(&ai, row)| add(ai, row)),
            }
            for (c, x) in coeff.iter_mut().zip(acc) {
                *c = x * scale;
            }
        }
        let u = self.u.as_slice();
        match self.rank() {
            1 => fixed::<1>(u, a, support, scale, coeff),
            2 => fixed::<2>(u, a, support, scale, coeff),
            3 => fixed::<3>(u, a, support, scale, coeff),
            4 => fixed::<4>(u, a, support, scale, coeff),
            5 => fixed::<5>(u, a, support, scale, coeff),
            6 => fixed::<6>(u, a, support, scale, coeff),
            7 => fixed::<7>(u, a, support, scale, coeff),
            8 => fixed::<8>(u, a, support, scale, coeff),
            r => {
                coeff.iter_mut().for_each(|x| *x = 0.0);
                match support {
                    Some(idx) => idx
                        .iter()
                        .for_each(|&i| axpy(a[i], &u[i * r..(i + 1) * r], coeff)),
                    None => a
                        .iter()
                        .zip(u.chunks_exact(r))
                        .for_each(|(&ai, row)| axpy(ai, row, coeff)),
                }
                coeff.iter_mut().for_each(|x| *x *= scale);
            }
        }
    }

    /// `out = V·diag(S)·Uᵀ·u` for `u` given by its nonzero entries.
    #[inline]
    pub fn right_apply_sparse_into(
        &self,
        idx: &[usize],
        vals: &[f64],
        coeff: &mut [f64],
        out: &mut [f64],
    ) {
        coeff.iter_mut().for_each(|x| *x = 0.0);
        for (&i, &ui) in idx.iter().zip(vals) {
            axpy(ui, self.u.row(i), coeff);
        }
        self.right_from_coeff_into(coeff, out);
    }

    /// Upper bound on `‖V·diag(S)·coeff‖`.
    #[inline]
    pub fn right_norm_bound(&self, coeff: &[f64]) -> f64 {
        let sq: f64 = coeff
            .iter()
            .zip(&self.s)
            .map(|(c, s)| (c * s) * (c * s))
            .sum();
        self.v_gain * sq.sqrt()
    }

    /// `out = V·diag(S)·coeff`.
    #[inline]
    pub fn right_from_coeff_into(&self, coeff: &[f64], out: &mut [f64]) {
        rows_dot(&self.vs, coeff, out);
    }
}

/// `out[i] = dot(row i of flat, x)` for row-major `flat` with `x.len()` columns.
#[inline]
fn rows_dot(flat: &[f64], x: &[f64], out: &mut [f64]) {
    // fixed widths unroll fully; the summation order matches `dot`
    #[inline(always)]
    fn fixed<const R: usize>(flat: &[f64], x: &[f64], out: &mut [f64]) {
        let x: &[f64; R] = x.try_into().unwrap();
        for (o, row) in out.iter_mut().zip(flat.chunks_exact(R)) {
            let row: &[f64; R] = row.try_into().unwrap();
            let mut acc = -0.0;
            for k in 0..R {
                acc += row[k] * x[k];
            }
            *o = acc;
        }
    }
    match x.len() {
        1 => fixed::<1>(flat, x, out),
        2 => fixed::<2>(flat, x, out),
        3 => fixed::<3>(flat, x, out),
        4 => fixed::<4>(flat, x, out),
        5 => fixed::<5>(flat, x, out),
        6 => fixed::<6>(flat, x, out),
        7 => fixed::<7>(flat, x, out),
        8 => fixed::<8>(flat, x, out),
        r => {
            for (o, row) in out.iter_mut().zip(flat.chunks_exact(r)) {
                *o = dot(row, x);
            }
        }
    }
}

/// Top singular value and the spectral norm of the truncation residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimates {
    pub sigma1: f64,
    pub sigma_r_plus_1: f64,
    pub r: usize,
}

/// Knobs of the randomized range finder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvdOptions {
    pub power_iters: usize,
    pub oversample: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            power_iters: 4,
            oversample: 8,
        }
    }
}

/// `U·diag(S)·c`.
pub fn left_apply(f: &RankRFactors, c: &[f64]) -> Result<Vec<f64>> {
    if c.len() != f.rank() {
        return Err(Error::Shape(format!(
            "coefficient vector has length {}, rank is {}",
            c.len(),
            f.rank()
        )));
    }
    let mut out = vec![0.0; f.m()];
    f.left_apply_into(c, &mut out);
    Ok(out)
}

/// `V·diag(S)·Uᵀ·u`, i.e. `Bᵀu`.
pub fn right_apply(f: &RankRFactors, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != f.m() {
        return Err(Error::Shape(format!(
            "vector has length {}, expected {}",
            u.len(),
            f.m()
        )));
    }
    let (idx, vals): (Vec<usize>, Vec<f64>) = u
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(i, &x)| (i, x))
        .unzip();
    let mut coeff = vec![0.0; f.rank()];
    let mut out = vec![0.0; f.n()];
    f.right_apply_sparse_into(&idx, &vals, &mut coeff, &mut out);
    Ok(out)
}

/// Orthonormalizes the columns of `y` in place (two Gram-Schmidt passes).
/// Columns that collapse are replaced by a completion of the basis.
fn orthonormalize(y: &Matrix) -> Matrix {
    let (rows, k) = y.shape();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| y.column(j)).collect();
    let scale = cols.iter().map(|c| norm2(c)).fold(0.0_f64, f64::max);
    let mut pending = Vec::new();
    for j in 0..k {
        let original = norm2(&cols[j]);
        for _ in 0..2 {
            for i in 0..j {
                if pending.contains(&i) {
                    continue;
                }
                let (done, rest) = cols.split_at_mut(j);
                let proj = dot(&done[i], &rest[0]);
                axpy(-proj, &done[i], &mut rest[0]);
            }
        }
        let n = norm2(&cols[j]);
        if n <= 1e-10 * original.max(scale) || n == 0.0 {
            cols[j].iter_mut().for_each(|x| *x = 0.0);
            pending.push(j);
        } else {
            cols[j].iter_mut().for_each(|x| *x /= n);
        }
    }
    jacobi::complete_orthonormal(&mut cols, &pending);
    Matrix::from_fn(rows, k, |i, j| cols[j][i])
}

/// Residual `‖A vᵢ − σᵢ uᵢ‖` accepted for every returned triplet, relative to σ₁.
const RITZ_TOL: f64 = 1e-7;
/// Extra subspace iterations allowed beyond `power_iters` while refining.
const MAX_REFINE: usize = 100;

/// Rank-`r` truncated SVD by randomized subspace iteration.
///
/// A Gaussian sketch of width `r + oversample` (capped at `min(m, n)`) is
/// refined by at least `power_iters` rounds of `MᵀM` power iteration, then
/// further until every leading triplet has residual `‖M vᵢ − σᵢ uᵢ‖ ≤ 1e-7·σ₁`
/// (at most 100 extra rounds). The small projected matrix is decomposed
/// exactly with one-sided Jacobi. Output is deterministic in
/// `(M, r, options, seed)`; each left vector is signed so its
/// largest-magnitude entry is positive.
pub fn truncated_svd(m: &CrossCov, r: usize, opts: SvdOptions, seed: u64) -> Result<RankRFactors> {
    let (rows, cols) = m.shape();
    let max = rows.min(cols);
    if r == 0 || r > max {
        return Err(Error::Rank { rank: r, max });
    }
    let k = (r + opts.oversample).min(max);
    let a = m.matrix();

    let mut g = rng::stream(seed, rng::DOMAIN_SKETCH, 0);
    let omega = Matrix::from_fn(cols, k, |_, _| StandardNormal.sample(&mut g));
    let mut q = orthonormalize(&a.matmul(&omega));
    for _ in 0..opts.power_iters {
        let z = orthonormalize(&a.t_matmul(&q));
        q = orthonormalize(&a.matmul(&z));
    }

    let mut extra = 0;
    let (left, d) = loop {
        // small = Qᵀ A (k × n); decompose its transpose, which is tall
        let small_t = a.t_matmul(&q);
        let d = jacobi::svd(&small_t);
        // small_tᵀ = d.v · S · d.uᵀ  =>  A ≈ (Q·d.v) · S · d.uᵀ
        let left = q.matmul(&d.v);
        if k == max || extra == MAX_REFINE || ritz_converged(a, &left, &d, r) {
            break (left, d);
        }
        q = orthonormalize(&a.matmul(&orthonormalize(&small_t)));
        extra += 1;
    };
    let mut u = Matrix::from_fn(rows, r, |i, j| left[(i, j)]);
    let mut v = Matrix::from_fn(cols, r, |i, j| d.u[(i, j)]);
    let s = d.s[..r].to_vec();

    for j in 0..r {
        let col = u.column(j);
        if let Some(i) = argmax_abs(&col) {
            if col[i] < 0.0 {
                for x in 0..rows {
                    u[(x, j)] = -u[(x, j)];
                }
                for x in 0..cols {
                    v[(x, j)] = -v[(x, j)];
                }
            }
        }
    }
    RankRFactors::new(u, s, v)
}

fn ritz_converged(a: &Matrix, left: &Matrix, d: &DenseSvd, r: usize) -> bool {
    let v = Matrix::from_fn(d.u.rows(), r, |i, j| d.u[(i, j)]);
    let av = a.matmul(&v);
    let tol = RITZ_TOL * d.s[0];
    (0..r).all(|j| {
        let res: f64 = (0..a.rows())
            .map(|i| (av[(i, j)] - d.s[j] * left[(i, j)]).powi(2))
            .sum();
        res.sqrt() <= tol
    })
}

/// Power-iteration estimate of `‖M − B‖₂`, never materializing `M − B`.
///
/// The value returned is `‖(M − B)x‖` for a unit vector `x`, so it never
/// exceeds the true norm beyond rounding.
pub fn residual_spectral_norm(m: &CrossCov, f: &RankRFactors, iters: usize, seed: u64) -> f64 {
    let a = m.matrix();
    let n = a.cols();
    let r = f.rank();
    let mut g = rng::stream(seed, rng::DOMAIN_RESIDUAL, 0);
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut g)).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut coeff = vec![0.0; r];
    // y = (M − B) x
    let apply = |x: &[f64], coeff: &mut [f64]| -> Vec<f64> {
        let mut y = a.mul_vec(x);
        for (k, c) in coeff.iter_mut().enumerate() {
            *c = f.s[k] * (0..n).map(|j| f.v[(j, k)] * x[j]).sum::<f64>();
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi -= dot(f.u.row(i), coeff);
        }
        y
    };
    // z = (M − B)ᵀ y
    let apply_t = |y: &[f64], coeff: &mut [f64]| -> Vec<f64> {
        let mut z = a.t_mul_vec(y);
        coeff.iter_mut().for_each(|c| *c = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            axpy(yi, f.u.row(i), coeff);
        }
        for (c, s) in coeff.iter_mut().zip(&f.s) {
            *c *= s;
        }
        for (j, zj) in z.iter_mut().enumerate() {
            *zj -= dot(f.v.row(j), coeff);
        }
        z
    };

    let mut estimate = norm2(&apply(&x, &mut coeff));
    for _ in 0..iters {
        let y = apply(&x, &mut coeff);
        let z = apply_t(&y, &mut coeff);
        let nz = norm2(&z);
        if nz == 0.0 || !nz.is_finite() {
            break;
        }
        x = z.into_iter().map(|v| v / nz).collect();
        estimate = estimate.max(norm2(&apply(&x, &mut coeff)));
    }
    estimate
}

/// σ₁ from the factors and the residual estimate for σ_{r+1}.
pub fn spectral_estimates(
    m: &CrossCov,
    f: &RankRFactors,
    iters: usize,
    seed: u64,
) -> SpectralEstimates {
    let sigma1 = f.s[0];
    let mut rest = residual_spectral_norm(m, f, iters, seed);
    if rest > sigma1 * (1.0 + 1e-8) && sigma1 > 0.0 {
        // only reachable when the sketch missed part of the top subspace
        rest = sigma1;
    }
    SpectralEstimates {
        sigma1,
        sigma_r_plus_1: rest,
        r: f.rank(),
    }
}

/// Leading singular triplet of `m`: dense Jacobi for small inputs, randomized
/// subspace iteration otherwise.
pub fn top_singular_triplet(m: &CrossCov) -> (f64, Vec<f64>, Vec<f64>) {
    if m.m().min(m.n()) <= 256 {
        jacobi::top_singular_triplet(m.matrix())
    } else {
        let f = truncated_svd(
            m,
            1,
            SvdOptions {
                power_iters: 30,
                oversample: 10,
            },
            0,
        )
        .expect("rank 1 is always admissible");
        (f.s[0], f.u.column(0), f.v.column(0))
    }
}
