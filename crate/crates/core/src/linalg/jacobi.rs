//! One-sided (Hestenes) Jacobi SVD for small dense matrices.

use crate::dense::{argmax_abs, dot, norm2, Matrix};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

/// Thin SVD `A = U·diag(S)·Vᵀ` with `p = min(rows, cols)` components.
#[derive(Debug, Clone)]
pub struct DenseSvd {
    /// rows × p, orthonormal columns.
    pub u: Matrix,
    /// Non-increasing, length p.
    pub s: Vec<f64>,
    /// cols × p, orthonormal columns.
    pub v: Matrix,
}

/// Thin SVD of `a` by one-sided Jacobi rotations.
///
/// Columns are ordered by non-increasing singular value (stable on ties) and
/// each left vector is signed so its largest-magnitude entry is positive; the
/// matching right vector is flipped with it. Directions belonging to zero
/// singular values are completed to an orthonormal set.
pub fn svd(a: &Matrix) -> DenseSvd {
    if a.rows() >= a.cols() {
        tall_svd(a)
    } else {
        let t = tall_svd(&a.transpose());
        let mut out = DenseSvd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
        canonicalize_signs(&mut out);
        out
    }
}

/// Largest singular value with its unit singular vectors.
pub fn top_singular_triplet(a: &Matrix) -> (f64, Vec<f64>, Vec<f64>) {
    let d = svd(a);
    (d.s[0], d.u.column(0), d.v.column(0))
}

fn tall_svd(a: &Matrix) -> DenseSvd {
    let (rows, cols) = a.shape();
    // columns of A and of the accumulated rotation, stored contiguously
    let mut w: Vec<Vec<f64>> = (0..cols).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = w.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let scale = sigma.iter().fold(0.0_f64, |m, &x| m.max(x));
    let zero_tol = scale * 1e-14 * (rows.max(cols) as f64);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut pending = Vec::new();
    let mut s_out = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        if sigma[j] > zero_tol && sigma[j] > 0.0 {
            u_cols.push(w[j].iter().map(|x| x / sigma[j]).collect());
            s_out.push(sigma[j]);
        } else {
            u_cols.push(vec![0.0; rows]);
            pending.push(k);
            s_out.push(0.0);
        }
    }
    complete_orthonormal(&mut u_cols, &pending);

    let mut out = DenseSvd {
        u: columns_to_matrix(rows, &u_cols),
        s: s_out,
        v: columns_to_matrix(
            cols,
            &order.iter().map(|&j| v[j].clone()).collect::<Vec<_>>(),
        ),
    };
    canonicalize_signs(&mut out);
    out
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (xp, xq) = (&mut lo[p], &mut hi[0]);
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let (ap, aq) = (*a, *b);
        *a = c * ap - s * aq;
        *b = s * ap + c * aq;
    }
}

fn columns_to_matrix(rows: usize, cols: &[Vec<f64>]) -> Matrix {
    Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Fills the columns listed in `pending` with unit vectors orthogonal to
/// every other column, trying canonical basis vectors in index order.
pub(crate) fn complete_orthonormal(cols: &mut [Vec<f64>], pending: &[usize]) {
    if pending.is_empty() {
        return;
    }
    let dim = cols[0].len();
    let mut candidate = 0usize;
    for &k in pending {
        loop {
            assert!(candidate < dim, "cannot complete orthonormal basis");
            let mut e = vec![0.0; dim];
            e[candidate] = 1.0;
            candidate += 1;
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for (j, c) in cols.iter().enumerate() {
                    if j == k || (pending.contains(&j) && c.iter().all(|&x| x == 0.0)) {
                        continue;
                    }
                    let proj = dot(c, &e);
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= proj * ci;
                    }
                }
            }
            let n = norm2(&e);
            if n > 1e-8 {
                cols[k] = e.into_iter().map(|x| x / n).collect();
                break;
            }
        }
    }
}

fn canonicalize_signs(d: &mut DenseSvd) {
    for j in 0..d.s.len() {
        let col = d.u.column(j);
        if let Some(i) = argmax_abs(&col) {
            if col[i] < 0.0 {
                for r in 0..d.u.rows() {
                    d.u[(r, j)] = -d.u[(r, j)];
                }
                for r in 0..d.v.rows() {
                    d.v[(r, j)] = -d.v[(r, j)];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn reconstruct(d: &DenseSvd) -> Matrix {
        let p = d.s.len();
        let us = Matrix::from_fn(d.u.rows(), p, |i, j| d.u[(i, j)] * d.s[j]);
        us.matmul(&d.v.transpose())
    }

    fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
    }

    fn ortho_residual(q: &Matrix) -> f64 {
        max_diff(&q.t_matmul(q), &Matrix::identity(q.cols()))
    }

    #[test]
    fn diagonal_matrix() {
        let a = Matrix::from_diag(3, 3, &[1.0, 3.0, 2.0]);
        let d = svd(&a);
        assert_eq!(d.s, vec![3.0, 2.0, 1.0]);
        assert_eq!(d.u.column(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(d.v.column(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn random_shapes_reconstruct() {
        let mut g = rng::stream(1, 99, 0);
        for &(r, c) in &[(7, 4), (4, 7), (1, 5), (5, 1), (6, 6)] {
            let a = Matrix::from_fn(r, c, |_, _| StandardNormal.sample(&mut g));
            let d = svd(&a);
            assert!(max_diff(&reconstruct(&d), &a) < 1e-12);
            assert!(ortho_residual(&d.u) < 1e-12);
            assert!(ortho_residual(&d.v) < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_and_zero_inputs_stay_orthonormal() {
        let zero = Matrix::zeros(4, 3);
        let d = svd(&zero);
        assert_eq!(d.s, vec![0.0; 3]);
        assert!(ortho_residual(&d.u) < 1e-12);
        assert!(ortho_residual(&d.v) < 1e-12);

        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]);
        let d = svd(&a);
        assert!(d.s[1].abs() < 1e-12);
        assert!(ortho_residual(&d.u) < 1e-12);
        assert!(max_diff(&reconstruct(&d), &a) < 1e-12);
    }

    #[test]
    fn top_vector_sign_is_canonical() {
        let a = Matrix::from_rows(&[[-2.0, 0.0], [0.0, 1.0]]);
        let (s, u, v) = top_singular_triplet(&a);
        assert_eq!(s, 2.0);
        assert_eq!(u, vec![1.0, 0.0]);
        assert_eq!(v, vec![-1.0, 0.0]);
    }
}
