//! Dense row-major matrices and the symmetric eigensolver.
//!
//! The eigensolver reduces a symmetric matrix to tridiagonal form with
//! Householder reflectors `H_k = I - tau_k v_k v_k^T` and then runs implicit
//! QL with Wilkinson shifts. Rotations act on the rows of a payload matrix.
//! With payload `Q^T` the rows end up as eigenvectors; with payload `Q^T X`
//! row `i` ends up as `u_i^T X`, which yields projections on eigenvectors
//! without ever forming them.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable views of rows `i < j`.
    fn two_rows_mut(&mut self, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(i < j);
        let c = self.cols;
        let (head, tail) = self.data.split_at_mut(j * c);
        (&mut head[i * c..(i + 1) * c], &mut tail[..c])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), dst);
                }
            }
        }
        out
    }

    /// `self^T self`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let a = row[i];
                if a != 0.0 {
                    axpy(a, row, g.row_mut(i));
                }
            }
        }
        g
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four accumulators let the compiler vectorize without reassociation flags.
    let mut s = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        s[0] += a[k] * b[k];
        s[1] += a[k + 1] * b[k + 1];
        s[2] += a[k + 2] * b[k + 2];
        s[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (s[0] + s[1]) + (s[2] + s[3]) + tail
}

/// `y += a x`.
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Tridiagonal form `T = Q^T A Q` with `Q = H_0 H_1 ... H_{n-3}`.
/// `d` is the diagonal and `e[i]` couples `i` and `i + 1`; `e[n-1] = 0`.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    /// Row `k` holds `v_k` in columns `k+1..n`.
    reflectors: Matrix,
    tau: Vec<f64>,
}

/// Reduces the symmetric matrix `a` (consumed) to tridiagonal form.
pub fn tridiagonalize(mut a: Matrix) -> Tridiagonal {
    assert_eq!(a.rows, a.cols, "tridiagonalize needs a square matrix");
    let n = a.rows;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut tau = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        d[k] = a[(k, k)];
        let m = n - k - 1;
        let x = &a.row(k)[k + 1..];
        let norm = dot(x, x).sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = x[0];
        let alpha = if x0 > 0.0 { -norm } else { norm };
        let v = &mut v[..m];
        v.copy_from_slice(x);
        v[0] = x0 - alpha;
        let vtv = dot(v, v);
        if vtv == 0.0 {
            e[k] = x0;
            continue;
        }
        let t = 2.0 / vtv;
        tau[k] = t;
        e[k] = alpha;
        a.row_mut(k)[k + 1..].copy_from_slice(v);
        let p = &mut p[..m];
        for i in 0..m {
            p[i] = t * dot(&a.row(k + 1 + i)[k + 1..], v);
        }
        let kk = 0.5 * t * dot(p, v);
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for j in 0..m {
                row[j] -= vi * p[j] + wi * v[j];
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2, n - 2)];
        e[n - 2] = a[(n - 2, n - 1)];
    }
    if n >= 1 {
        d[n - 1] = a[(n - 1, n - 1)];
    }
    Tridiagonal { d, e, reflectors: a, tau }
}

impl Tridiagonal {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Replaces `w` (n rows) with `Q^T w`.
    pub fn apply_qt(&self, w: &mut Matrix) {
        let n = self.n();
        assert_eq!(w.rows, n, "payload must have one row per tridiagonal index");
        let mut r = vec![0.0; w.cols];
        for k in 0..n.saturating_sub(2) {
            let t = self.tau[k];
            if t == 0.0 {
                continue;
            }
            let v = &self.reflectors.row(k)[k + 1..];
            r.iter_mut().for_each(|x| *x = 0.0);
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0.0 {
                    axpy(vi, w.row(k + 1 + i), &mut r);
                }
            }
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0.0 {
                    axpy(-t * vi, &r, w.row_mut(k + 1 + i));
                }
            }
        }
    }
}

const QL_MAX_ITER: usize = 60;

/// Implicit QL on `(d, e)`. Eigenvalues overwrite `d` (unsorted); the same
/// rotations are applied to consecutive payload rows.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut payload: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    assert_eq!(e.len(), n);
    if let Some(w) = payload.as_deref() {
        assert_eq!(w.rows, n);
    }
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Numerical(format!("QL iteration did not converge for eigenvalue {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(w) = payload.as_deref_mut() {
                    let (wi, wj) = w.two_rows_mut(i, i + 1);
                    for (a, bb) in wi.iter_mut().zip(wj.iter_mut()) {
                        let h = *bb;
                        *bb = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix and, when requested, eigenvectors as rows,
/// sorted by descending eigenvalue with ties kept in solver order.
pub fn symmetric_eigen(a: Matrix, vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    let n = a.rows;
    let mut tri = tridiagonalize(a);
    let mut payload = if vectors {
        let mut w = Matrix::identity(n);
        tri.apply_qt(&mut w);
        Some(w)
    } else {
        None
    };
    let (mut d, mut e) = (std::mem::take(&mut tri.d), std::mem::take(&mut tri.e));
    tridiagonal_ql(&mut d, &mut e, payload.as_mut())?;
    let order = descending_order(&d);
    let values = order.iter().map(|&i| d[i]).collect();
    let vecs = payload.map(|w| {
        let mut out = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            out.row_mut(dst).copy_from_slice(w.row(src));
        }
        out
    });
    Ok((values, vecs))
}

/// Indices sorting `values` descending; equal values keep ascending index order.
pub fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// Cholesky factor `L` (lower triangle, row-major) of a symmetric positive definite matrix.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s = a[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(Error::Numerical(format!("matrix not positive definite at pivot {i} (value {s:e})")));
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Solves `L L^T x = b` for a Cholesky factor `L`.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - dot(&l.row(i)[..i], &y[..i])) / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_symmetric(n: usize, seed: u64) -> Matrix {
        let mut r = crate::rng::RngStream::new(seed, 0);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = 2.0 * r.unit() - 1.0;
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        for &n in &[1usize, 2, 3, 7, 30] {
            let a = sample_symmetric(n, n as u64);
            let (vals, vecs) = symmetric_eigen(a.clone(), true).unwrap();
            let vecs = vecs.unwrap();
            for k in 0..n {
                let u = vecs.row(k);
                let au = a.mul_vec(u);
                for i in 0..n {
                    assert!((au[i] - vals[k] * u[i]).abs() < 1e-12, "n={n} k={k}");
                }
                for j in 0..n {
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((dot(u, vecs.row(j)) - want).abs() < 1e-12);
                }
            }
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let mut a = Matrix::zeros(4, 4);
        for (i, v) in [3.0, -1.0, 2.0, 2.0].iter().enumerate() {
            a[(i, i)] = *v;
        }
        let (vals, _) = symmetric_eigen(a, false).unwrap();
        assert_eq!(vals, vec![3.0, 2.0, 2.0, -1.0]);
    }

    #[test]
    fn projection_payload_matches_explicit_vectors() {
        let n = 12;
        let a = sample_symmetric(n, 99);
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let (_, vecs) = symmetric_eigen(a.clone(), true).unwrap();
        let vecs = vecs.unwrap();
        let mut tri = tridiagonalize(a);
        let mut w = Matrix::from_vec(n, 1, x.clone());
        tri.apply_qt(&mut w);
        let (mut d, mut e) = (tri.d.clone(), tri.e.clone());
        tridiagonal_ql(&mut d, &mut e, Some(&mut w)).unwrap();
        let order = descending_order(&d);
        for (k, &src) in order.iter().enumerate() {
            let direct = dot(vecs.row(k), &x);
            assert!((direct.abs() - w[(src, 0)].abs()).abs() < 1e-12);
        }
        tri.d.clear();
    }

    #[test]
    fn cholesky_roundtrip() {
        let b = sample_symmetric(6, 3);
        let mut a = b.gram();
        for i in 0..6 {
            a[(i, i)] += 0.5;
        }
        let l = cholesky(&a).unwrap();
        let rhs: Vec<f64> = (0..6).map(|i| i as f64 - 2.0).collect();
        let x = cholesky_solve(&l, &rhs);
        let ax = a.mul_vec(&x);
        for i in 0..6 {
            assert!((ax[i] - rhs[i]).abs() < 1e-10);
        }
        let mut bad = Matrix::identity(2);
        bad[(1, 1)] = -1.0;
        assert!(cholesky(&bad).is_err());
    }
}
