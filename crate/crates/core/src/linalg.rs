//! Dense column-major linear algebra: the handful of products the solvers
//! need and a Householder QR least-squares solver.

use std::fmt;

use thiserror::Error;

use crate::Scalar;

/// Relative threshold on the diagonal of R below which a column is treated
/// as linearly dependent on the ones before it.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch, expected {expected}, got {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix shape {rows}x{cols} is empty")]
    EmptyShape { rows: usize, cols: usize },
    #[error("data of length {len} cannot fill a {rows}x{cols} matrix")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },
    #[error("column index {0} selected more than once")]
    DuplicateIndex(usize),
    #[error("empty column selection")]
    EmptySelection,
    #[error("least squares needs at least as many rows as columns, got {rows}x{cols}")]
    Underdetermined { rows: usize, cols: usize },
    #[error("matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

/// Dense matrix stored column by column.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Builds a matrix from column-major `data`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DataLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major nested slices. Handy for small literals.
    pub fn from_rows(rows: &[&[T]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch {
                op: "from_rows",
                expected: c,
                found: bad.len(),
            });
        }
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for col in columns {
            if col.len() != r {
                return Err(LinalgError::DimensionMismatch {
                    op: "from_columns",
                    expected: r,
                    found: col.len(),
                });
            }
            data.extend_from_slice(col);
        }
        Self::from_col_major(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::from_col_major(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_col_major(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// `p` copies of `v` side by side.
    pub fn repeat_column(v: &[T], p: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(v.len() * p);
        for _ in 0..p {
            data.extend_from_slice(v);
        }
        Self::from_col_major(v.len(), p, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    pub fn as_col_major(&self) -> &[T] {
        &self.data
    }

    pub fn into_col_major(self) -> Vec<T> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `A v`.
    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "matvec",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = vec![T::zero(); self.rows];
        for (col, &vj) in self.columns().zip(v) {
            if vj == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(col) {
                *o = *o + a * vj;
            }
        }
        Ok(out)
    }

    /// `Aᵀ v`: the inner product of every column with `v`.
    pub fn transpose_matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "transpose_matvec",
                expected: self.rows,
                found: v.len(),
            });
        }
        Ok(self.columns().map(|col| dot(col, v)).collect())
    }

    /// `A B`.
    pub fn matmul(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.rows != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                expected: self.cols,
                found: b.rows,
            });
        }
        let mut data = Vec::with_capacity(self.rows * b.cols);
        for bcol in b.columns() {
            data.extend(self.matvec(bcol)?);
        }
        Matrix::from_col_major(self.rows, b.cols, data)
    }

    /// `Aᵀ A`.
    pub fn gram(&self) -> Matrix<T> {
        let n = self.cols;
        let mut g = vec![T::zero(); n * n];
        for j in 0..n {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                g[j * n + i] = v;
                g[i * n + j] = v;
            }
        }
        Matrix {
            rows: n,
            cols: n,
            data: g,
        }
    }

    /// Copies the columns listed in `idx`, in that order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<Matrix<T>> {
        if idx.is_empty() {
            return Err(LinalgError::EmptySelection);
        }
        let mut seen = vec![false; self.cols];
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            if j >= self.cols {
                return Err(LinalgError::IndexOutOfRange {
                    index: j,
                    cols: self.cols,
                });
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(LinalgError::DuplicateIndex(j));
            }
            data.extend_from_slice(self.col(j));
        }
        Matrix::from_col_major(self.rows, idx.len(), data)
    }

    /// Row-wise mean, i.e. the average of the columns.
    pub fn column_mean(&self) -> Vec<T> {
        let p = T::of(self.cols as f64);
        let mut out = vec![T::zero(); self.rows];
        for col in self.columns() {
            for (o, &a) in out.iter_mut().zip(col) {
                *o = *o + a;
            }
        }
        out.iter_mut().for_each(|o| *o = *o / p);
        out
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<&T> = (0..self.cols).map(|j| &self.data[j * self.rows + i]).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// `a - b`, element-wise.
pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Householder reduction to tridiagonal form followed by the implicit QL
/// iteration with Wilkinson-style shifts. Only the lower triangle of `a` is
/// read.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    if a.rows != a.cols {
        return Err(LinalgError::DimensionMismatch {
            op: "symmetric_eigenvalues",
            expected: a.rows,
            found: a.cols,
        });
    }
    let n = a.rows;
    let (mut d, mut e) = tridiagonalize(a);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    debug_assert_eq!(d.len(), n);
    Ok(d)
}

/// Returns the diagonal and the subdiagonal (`e[i]` couples `i` and `i+1`,
/// last entry zero) of a tridiagonal matrix similar to `a`.
fn tridiagonalize<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, Vec<T>) {
    let n = a.rows;
    let two = T::of(2.0);
    // full symmetric working copy from the lower triangle
    let mut w: Vec<T> = vec![T::zero(); n * n];
    for j in 0..n {
        for i in j..n {
            let v = a.get(i, j);
            w[j * n + i] = v;
            w[i * n + j] = v;
        }
    }
    let at = |w: &[T], i: usize, j: usize| w[j * n + i];
    let mut sub = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = (k + 1..n).map(|i| at(&w, i, k)).collect();
        let tail = norm2(&x[1..]);
        if tail == T::zero() {
            sub[k] = x[0];
            continue;
        }
        let alpha = norm2(&x);
        let diag = if x[0] > T::zero() { -alpha } else { alpha };
        let mut v = x;
        v[0] = v[0] - diag;
        let vn = norm2(&v);
        v.iter_mut().for_each(|e| *e = *e / vn);
        // trailing block B <- H B H with H = I - 2 v vᵀ
        let len = n - k - 1;
        let off = k + 1;
        let pvec: Vec<T> = (0..len)
            .map(|i| two * (0..len).fold(T::zero(), |s, j| s + at(&w, off + i, off + j) * v[j]))
            .collect();
        let kappa = dot(&v, &pvec);
        let q: Vec<T> = pvec.iter().zip(&v).map(|(&pi, &vi)| pi - kappa * vi).collect();
        for j in 0..len {
            for i in 0..len {
                let idx = (off + j) * n + off + i;
                w[idx] = w[idx] - v[i] * q[j] - q[i] * v[j];
            }
        }
        sub[k] = diag;
        for i in off..n {
            w[k * n + i] = T::zero();
            w[i * n + k] = T::zero();
        }
        w[k * n + off] = diag;
        w[off * n + k] = diag;
    }
    if n >= 2 {
        sub[n - 2] = at(&w, n - 1, n - 2);
    }
    let diag = (0..n).map(|i| at(&w, i, i)).collect();
    (diag, sub)
}

fn tridiagonal_ql<T: Scalar>(d: &mut [T], e: &mut [T]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let n = d.len();
    let two = T::of(2.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(LinalgError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Householder QR factorization of a tall matrix, kept in factored form.
///
/// Reflector `j` acts on rows `j..m` and is stored as a unit vector, so
/// applying it is `x -= 2 v (vᵀ x)`.
#[derive(Debug, Clone)]
pub struct Householder<T> {
    rows: usize,
    cols: usize,
    reflectors: Vec<Vec<T>>,
    /// Upper triangle of R, column-major `cols x cols`.
    r: Vec<T>,
}

impl<T: Scalar> Householder<T> {
    /// Factors `a`. Fails if `a` is wide or numerically rank deficient.
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        let (m, n) = (a.rows, a.cols);
        if m < n {
            return Err(LinalgError::Underdetermined { rows: m, cols: n });
        }
        let two = T::of(2.0);
        let mut work = a.data.clone();
        let mut reflectors = Vec::with_capacity(n);
        let mut r = vec![T::zero(); n * n];

        for j in 0..n {
            let (head, tail) = work.split_at_mut((j + 1) * m);
            let colj = &mut head[j * m..];
            let x = &colj[j..];
            let alpha = norm2(x);
            let mut v = x.to_vec();
            let diag = if alpha == T::zero() {
                v.iter_mut().for_each(|e| *e = T::zero());
                T::zero()
            } else {
                let d = if x[0] > T::zero() { -alpha } else { alpha };
                v[0] = v[0] - d;
                let vn = norm2(&v);
                if vn == T::zero() {
                    v.iter_mut().for_each(|e| *e = T::zero());
                } else {
                    v.iter_mut().for_each(|e| *e = *e / vn);
                }
                d
            };
            for (i, rij) in r[j * n..j * n + j].iter_mut().enumerate() {
                *rij = colj[i];
            }
            r[j * n + j] = diag;

            for col in tail.chunks_exact_mut(m) {
                let seg = &mut col[j..];
                let s = two * dot(&v, seg);
                if s != T::zero() {
                    for (e, &vi) in seg.iter_mut().zip(&v) {
                        *e = *e - s * vi;
                    }
                }
            }
            reflectors.push(v);
        }

        let qr = Self {
            rows: m,
            cols: n,
            reflectors,
            r,
        };
        if let Some(column) = qr.first_dependent_column() {
            return Err(LinalgError::RankDeficient { column });
        }
        Ok(qr)
    }

    fn first_dependent_column(&self) -> Option<usize> {
        let n = self.cols;
        let largest = (0..n).fold(T::zero(), |m, j| m.max(self.r[j * n + j].abs()));
        let tol = T::of(RANK_TOL) * largest;
        (0..n).find(|&j| {
            let d = self.r[j * n + j].abs();
            largest == T::zero() || d < tol || !d.is_finite()
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Diagonal of R.
    pub fn r_diagonal(&self) -> Vec<T> {
        (0..self.cols).map(|j| self.r[j * self.cols + j]).collect()
    }

    /// Least-squares solution of `A u ≈ b` for one right-hand side.
    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "lstsq",
                expected: self.rows,
                found: b.len(),
            });
        }
        let two = T::of(2.0);
        let mut qtb = b.to_vec();
        for (j, v) in self.reflectors.iter().enumerate() {
            let seg = &mut qtb[j..];
            let s = two * dot(v, seg);
            if s != T::zero() {
                for (e, &vi) in seg.iter_mut().zip(v) {
                    *e = *e - s * vi;
                }
            }
        }
        // back substitution on R u = (Qᵀ b)[..n]
        let n = self.cols;
        let mut u = qtb;
        u.truncate(n);
        for j in (0..n).rev() {
            u[j] = u[j] / self.r[j * n + j];
            let uj = u[j];
            for i in 0..j {
                u[i] = u[i] - self.r[j * n + i] * uj;
            }
        }
        Ok(u)
    }

    /// Column-wise least-squares solution of `A U ≈ B`.
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.rows != self.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "lstsq",
                expected: self.rows,
                found: b.rows,
            });
        }
        let mut data = Vec::with_capacity(self.cols * b.cols);
        for col in b.columns() {
            data.extend(self.solve_vec(col)?);
        }
        Matrix::from_col_major(self.cols, b.cols, data)
    }
}

/// Minimizes `‖B − A U‖` column by column through a Householder QR of `A`.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    Householder::factor(a)?.solve(b)
}
