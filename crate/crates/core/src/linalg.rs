//! Dense real linear algebra: row-major matrices, Cholesky solves,
//! symmetric eigendecomposition and weighted inner products.

use std::ops::{Index, IndexMut};

use crate::error::{Result, TikhError};

/// Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Iteration budget of the implicit QL sweep, per eigenvalue.
const QL_ITER_BUDGET: usize = 30;

/// Sweep budget of the cyclic Jacobi solver.
pub const JACOBI_SWEEPS: usize = 30;

/// Row-major dense matrix of finite `f64` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(TikhError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(TikhError::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix entry by entry. The closure must return finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices; all rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(TikhError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
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

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                t.data[j * self.rows + i] = v;
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// `self · x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `selfᵀ · x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, x.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                axpy(xi, self.row(i), &mut out);
            }
        }
        Ok(out)
    }

    /// `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik != 0.0 {
                    axpy(aik, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    /// The Gram matrix `selfᵀ · self`, exactly symmetric.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let at = self.transpose();
        let mut g = Self::zeros(n, n);
        // four rows of the result per pass over Aᵀ
        for i0 in (0..n).step_by(4) {
            let i1 = (i0 + 4).min(n);
            for j in i0..n {
                let aj = at.row(j);
                for i in i0..i1.min(j + 1) {
                    g.data[i * n + j] = dot(at.row(i), aj);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    /// Largest entrywise asymmetry relative to the largest entry.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// Returns `(M + Mᵀ)/2`, rejecting matrices whose asymmetry exceeds
    /// [`SYMMETRY_TOL`].
    pub fn symmetrized(&self) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(TikhError::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let asymmetry = self.relative_asymmetry();
        if asymmetry > SYMMETRY_TOL {
            return Err(TikhError::NotSymmetric { asymmetry });
        }
        let n = self.rows;
        let mut s = self.clone();
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                s.data[i * n + j] = avg;
                s.data[j * n + i] = avg;
            }
        }
        Ok(s)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// The penalty weight `W` of `‖x‖²_W = xᵀWx`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Identity,
    Explicit(DenseMatrix),
}

impl WeightSpec {
    /// Validates an explicit weight: symmetric within [`SYMMETRY_TOL`] and
    /// positive definite. The stored matrix is the symmetrized input.
    pub fn explicit(matrix: DenseMatrix) -> Result<Self> {
        let sym = matrix.symmetrized()?;
        Cholesky::factor(&sym)?;
        Ok(WeightSpec::Explicit(sym))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WeightSpec::Identity => "identity",
            WeightSpec::Explicit(_) => "explicit",
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, WeightSpec::Identity)
    }

    /// Checks the weight against problem dimension `n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            WeightSpec::Identity => Ok(()),
            WeightSpec::Explicit(m) => check_len(n, m.rows()),
        }
    }

    /// `W · v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            WeightSpec::Identity => Ok(v.to_vec()),
            WeightSpec::Explicit(m) => m.matvec(v),
        }
    }

    /// The weight as a dense `n × n` matrix.
    pub fn to_dense(&self, n: usize) -> DenseMatrix {
        match self {
            WeightSpec::Identity => DenseMatrix::identity(n),
            WeightSpec::Explicit(m) => m.clone(),
        }
    }
}

/// `uᵀ W v`.
pub fn w_inner(u: &[f64], v: &[f64], w: &WeightSpec) -> Result<f64> {
    check_len(u.len(), v.len())?;
    w.check_dim(u.len())?;
    match w {
        WeightSpec::Identity => Ok(dot(u, v)),
        WeightSpec::Explicit(m) => Ok(dot(u, &m.matvec(v)?)),
    }
}

/// `‖u‖_W`.
pub fn w_norm(u: &[f64], w: &WeightSpec) -> Result<f64> {
    Ok(w_inner(u, u, w)?.max(0.0).sqrt())
}

/// Lower-triangular Cholesky factor `M = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(TikhError::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s = m[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(TikhError::NotSpd { row: i, pivot: s });
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(Self { l })
    }

    pub fn factor_matrix(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L z = rhs`.
    pub fn solve_lower(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), rhs.len())?;
        let mut z = rhs.to_vec();
        for i in 0..z.len() {
            let row = self.l.row(i);
            z[i] = (z[i] - dot(&row[..i], &z[..i])) / row[i];
        }
        Ok(z)
    }

    /// Solves `Lᵀ z = rhs`.
    pub fn solve_upper(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), rhs.len())?;
        let mut z = rhs.to_vec();
        for i in (0..z.len()).rev() {
            z[i] /= self.l[(i, i)];
            let zi = z[i];
            // column i of Lᵀ above the diagonal is row i of L left of it
            axpy(-zi, &self.l.row(i)[..i], &mut z[..i]);
        }
        Ok(z)
    }

    /// Solves `L Lᵀ z = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_upper(&self.solve_lower(rhs)?)
    }

    /// `L⁻¹ · B` for a dense right-hand side, row by row.
    pub fn solve_lower_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.dim(), b.rows())?;
        let mut x = b.clone();
        let cols = b.cols();
        for i in 0..b.rows() {
            let (done, rest) = x.data.split_at_mut(i * cols);
            let xi = &mut rest[..cols];
            for (j, &lij) in self.l.row(i)[..i].iter().enumerate() {
                if lij != 0.0 {
                    axpy(-lij, &done[j * cols..(j + 1) * cols], xi);
                }
            }
            let d = self.l[(i, i)];
            xi.iter_mut().for_each(|v| *v /= d);
        }
        Ok(x)
    }
}

/// Solves `M z = rhs` for symmetric positive definite `M` by Cholesky.
pub fn spd_solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len(m.rows(), rhs.len())?;
    Cholesky::factor(m)?.solve(rhs)
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, orthonormal.
    pub vectors: DenseMatrix,
}

impl SymmetricEigen {
    /// Eigenvector `k` (the `k`-th column of `vectors`).
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.vectors.rows();
        let mut m = DenseMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                let s = lam * v[i];
                axpy(s, &v, m.row_mut(i));
            }
        }
        m
    }
}

/// Symmetric eigendecomposition by Householder tridiagonalization followed
/// by implicit QL iteration.
pub fn sym_eig(m: &DenseMatrix) -> Result<SymmetricEigen> {
    let (values, rows) = sym_eig_rows(m)?;
    Ok(SymmetricEigen {
        values,
        vectors: rows.transpose(),
    })
}

/// As [`sym_eig`], but eigenvectors are returned as the rows of the matrix.
pub(crate) fn sym_eig_rows(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let a = m.symmetrized()?;
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let (mut diag, mut sub, mut zt) = tridiagonalize(a);
    tql2(&mut diag, &mut sub, &mut zt)?;
    Ok(sort_descending(diag, zt))
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig_jacobi(m: &DenseMatrix) -> Result<SymmetricEigen> {
    let mut a = m.symmetrized()?;
    let n = a.rows();
    let mut vt = DenseMatrix::identity(n);
    let total = a.frobenius_norm();
    let mut converged = total == 0.0;
    for _ in 0..JACOBI_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= f64::EPSILON * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                if apq.abs() <= 0.5 * f64::EPSILON * (app.abs().min(aqq.abs())) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                rotate_rows(&mut vt, p, q, c, s);
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() > 1e3 * f64::EPSILON * total {
            return Err(TikhError::ConvergenceFailure {
                budget: JACOBI_SWEEPS,
            });
        }
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    let (values, rows) = sort_descending(diag, vt);
    Ok(SymmetricEigen {
        values,
        vectors: rows.transpose(),
    })
}

/// Rows `p`, `q` of `vt` hold eigenvector estimates; applies the plane
/// rotation to them.
fn rotate_rows(vt: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let cols = vt.cols();
    let (lo, hi) = vt.data.split_at_mut(q * cols);
    let rp = &mut lo[p * cols..(p + 1) * cols];
    let rq = &mut hi[..cols];
    for (vp, vq) in rp.iter_mut().zip(rq.iter_mut()) {
        let (x, y) = (*vp, *vq);
        *vp = c * x - s * y;
        *vq = s * x + c * y;
    }
}

/// Reduces symmetric `a` to tridiagonal form `Qᵀ a Q`. Returns the diagonal,
/// the subdiagonal (`sub[i] = T[i][i-1]`, `sub[0] = 0`) and `Qᵀ`.
fn tridiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>, DenseMatrix) {
    let n = a.rows();
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n.saturating_sub(2));

    for k in 0..n.saturating_sub(2) {
        diag[k] = a[(k, k)];
        let mut v = a.row(k)[k + 1..].to_vec();
        let norm_x = norm(&v);
        if norm_x == 0.0 {
            sub[k + 1] = 0.0;
            reflectors.push((v, 0.0));
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        let alpha = -sign * norm_x;
        v[0] -= alpha;
        let beta = 2.0 / dot(&v, &v);
        sub[k + 1] = alpha;

        // trailing block a[k+1.., k+1..] <- H a H with H = I - beta v vᵀ
        let off = k + 1;
        let len = n - off;
        let mut p = vec![0.0; len];
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = beta * dot(&a.row(off + i)[off..], &v);
        }
        let kk = 0.5 * beta * dot(&p, &v);
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..len {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a.row_mut(off + i)[off..];
            for ((r, &vj), &wj) in row.iter_mut().zip(&v).zip(&w) {
                *r -= vi * wj + wi * vj;
            }
        }
        reflectors.push((v, beta));
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2, n - 2)];
        sub[n - 1] = a[(n - 1, n - 2)];
    }
    diag[n - 1] = a[(n - 1, n - 1)];

    // Q = H_0 H_1 ... H_{n-3}, accumulated backwards so each step touches
    // only the trailing block.
    let mut q = DenseMatrix::identity(n);
    for (k, (v, beta)) in reflectors.iter().enumerate().rev() {
        if *beta == 0.0 {
            continue;
        }
        let off = k + 1;
        let mut t = vec![0.0; n - off];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, &q.row(off + i)[off..], &mut t);
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            axpy(-beta * vi, &t, &mut q.row_mut(off + i)[off..]);
        }
    }
    (diag, sub, q.transpose())
}

/// Implicit QL iteration on a symmetric tridiagonal matrix. Rows of `zt`
/// are rotated alongside so that on exit row `k` of `zt` is the eigenvector
/// for `diag[k]`.
fn tql2(diag: &mut [f64], sub: &mut [f64], zt: &mut DenseMatrix) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        sub[i - 1] = sub[i];
    }
    sub[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(diag[l].abs() + sub[l].abs());
        let mut m = l;
        while m < n - 1 && sub[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_ITER_BUDGET {
                    return Err(TikhError::ConvergenceFailure {
                        budget: QL_ITER_BUDGET,
                    });
                }
                let g = diag[l];
                let mut p = (diag[l + 1] - g) / (2.0 * sub[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                diag[l] = sub[l] / (p + r);
                diag[l + 1] = sub[l] * (p + r);
                let dl1 = diag[l + 1];
                let h = g - diag[l];
                for d in diag.iter_mut().skip(l + 2) {
                    *d -= h;
                }
                shift_total += h;

                p = diag[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = sub[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * sub[i];
                    let h = c * p;
                    r = p.hypot(sub[i]);
                    sub[i + 1] = s * r;
                    s = sub[i] / r;
                    c = p / r;
                    p = c * diag[i] - s * g;
                    diag[i + 1] = h + s * (c * g + s * diag[i]);
                    // columns i, i+1 of Z are rows i, i+1 of Zᵀ
                    rotate_rows(zt, i, i + 1, c, s);
                }
                p = -s * s2 * c3 * el1 * sub[l] / dl1;
                sub[l] = s * p;
                diag[l] = c * p;
                if sub[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        diag[l] += shift_total;
        sub[l] = 0.0;
    }
    Ok(())
}

/// Stable descending sort of eigenvalues with their eigenvector rows.
fn sort_descending(values: Vec<f64>, rows: DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let cols = rows.cols();
    let mut sorted = DenseMatrix::zeros(values.len(), cols);
    for (dst, &src) in order.iter().enumerate() {
        sorted.row_mut(dst).copy_from_slice(rows.row(src));
    }
    (order.iter().map(|&i| values[i]).collect(), sorted)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().min(b.len());
    let (a, b) = (&a[..len], &b[..len]);
    // independent accumulators so the loop vectorizes without reassociation
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha · x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `a - b`, elementwise.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(TikhError::DimensionMismatch { expected, found })
    }
}
