//! Small dense linear algebra over [`Real`].
//!
//! Vectors are plain slices. [`Matrix`] is row-major. The decompositions here
//! (one-sided Jacobi SVD, cyclic Jacobi eigensolver, Householder-free QR via
//! re-orthogonalized Gram-Schmidt) target the tiny systems this crate needs:
//! d x d cross-covariances, 2 x 2 Procrustes blocks and PCA covariances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

#[inline]
pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist_sq<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

#[inline]
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    dist_sq(a, b).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += s * x`
#[inline]
pub fn axpy<T: Real>(s: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Returns `x / ||x||`, or `None` for the zero vector.
pub fn normalized<T: Real>(x: &[T]) -> Option<Vec<T>> {
    let n = norm(x);
    (n > T::zero()).then(|| scale(x, T::one() / n))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on zero-width rows
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.row_iter().map(<[T]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self * x`
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        crate::error::check_dim(self.cols, x.len())?;
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// `self^T * x`
    pub fn tr_mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        crate::error::check_dim(self.rows, x.len())?;
        let mut out = vec![T::zero(); self.cols];
        for (r, &xi) in self.row_iter().zip(x) {
            axpy(xi, r, &mut out);
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != T::zero() {
                    axpy(a, other.row(k), orow);
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: scale(&self.data, s) }
    }

    pub fn frobenius(&self) -> T {
        norm(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Max-abs entry of `self^T self - I`.
    pub fn orthogonality_defect(&self) -> T {
        let g = self.transpose().matmul(self).expect("square product");
        let mut worst = T::zero();
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::lit(x.to_f64_lossy())).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin SVD `a = u * diag(s) * v^T` of a square or tall matrix.
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided Jacobi SVD. Requires `rows >= cols`.
pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "svd expects rows >= cols");
    // Work on columns of a copy; accumulate right rotations in v.
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let tol = T::epsilon() * T::lit(4.0);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<T> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)] * w[(i, j)]).sum::<T>().sqrt())
        .collect();
    let mut u = Matrix::zeros(m, n);
    for j in 0..n {
        if s[j] > T::zero() {
            for i in 0..m {
                u[(i, j)] = w[(i, j)] / s[j];
            }
        }
    }
    // Sort singular values descending, carrying columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let u_sorted = Matrix::from_fn(m, n, |i, j| u[(i, order[j])]);
    let v_sorted = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    s = order.iter().map(|&j| s[j]).collect();
    let mut u = u_sorted;
    complete_orthonormal_columns(&mut u, &s);
    Svd { u, s, v: v_sorted }
}

/// Replaces columns of `u` belonging to zero singular values with an
/// orthonormal completion so `u` stays orthogonal for square inputs.
fn complete_orthonormal_columns<T: Real>(u: &mut Matrix<T>, s: &[T]) {
    let (m, n) = (u.rows(), u.cols());
    for j in 0..n {
        if s[j] > T::zero() {
            continue;
        }
        'basis: for e in 0..m {
            let mut cand = vec![T::zero(); m];
            cand[e] = T::one();
            for _ in 0..2 {
                for k in 0..n {
                    if k == j || (s[k] == T::zero() && k > j) {
                        continue;
                    }
                    let col: Vec<T> = (0..m).map(|i| u[(i, k)]).collect();
                    let proj = dot(&cand, &col);
                    axpy(-proj, &col, &mut cand);
                }
            }
            if let Some(c) = normalized(&cand) {
                if norm(&cand) > T::lit(1e-3) {
                    for i in 0..m {
                        u[(i, j)] = c[i];
                    }
                    break 'basis;
                }
            }
        }
    }
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues descending, and
/// eigenvectors as the columns of the returned matrix.
pub fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "symmetric_eigen expects a square matrix");
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= T::epsilon() * m.frobenius() || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (sorted_vals, sorted_vecs)
}

/// Orthogonal factor of the QR decomposition of a square matrix, with the
/// sign convention `diag(R) > 0`. Applied to a Gaussian matrix this gives a
/// Haar-distributed orthogonal matrix.
pub fn qr_orthogonal<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<T> = (0..n).map(|i| a[(i, j)]).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for k in 0..j {
                let qk: Vec<T> = (0..n).map(|i| q[(i, k)]).collect();
                let proj = dot(&col, &qk);
                axpy(-proj, &qk, &mut col);
            }
        }
        let c = normalized(&col).unwrap_or_else(|| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        });
        for i in 0..n {
            q[(i, j)] = c[i];
        }
    }
    q
}

/// Nuclear norm `sum_i sigma_i`.
pub fn nuclear_norm<T: Real>(a: &Matrix<T>) -> T {
    if a.rows() >= a.cols() {
        svd(a).s.into_iter().sum()
    } else {
        svd(&a.transpose()).s.into_iter().sum()
    }
}

/// Orthogonal `R` maximizing `tr(R m)` over O(d), and the maximum `||m||_*`.
///
/// With `m = U S V^T`, the maximizer is `R = V U^T`.
pub fn procrustes<T: Real>(m: &Matrix<T>) -> (T, Matrix<T>) {
    let Svd { u, s, v } = svd(m);
    let r = v.matmul(&u.transpose()).expect("square");
    (s.into_iter().sum(), r)
}

/// Closed-form O(2) Procrustes for a 2x2 block `[[a, b], [c, d]]`.
///
/// Returns `(max_{R in O(2)} tr(R m), R)`; rotations win ties against
/// reflections.
#[inline]
pub fn procrustes_2x2<T: Real>(a: T, b: T, c: T, d: T) -> (T, [[T; 2]; 2]) {
    // tr(R(t) m) = cos t (a + d) + sin t (b - c)
    let rp = a + d;
    let rq = b - c;
    // tr(F(t) m) = cos t (a - d) + sin t (b + c), F(t) = [[cos, sin], [sin, -cos]]
    let fp = a - d;
    let fq = b + c;
    let rot = (rp * rp + rq * rq).sqrt();
    let refl = (fp * fp + fq * fq).sqrt();
    if rot >= refl {
        let (cs, sn) = unit_angle(rp, rq, rot);
        (rot, [[cs, -sn], [sn, cs]])
    } else {
        let (cs, sn) = unit_angle(fp, fq, refl);
        (refl, [[cs, sn], [sn, -cs]])
    }
}

#[inline]
fn unit_angle<T: Real>(p: T, q: T, r: T) -> (T, T) {
    if r > T::zero() {
        (p / r, q / r)
    } else {
        (T::one(), T::zero())
    }
}
