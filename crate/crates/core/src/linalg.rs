//! Small dense complex matrices: products, inversion and a one-sided Jacobi SVD.
//!
//! Sizes in this crate are a handful of rows and columns, so everything is
//! row-major `Vec` storage with straightforward loops.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Cx<T> = Complex<T>;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Cx::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose rows are the conjugate transposes of `vectors`.
    pub fn from_adjoint_rows(vectors: &[Vec<Cx<T>>]) -> Result<Self> {
        let cols = vectors.first().map_or(0, Vec::len);
        for v in vectors {
            if v.len() != cols {
                return Err(Error::Dimension {
                    op: "from_adjoint_rows",
                    expected: cols,
                    found: v.len(),
                });
            }
        }
        Ok(Self::from_fn(vectors.len(), cols, |i, j| {
            vectors[i][j].conj()
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn column(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Cx<T>> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        Self::from_fn(self.rows, end - start, |i, j| self[(i, start + j)])
    }

    /// `[self, other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension {
                op: "hstack",
                expected: self.rows,
                found: other.rows,
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                op: "matmul",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        if self.cols != v.len() {
            return Err(Error::Dimension {
                op: "mul_vec",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(Cx::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// `selfᴴ v` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        if self.rows != v.len() {
            return Err(Error::Dimension {
                op: "adjoint_mul_vec",
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![Cx::zero(); self.cols];
        for i in 0..self.rows {
            for (j, o) in out.iter_mut().enumerate() {
                *o = *o + self[(i, j)].conj() * v[i];
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).fold(Cx::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension {
                op: "inverse",
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .norm_sqr()
                        .partial_cmp(&a[(y, col)].norm_sqr())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            let p = a[(pivot, col)];
            if p.norm_sqr() == T::zero() || !p.norm_sqr().is_finite() {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p_inv = Cx::<T>::one() / a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * p_inv;
                inv[(col, j)] = inv[(col, j)] * p_inv;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[(i, col)];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - factor * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.data.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }

    /// Singular values (descending) and the full set of right singular vectors.
    ///
    /// One-sided (Hestenes) Jacobi: columns are rotated pairwise until mutually
    /// orthogonal; the accumulated rotations form `V`. For a wide matrix the
    /// trailing `cols - rows` columns of `V` span the kernel.
    pub fn svd(&self) -> Svd<T> {
        let n = self.cols;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let tol = T::tolerance() * T::c(10.0);
        let floor = {
            let f = self.frobenius_norm() * tol;
            f * f
        };
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), Cx::zero());
                    for i in 0..a.rows {
                        let ap = a[(i, p)];
                        let aq = a[(i, q)];
                        alpha = alpha + ap.norm_sqr();
                        beta = beta + aq.norm_sqr();
                        gamma = gamma + ap.conj() * aq;
                    }
                    let g_abs = gamma.norm();
                    if g_abs == T::zero()
                        || g_abs <= tol * (alpha * beta).sqrt()
                        || alpha <= floor
                        || beta <= floor
                    {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g_abs; // e^{iφ}
                    let zeta = (beta - alpha) / (T::c(2.0) * g_abs);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    let cc = Cx::new(c, T::zero());
                    let ss = Cx::new(s, T::zero());
                    let ph = phase.conj();
                    for i in 0..a.rows {
                        let ap = a[(i, p)];
                        let aq = a[(i, q)] * ph;
                        a[(i, p)] = cc * ap - ss * aq;
                        a[(i, q)] = ss * ap + cc * aq;
                    }
                    for i in 0..n {
                        let vp = v[(i, p)];
                        let vq = v[(i, q)] * ph;
                        v[(i, p)] = cc * vp - ss * vq;
                        v[(i, q)] = ss * vp + cc * vq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<T> = (0..n)
            .map(|j| {
                (0..a.rows)
                    .fold(T::zero(), |acc, i| acc + a[(i, j)].norm_sqr())
                    .sqrt()
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| {
            norms[y]
                .partial_cmp(&norms[x])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let singular_values = order.iter().map(|&j| norms[j]).collect();
        let right = Self::from_fn(n, n, |i, j| v[(i, order[j])]);
        Svd {
            singular_values,
            right,
        }
    }

    pub fn condition_number(&self) -> T {
        let svd = self.svd();
        let k = self.rows.min(self.cols);
        let smax = svd.singular_values[0];
        let smin = svd.singular_values[k - 1];
        if smin == T::zero() {
            T::infinity()
        } else {
            smax / smin
        }
    }
}

/// Output of [`CMatrix::svd`]: `singular_values[j]` pairs with column `j` of `right`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub singular_values: Vec<T>,
    pub right: CMatrix<T>,
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Cx<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

pub fn norm_sqr<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// `aᴴ b`.
pub fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter()
        .zip(b)
        .fold(Cx::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

/// Sum of entries, i.e. `1ᴴ v`.
pub fn sum<T: Real>(v: &[Cx<T>]) -> Cx<T> {
    v.iter().fold(Cx::zero(), |acc, &z| acc + z)
}
