//! Small dense matrices: products, adjoints, determinants, characteristic
//! polynomials and (for `f64`) complex eigenvalues.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{Num, Zero};

use crate::scalar::Real;

/// Square or rectangular row-major matrix over a ring `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Copy + Num> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn map<R: Copy + Num>(&self, f: impl Fn(S) -> R) -> Matrix<R> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Coefficients `[1, c_1, …, c_n]` of `det(αI − A) = Σ c_k α^{n−k}`,
    /// computed division-free (Samuelson–Berkowitz).
    pub fn characteristic_polynomial(&self) -> Vec<S> {
        assert_eq!(
            self.rows, self.cols,
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let mut poly = vec![S::one()];
        for i in (0..n).rev() {
            let m = n - i - 1;
            // t = [1, -a, -R C, -R A1 C, ..., -R A1^{m-1} C]
            let mut t = Vec::with_capacity(m + 2);
            t.push(S::one());
            t.push(S::zero() - self[(i, i)]);
            let mut v: Vec<S> = (i + 1..n).map(|r| self[(r, i)]).collect();
            for _ in 0..m {
                let rc = (i + 1..n)
                    .zip(&v)
                    .fold(S::zero(), |acc, (c, &x)| acc + self[(i, c)] * x);
                t.push(S::zero() - rc);
                v = (i + 1..n)
                    .map(|r| {
                        (i + 1..n)
                            .zip(&v)
                            .fold(S::zero(), |acc, (c, &x)| acc + self[(r, c)] * x)
                    })
                    .collect();
            }
            let next: Vec<S> = (0..m + 2)
                .map(|r| (0..=r.min(m)).fold(S::zero(), |acc, s| acc + t[r - s] * poly[s]))
                .collect();
            poly = next;
        }
        poly
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Matrix<Complex<T>> {
    pub fn from_real(m: &Matrix<T>) -> Self {
        m.map(|x| Complex::new(x, T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// `max |(A†A − I)_{ij}|`.
    pub fn unitarity_defect(&self) -> T {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    /// `D⁻¹ A D` for `D = diag(d)`.
    pub fn conjugate_by_diagonal(&self, d: &[Complex<T>]) -> Self {
        assert_eq!(d.len(), self.rows);
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j] / d[i])
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex<T> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Complex::new(T::one(), T::zero());
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&x, &y| {
                    a[x * n + k]
                        .norm_sqr()
                        .partial_cmp(&a[y * n + k].norm_sqr())
                        .unwrap()
                })
                .unwrap_or(k);
            if a[piv * n + k].is_zero() {
                return Complex::zero();
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                det = -det;
            }
            let pk = a[k * n + k];
            det = det * pk;
            for r in k + 1..n {
                let f = a[r * n + k] / pk;
                for c in k + 1..n {
                    let v = a[k * n + c];
                    a[r * n + c] = a[r * n + c] - f * v;
                }
            }
        }
        det
    }
}

/// Eigenvalues through the complex Schur form, ordered by phase angle
/// (then modulus) for reproducibility.
pub fn eigenvalues(m: &Matrix<Complex<f64>>) -> Vec<Complex<f64>> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let schur = nalgebra::Schur::new(dm);
    let t = schur.unpack().1;
    let mut ev: Vec<Complex<f64>> = (0..n).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| {
        a.arg()
            .partial_cmp(&b.arg())
            .unwrap()
            .then(a.norm().partial_cmp(&b.norm()).unwrap())
    });
    ev
}

/// Monic polynomial coefficients `[1, c_1, …, c_n]` of `Π (α − r_i)`.
pub fn poly_from_roots<T: Real>(roots: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut c = vec![Complex::new(T::one(), T::zero())];
    for &r in roots {
        let mut next = vec![Complex::zero(); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] = next[k] + ck;
            next[k + 1] = next[k + 1] - ck * r;
        }
        c = next;
    }
    c
}
