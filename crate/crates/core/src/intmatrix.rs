//! The integer matrices `A`, `B`, `C` and `Ω = B − C` and the identity
//! `A·Ωᵀ = I`, all in exact integer arithmetic.
//!
//! Indices in the formulas are 1-based; `IntMatrix` storage is 0-based.

use std::fmt;

use crate::coupling::Residues;
use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 0-based access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    /// 1-based access, matching the index conventions of the formulas.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.get(i - 1, j - 1)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self.get(i, k) * other.get(k, j))
                .sum()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| i128::from(x)).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                match (k + 1..n).find(|&r| a[r * n + k] != 0) {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] =
                        (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        i64::try_from(sign * a[n * n - 1]).expect("determinant fits in i64")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `S = {ℓp mod n : ℓ = 1, …, n−q}` as a membership table over `Z_n`.
pub fn zero_residues(res: &Residues) -> Vec<bool> {
    let (n, p, q) = (res.n(), res.p(), res.q());
    let mut s = vec![false; n];
    for l in 1..=n - q {
        s[(l * p) % n] = true;
    }
    s
}

/// Coefficient matrix of `ξ_1, …, ξ_{n−1}` in the window slacks.
pub fn build_a(res: &Residues) -> IntMatrix {
    let (n, p) = (res.n(), res.p());
    IntMatrix::from_fn(n - 1, n - 1, |i, k| {
        let (j, k) = (i + 1, k + 1);
        if j <= n - p && j <= k && k < j + p {
            1
        } else if j > n - p && j + p - n <= k && k < j {
            -1
        } else {
            0
        }
    })
}

pub fn build_b(res: &Residues) -> IntMatrix {
    let n = res.n();
    let s = zero_residues(res);
    IntMatrix::from_fn(n - 1, n - 1, |m, k| {
        let diff = (k + n - m) % n;
        i64::from(!s[diff])
    })
}

pub fn build_c(res: &Residues) -> IntMatrix {
    let n = res.n();
    let s = zero_residues(res);
    IntMatrix::from_fn(n - 1, n - 1, |_, k| i64::from(!s[(k + 1) % n]))
}

/// `Ω = B − C`, checked against `A·Ωᵀ = I`.
pub fn build_omega(res: &Residues) -> Result<IntMatrix> {
    let omega = build_b(res).sub(&build_c(res));
    let prod = build_a(res).mul(&omega.transpose());
    if !prod.is_identity() {
        return Err(Error::VerificationFailed(format!(
            "A * Omega^T != I for n = {}, p = {}: {prod:?}",
            res.n(),
            res.p()
        )));
    }
    Ok(omega)
}

/// All four matrices plus the two exact checks.
#[derive(Debug, Clone)]
pub struct MatrixFamily {
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub c: IntMatrix,
    pub omega: IntMatrix,
    pub det_a: i64,
    pub a_omega_t_is_identity: bool,
}

impl MatrixFamily {
    pub fn new(res: &Residues) -> Self {
        let a = build_a(res);
        let b = build_b(res);
        let c = build_c(res);
        let omega = b.sub(&c);
        let det_a = a.det();
        let a_omega_t_is_identity = a.mul(&omega.transpose()).is_identity();
        Self {
            a,
            b,
            c,
            omega,
            det_a,
            a_omega_t_is_identity,
        }
    }

    pub fn holds(&self) -> bool {
        self.det_a == 1 && self.a_omega_t_is_identity
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::gcd;

    fn res(n: usize, p: usize) -> Residues {
        Residues::new(n, p).unwrap()
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    // Leibniz expansion, independent of the elimination in `det`.
    fn det_by_permutations(a: &IntMatrix) -> i64 {
        fn rec(a: &IntMatrix, row: usize, used: &mut [bool], sign: i64) -> i64 {
            if row == a.rows() {
                return sign;
            }
            let mut total = 0;
            for c in 0..a.rows() {
                let v = a.get(row, c);
                if used[c] || v == 0 {
                    continue;
                }
                let inversions = (0..c).filter(|&k| !used[k]).count();
                let s = if inversions % 2 == 0 { sign } else { -sign };
                used[c] = true;
                total += v * rec(a, row + 1, used, s);
                used[c] = false;
            }
            total
        }
        rec(a, 0, &mut vec![false; a.rows()], 1)
    }

    #[test]
    fn a_examples() {
        assert_eq!(build_a(&res(2, 1)), m(&[&[1]]));
        assert_eq!(build_a(&res(4, 1)), IntMatrix::identity(3));
        assert_eq!(build_a(&res(3, 2)), m(&[&[1, 1], &[-1, 0]]));
    }

    #[test]
    fn b_c_omega_examples() {
        assert_eq!(build_b(&res(3, 2)), m(&[&[1, 1], &[0, 1]]));
        assert_eq!(build_c(&res(3, 2)), m(&[&[1, 0], &[1, 0]]));
        assert_eq!(build_omega(&res(3, 2)).unwrap(), m(&[&[0, 1], &[-1, 1]]));

        assert_eq!(build_b(&res(2, 1)), m(&[&[1]]));
        assert_eq!(build_c(&res(2, 1)), m(&[&[0]]));
        assert_eq!(build_omega(&res(2, 1)).unwrap(), m(&[&[1]]));

        // p = 1: every off-diagonal difference k - m lies in S = {1, 2, 3}.
        assert_eq!(build_b(&res(4, 1)), IntMatrix::identity(3));
        assert_eq!(build_c(&res(4, 1)), IntMatrix::zeros(3, 3));
        assert_eq!(build_omega(&res(4, 1)).unwrap(), IntMatrix::identity(3));
    }

    #[test]
    fn entries_have_expected_ranges() {
        for n in 2..=12 {
            for p in (1..n).filter(|&p| gcd(p, n) == 1) {
                let f = MatrixFamily::new(&res(n, p));
                assert!(f.a.entries().iter().all(|x| (-1..=1).contains(x)));
                assert!(f.b.entries().iter().all(|x| (0..=1).contains(x)));
                assert!(f.c.entries().iter().all(|x| (0..=1).contains(x)));
                assert!(f.omega.entries().iter().all(|x| (-1..=1).contains(x)));
            }
        }
    }

    #[test]
    fn bareiss_matches_leibniz() {
        for n in 2..=8 {
            for p in (1..n).filter(|&p| gcd(p, n) == 1) {
                let a = build_a(&res(n, p));
                assert_eq!(a.det(), det_by_permutations(&a), "n={n} p={p}");
                let o = build_omega(&res(n, p)).unwrap();
                assert_eq!(o.det(), det_by_permutations(&o), "omega n={n} p={p}");
            }
        }
        let t = m(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 1]]);
        assert_eq!(t.det(), det_by_permutations(&t));
    }

    #[test]
    fn identity_holds_up_to_twelve() {
        for n in 2..=12 {
            for p in (1..n).filter(|&p| gcd(p, n) == 1) {
                let f = MatrixFamily::new(&res(n, p));
                assert_eq!(f.det_a, 1, "n={n} p={p}");
                assert!(f.a_omega_t_is_identity, "n={n} p={p}");
                assert!(build_omega(&res(n, p)).is_ok());
            }
        }
    }

    // Coefficient-matching relations for Omega (1-based indices).
    fn recursions_hold(n: usize, p: usize) -> bool {
        let o = build_omega(&res(n, p)).unwrap();
        let om = |j: usize, k: usize| o.at(j, k);
        let mut ok = true;
        for j in 1..n - p {
            for k in 1..n {
                let expect = om(j + p, k) + i64::from(k == j + p - 1) - i64::from(k == j + p);
                ok &= om(j, k) == expect;
            }
        }
        for k in 1..n {
            ok &= om(n - p, k) == i64::from(k == n - 1);
        }
        if p > 1 {
            for j in n - p + 1..n {
                let t = j + p - n;
                for k in 1..n {
                    let expect = om(t, k) + i64::from(k + 1 == t) - i64::from(k == t);
                    ok &= om(j, k) == expect;
                }
            }
            for k in 1..n {
                let expect = i64::from(k == p) - i64::from(k + 1 == p);
                ok &= om(p, k) == expect;
            }
        } else {
            for k in 1..n {
                ok &= om(1, k) == i64::from(k == 1);
            }
        }
        ok
    }

    #[test]
    fn omega_recursions() {
        for n in 2..=12 {
            for p in (1..n).filter(|&p| gcd(p, n) == 1) {
                assert!(recursions_hold(n, p), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn shifted_window_counts() {
        for n in 2..=12 {
            for p in (1..n).filter(|&p| gcd(p, n) == 1) {
                let s = zero_residues(&res(n, p));
                let count = |i: usize| (0..p).filter(|&l| s[(i + l) % n]).count();
                let base = count(n % n);
                for i in 1..n {
                    assert_eq!(count(i), base + 1, "n={n} p={p} i={i}");
                }
            }
        }
    }
}
