//! Alcove coordinates, the simplex `A_y`, and the embedding of the local phase
//! space into the sphere `Σ|u_j|² = |M|` modulo `U(1)`.
//!
//! Indices in the public formulas are 1-based and cyclic (`ξ_{m+n} = ξ_m`);
//! vectors are stored 0-based.

use num_complex::Complex;

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::intmatrix::{build_a, build_omega, IntMatrix};
use crate::linalg::Matrix;
use crate::scalar::{circular_distance, cis, wrap_angle, Real};

/// Default tolerance for membership and affine-plane checks, in radians.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default finite-difference step of the pullback check.
pub const DEFAULT_PULLBACK_STEP: f64 = 1e-5;

fn plane_tol<T: Real>(tol: T) -> T {
    tol.max(T::epsilon() * T::lit(64.0))
}

/// `ξ_start + … + ξ_{start+len−1}` with cyclic indices, `start` 1-based.
pub fn window<T: Real>(xi: &[T], start: usize, len: usize) -> T {
    let n = xi.len();
    (0..len).fold(T::zero(), |acc, i| acc + xi[(start - 1 + i) % n])
}

/// `x_j − x_ℓ` from separations alone (1-based `j`, `ℓ`).
pub fn separation<T: Real>(xi: &[T], j: usize, l: usize) -> T {
    use std::cmp::Ordering::*;
    match j.cmp(&l) {
        Less => -window(xi, j, l - j),
        Greater => window(xi, l, j - l),
        Equal => T::zero(),
    }
}

/// A point of the Weyl alcove: `ξ_k ≥ 0`, `Σξ_k = π`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlcovePoint<T> {
    xi: Vec<T>,
}

impl<T: Real> AlcovePoint<T> {
    pub fn new(xi: Vec<T>) -> Result<Self> {
        Self::with_tolerance(xi, T::lit(DEFAULT_TOL))
    }

    pub fn with_tolerance(xi: Vec<T>, tol: T) -> Result<Self> {
        if xi.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: xi.len(),
            });
        }
        let tol = plane_tol(tol);
        let dev = xi.iter().fold(T::zero(), |a, &b| a + b) - T::PI();
        if dev.abs() > tol {
            return Err(Error::NotOnAffinePlane {
                deviation: dev.to_f64_lossy(),
            });
        }
        if let Some(&neg) = xi.iter().find(|&&v| v < -tol) {
            return Err(Error::OutOfRange {
                what: "xi_k >= 0",
                value: neg.to_f64_lossy(),
            });
        }
        Ok(Self { xi })
    }

    /// Completes `ξ_1..ξ_{n−1}` by `ξ_n = π − Σ`. No sign checks.
    pub fn from_independent(head: &[T]) -> Self {
        let mut xi = head.to_vec();
        let tail = T::PI() - head.iter().fold(T::zero(), |a, &b| a + b);
        xi.push(tail);
        Self { xi }
    }

    /// `ξ_k = π/n`.
    pub fn equal_distance(n: usize) -> Self {
        Self {
            xi: vec![T::PI() / T::from_usize_lossy(n); n],
        }
    }

    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.xi
    }
}

/// Particle positions with `x_1 = (1/n)Σ jξ_j` and `x_{k+1} = x_k + ξ_k`.
pub fn positions_x<T: Real>(xi: &AlcovePoint<T>) -> Vec<T> {
    let v = xi.xi();
    let n = v.len();
    let first = v.iter().enumerate().fold(T::zero(), |acc, (i, &x)| {
        acc + T::from_usize_lossy(i + 1) * x
    }) / T::from_usize_lossy(n);
    let mut x = Vec::with_capacity(n);
    x.push(first);
    for k in 1..n {
        x.push(x[k - 1] + v[k - 1]);
    }
    x
}

/// The `n` window slacks `sgn(M)(ξ_j + … + ξ_{j+p−1} − y)`, i.e. `|u_j|²`.
pub fn window_slacks<T: Real>(xi: &[T], spec: &CouplingSpec<T>) -> Vec<T> {
    let (p, y, sm) = (spec.p(), spec.y(), spec.sign_m());
    (1..=xi.len())
        .map(|j| sm * (window(xi, j, p) - y))
        .collect()
}

fn min_of<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::infinity(), |m, &x| m.min(x))
}

/// Position of a point relative to `A_y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Interior,
    /// 1-based indices of the constraints within tolerance of zero.
    Boundary(Vec<usize>),
    Outside,
}

impl Membership {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Interior => "interior",
            Self::Boundary(_) => "boundary",
            Self::Outside => "outside",
        }
    }
}

pub fn alcove_membership<T: Real>(xi: &[T], spec: &CouplingSpec<T>, tol: T) -> Result<Membership> {
    if xi.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: xi.len(),
        });
    }
    let dev = xi.iter().fold(T::zero(), |a, &b| a + b) - T::PI();
    if dev.abs() > plane_tol(tol) {
        return Err(Error::NotOnAffinePlane {
            deviation: dev.to_f64_lossy(),
        });
    }
    let slacks = window_slacks(xi, spec);
    if slacks.iter().any(|&s| s < -tol) {
        return Ok(Membership::Outside);
    }
    let active: Vec<usize> = (1..=slacks.len())
        .filter(|&j| slacks[j - 1].abs() <= tol)
        .collect();
    Ok(if active.is_empty() {
        Membership::Interior
    } else {
        Membership::Boundary(active)
    })
}

/// Chart point `(ξ, θ)` with `θ ∈ [0, 2π)^{n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T> {
    xi: AlcovePoint<T>,
    theta: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(xi: AlcovePoint<T>, theta: Vec<T>) -> Result<Self> {
        if theta.len() + 1 != xi.n() {
            return Err(Error::DimensionMismatch {
                expected: xi.n() - 1,
                got: theta.len(),
            });
        }
        Ok(Self {
            xi,
            theta: theta.into_iter().map(wrap_angle).collect(),
        })
    }

    /// Chart coordinates without wrapping or validation; used for finite
    /// differences.
    pub(crate) fn from_raw(xi_head: &[T], theta: &[T]) -> Self {
        Self {
            xi: AlcovePoint::from_independent(xi_head),
            theta: theta.to_vec(),
        }
    }

    pub fn alcove(&self) -> &AlcovePoint<T> {
        &self.xi
    }

    pub fn xi(&self) -> &[T] {
        self.xi.xi()
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.xi.n()
    }

    /// `θ` padded with `θ_0 = θ_n = 0`.
    pub fn theta_padded(&self) -> Vec<T> {
        let mut t = Vec::with_capacity(self.theta.len() + 2);
        t.push(T::zero());
        t.extend_from_slice(&self.theta);
        t.push(T::zero());
        t
    }

    /// Max of the `ξ` difference and the circular `θ` difference.
    pub fn distance(&self, other: &Self) -> T {
        let dx = self
            .xi()
            .iter()
            .zip(other.xi())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        self.theta
            .iter()
            .zip(&other.theta)
            .fold(dx, |m, (a, b)| m.max(circular_distance(*a, *b)))
    }
}

/// A point of `S^{2n−1}_{|M|}/U(1)` in canonical gauge: the largest-modulus
/// coordinate (lowest index on ties) is real and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint<T> {
    u: Vec<Complex<T>>,
    m_abs: T,
}

impl<T: Real> ProjectivePoint<T> {
    /// Accepts `u` on the sphere (relative tolerance `1e−12`) and re-gauges it.
    pub fn new(u: Vec<Complex<T>>, m_abs: T) -> Result<Self> {
        let norm: T = u.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        let tol = plane_tol(T::lit(1e-12)) * m_abs;
        if !((norm - m_abs).abs() <= tol) {
            return Err(Error::OutOfRange {
                what: "sum |u_j|^2 = |M|",
                value: (norm - m_abs).to_f64_lossy(),
            });
        }
        Ok(Self {
            u: canonical_gauge(u),
            m_abs,
        })
    }

    /// Rescales any nonzero `u` onto the sphere, then re-gauges it.
    pub fn normalized(u: Vec<Complex<T>>, m_abs: T) -> Result<Self> {
        let norm: T = u.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::OutOfRange {
                what: "nonzero finite u",
                value: norm.to_f64_lossy(),
            });
        }
        let f = (m_abs / norm).sqrt();
        Ok(Self {
            u: canonical_gauge(u.into_iter().map(|z| z * f).collect()),
            m_abs,
        })
    }

    pub fn u(&self) -> &[Complex<T>] {
        &self.u
    }

    pub fn m_abs(&self) -> T {
        self.m_abs
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn abs_sq(&self) -> Vec<T> {
        self.u.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `√(2|M| − 2|⟨a, b⟩|)`: zero iff the points agree modulo phase.
    pub fn distance(&self, other: &Self) -> T {
        let inner = self
            .u
            .iter()
            .zip(&other.u)
            .fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| {
                s + a.conj() * b
            });
        let two = T::lit(2.0);
        (two * self.m_abs - two * inner.norm())
            .max(T::zero())
            .sqrt()
    }
}

fn canonical_gauge<T: Real>(mut u: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let mut best = 0;
    for (k, z) in u.iter().enumerate() {
        if z.norm_sqr() > u[best].norm_sqr() {
            best = k;
        }
    }
    let r = u[best].norm();
    if r > T::zero() {
        let phase = u[best].conj() / r;
        for z in u.iter_mut() {
            *z = *z * phase;
        }
        u[best] = Complex::new(r, T::zero());
    }
    u
}

/// The embedding `(ξ, θ) ↦ u` for one coupling, with its integer matrices.
#[derive(Debug, Clone)]
pub struct Embedding<T> {
    spec: CouplingSpec<T>,
    a: IntMatrix,
    omega: IntMatrix,
}

impl<T: Real> Embedding<T> {
    pub fn new(spec: CouplingSpec<T>) -> Result<Self> {
        let res = spec.residues();
        Ok(Self {
            spec,
            a: build_a(&res),
            omega: build_omega(&res)?,
        })
    }

    pub fn spec(&self) -> &CouplingSpec<T> {
        &self.spec
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn omega(&self) -> &IntMatrix {
        &self.omega
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// `sgn(M)·Σ_k Ω_{jk}θ_k` for `j < n`, and `0` for `j = n`.
    pub fn phases(&self, theta: &[T]) -> Vec<T> {
        let n = self.n();
        let sm = self.spec.sign_m();
        (0..n)
            .map(|j| {
                if j + 1 == n {
                    T::zero()
                } else {
                    sm * (0..n - 1).fold(T::zero(), |acc, k| {
                        acc + T::lit(self.omega.get(j, k) as f64) * theta[k]
                    })
                }
            })
            .collect()
    }

    /// `Δ_j = exp(iΣ_k Ω_{jk}θ_k)`, `Δ_n = 1`.
    pub fn delta(&self, theta: &[T]) -> Vec<Complex<T>> {
        let sm = self.spec.sign_m();
        self.phases(theta)
            .into_iter()
            .map(|ph| cis(ph * sm))
            .collect()
    }

    /// `u` in the gauge `arg u_n = 0`, before projective normalisation.
    pub fn embed_raw(&self, pt: &PhasePoint<T>) -> Result<Vec<Complex<T>>> {
        if pt.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: pt.n(),
            });
        }
        let slacks = window_slacks(pt.xi(), &self.spec);
        let min = min_of(&slacks);
        if !(min > T::zero()) {
            return Err(Error::NotInterior {
                min_slack: min.to_f64_lossy(),
            });
        }
        Ok(self.embed_unchecked(pt.xi(), pt.theta(), &slacks))
    }

    fn embed_unchecked(&self, _xi: &[T], theta: &[T], slacks: &[T]) -> Vec<Complex<T>> {
        self.phases(theta)
            .into_iter()
            .zip(slacks)
            .map(|(ph, &s)| cis(ph) * s.max(T::zero()).sqrt())
            .collect()
    }

    pub fn embed(&self, pt: &PhasePoint<T>) -> Result<ProjectivePoint<T>> {
        let u = self.embed_raw(pt)?;
        Ok(ProjectivePoint {
            u: canonical_gauge(u),
            m_abs: self.spec.m_abs(),
        })
    }

    /// `ξ` as a function of the moduli `|u_j|²` (only `j < n` enter).
    pub fn xi_from_moduli(&self, abs_sq: &[T]) -> Vec<T> {
        let n = self.n();
        let (y, sm, p) = (self.spec.y(), self.spec.sign_m(), self.spec.p());
        let shifted: Vec<T> = (0..n - 1)
            .map(|j| sm * abs_sq[j] + if j < n - p { y } else { y - T::PI() })
            .collect();
        let head: Vec<T> = (0..n - 1)
            .map(|k| {
                (0..n - 1).fold(T::zero(), |acc, j| {
                    acc + T::lit(self.omega.get(j, k) as f64) * shifted[j]
                })
            })
            .collect();
        AlcovePoint::from_independent(&head).into_vec()
    }

    pub fn xi_from_u(&self, u: &ProjectivePoint<T>) -> AlcovePoint<T> {
        AlcovePoint {
            xi: self.xi_from_moduli(&u.abs_sq()),
        }
    }

    /// Inverse of [`Embedding::embed`] on the open set `Π u_j ≠ 0`.
    pub fn chart(&self, u: &ProjectivePoint<T>) -> Result<PhasePoint<T>> {
        let n = self.n();
        let min = u.u().iter().fold(T::infinity(), |m, z| m.min(z.norm_sqr()));
        if !(min > T::zero()) {
            return Err(Error::NotInterior {
                min_slack: min.to_f64_lossy(),
            });
        }
        let xi = self.xi_from_u(u);
        let ref_phase = u.u()[n - 1].arg();
        let phi: Vec<T> = (0..n - 1).map(|j| u.u()[j].arg() - ref_phase).collect();
        let sm = self.spec.sign_m();
        let theta = (0..n - 1)
            .map(|k| {
                sm * (0..n - 1).fold(T::zero(), |acc, j| {
                    acc + T::lit(self.a.get(j, k) as f64) * phi[j]
                })
            })
            .collect();
        PhasePoint::new(xi, theta)
    }

    /// Pullback of `iΣdū∧du` in the chart coordinates `(θ_1.., ξ_1..)`, by
    /// central differences of the embedding with step `h`.
    pub fn pullback_form(&self, pt: &PhasePoint<T>, h: T) -> Result<Matrix<T>> {
        let n = self.n();
        let d = n - 1;
        let slacks = window_slacks(pt.xi(), &self.spec);
        let min = min_of(&slacks);
        if !(min > T::zero()) {
            return Err(Error::NotInterior {
                min_slack: min.to_f64_lossy(),
            });
        }
        let head = &pt.xi()[..d];
        let eval = |xi_h: &[T], th: &[T]| -> Vec<Complex<T>> {
            let full = AlcovePoint::from_independent(xi_h).into_vec();
            let s = window_slacks(&full, &self.spec);
            self.embed_unchecked(&full, th, &s)
        };
        let two_h = h + h;
        let mut jac: Vec<Vec<Complex<T>>> = Vec::with_capacity(2 * d);
        for a in 0..2 * d {
            let (mut xp, mut xm) = (head.to_vec(), head.to_vec());
            let (mut tp, mut tm) = (pt.theta().to_vec(), pt.theta().to_vec());
            if a < d {
                tp[a] = tp[a] + h;
                tm[a] = tm[a] - h;
            } else {
                xp[a - d] = xp[a - d] + h;
                xm[a - d] = xm[a - d] - h;
            }
            let up = eval(&xp, &tp);
            let um = eval(&xm, &tm);
            jac.push(up.iter().zip(&um).map(|(p, m)| (*p - *m) / two_h).collect());
        }
        Ok(Matrix::from_fn(2 * d, 2 * d, |a, b| {
            let s = jac[a]
                .iter()
                .zip(&jac[b])
                .fold(T::zero(), |acc, (x, y)| acc + (x.conj() * y).im);
            -(s + s)
        }))
    }

    /// Max-norm deviation of [`Embedding::pullback_form`] from `Σdθ_k∧dξ_k`.
    pub fn pullback_defect(&self, pt: &PhasePoint<T>, h: T) -> Result<T> {
        let w = self.pullback_form(pt, h)?;
        let d = self.n() - 1;
        let mut worst = T::zero();
        for a in 0..2 * d {
            for b in 0..2 * d {
                let target = if a < d && b == a + d {
                    T::one()
                } else if b < d && a == b + d {
                    -T::one()
                } else {
                    T::zero()
                };
                worst = worst.max((w[(a, b)] - target).abs());
            }
        }
        Ok(worst)
    }
}
