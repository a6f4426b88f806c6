//! Coupling classification: excluded values, type (i) windows and type (ii).
//!
//! A coupling `y ∈ (0, π)` is excluded when `e^{2imy} = 1` for some
//! `m ∈ {1, …, n}`. Otherwise it is type (i) when it lies in one of the two
//! open windows attached to a residue `p` coprime to `n`,
//!
//! ```text
//! (p/n − 1/(nq))·π  <  y  <  p·π/n          (M > 0)
//! p·π/n             <  y  <  (p/n + 1/((n−q)n))·π   (M < 0)
//! ```
//!
//! with `q = p⁻¹ mod n` and `M = pπ − ny`, and type (ii) in every other case.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Distance to an excluded value (or an interval endpoint) below which a
/// coupling is treated as sitting on it.
pub const DEFAULT_Y_TOL: f64 = 1e-12;

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Multiplicative inverse of `p` in `Z_n`, found by exhaustive search.
pub fn mod_inverse(p: usize, n: usize) -> Result<usize> {
    if n < 2 || p == 0 || p >= n {
        return Err(Error::OutOfRange {
            what: "1 <= p < n",
            value: p as f64,
        });
    }
    if gcd(p, n) != 1 {
        return Err(Error::NotCoprime { p, n });
    }
    (1..n)
        .find(|q| (p * q) % n == 1)
        .ok_or(Error::NotCoprime { p, n })
}

/// The pair `(n, p)` together with `q = p⁻¹ mod n`. Everything integral
/// about a type (i) system depends only on this triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residues {
    n: usize,
    p: usize,
    q: usize,
}

impl Residues {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        let q = mod_inverse(p, n)?;
        Ok(Self { n, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Both type (i) windows for this residue, in units of π.
    pub fn window(&self) -> TypeIWindow {
        let (n, p, q) = (self.n as i64, self.p as i64, self.q as i64);
        let mid = Ratio::new(p, n);
        TypeIWindow {
            p: self.p,
            q: self.q,
            below: RationalInterval {
                lo: Ratio::new(p * q - 1, n * q),
                hi: mid,
            },
            above: RationalInterval {
                lo: mid,
                hi: Ratio::new(p * (n - q) + 1, (n - q) * n),
            },
        }
    }
}

/// Open interval with rational endpoints, in units of π.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: Ratio<i64>,
    pub hi: Ratio<i64>,
}

impl RationalInterval {
    pub fn lo_f64(&self) -> f64 {
        ratio_to_f64(self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        ratio_to_f64(self.hi)
    }

    /// Strict membership of `y` (radians) with an absolute margin `tol`.
    pub fn contains<T: Real>(&self, y: T, tol: T) -> bool {
        let pi = T::PI();
        let lo = T::lit(self.lo_f64()) * pi;
        let hi = T::lit(self.hi_f64()) * pi;
        y > lo + tol && y < hi - tol
    }
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The two type (i) windows attached to a residue `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIWindow {
    pub p: usize,
    pub q: usize,
    /// Window below `pπ/n`, where `M > 0`.
    pub below: RationalInterval,
    /// Window above `pπ/n`, where `M < 0`.
    pub above: RationalInterval,
}

/// All type (i) windows for `n`, ordered by `p`.
pub fn type1_intervals(n: usize) -> Result<Vec<TypeIWindow>> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n >= 2",
            value: n as f64,
        });
    }
    Ok((1..n)
        .filter(|&p| gcd(p, n) == 1)
        .map(|p| Residues::new(n, p).expect("coprime by filter").window())
        .collect())
}

/// The excluded values `kπ/m` (`1 ≤ k < m ≤ n`) in units of π, reduced,
/// sorted and deduplicated.
pub fn excluded_values(n: usize) -> Vec<Ratio<i64>> {
    let mut v: Vec<Ratio<i64>> = (1..=n as i64)
        .flat_map(|m| (1..m).map(move |k| Ratio::new(k, m)))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Validated type (i) coupling data `(n, p, q, y, M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec<T> {
    residues: Residues,
    y: T,
    m: T,
}

impl<T: Real> CouplingSpec<T> {
    /// Builds a spec for a given residue `p`, checking that `y` lies strictly
    /// inside one of its windows (margin [`DEFAULT_Y_TOL`]).
    pub fn new(n: usize, p: usize, y: T) -> Result<Self> {
        Self::with_tolerance(n, p, y, T::lit(DEFAULT_Y_TOL))
    }

    pub fn with_tolerance(n: usize, p: usize, y: T, tol: T) -> Result<Self> {
        let residues = Residues::new(n, p)?;
        if !(y > T::zero() && y < T::PI()) {
            return Err(Error::OutOfRange {
                what: "0 < y < pi",
                value: y.to_f64_lossy(),
            });
        }
        if let Some((k, m)) = nearest_excluded(n, y, tol) {
            return Err(Error::InvalidCoupling(format!(
                "y is the excluded value {k}pi/{m}"
            )));
        }
        let w = residues.window();
        if !(w.below.contains(y, tol) || w.above.contains(y, tol)) {
            return Err(Error::InvalidCoupling(format!(
                "y/pi = {} is not in a type (i) window of p = {p}, n = {n}",
                (y / T::PI()).to_f64_lossy()
            )));
        }
        let m = T::from_usize_lossy(p) * T::PI() - T::from_usize_lossy(n) * y;
        Ok(Self { residues, y, m })
    }

    /// Builds a coupling from `y` alone, searching all residues.
    pub fn from_y(n: usize, y: T) -> Result<Self> {
        match classify_y(n, y, T::lit(DEFAULT_Y_TOL))? {
            Classification::TypeI(spec) => Ok(spec),
            Classification::Excluded { k, m } => Err(Error::InvalidCoupling(format!(
                "y is the excluded value {k}pi/{m}"
            ))),
            Classification::TypeII => {
                Err(Error::InvalidCoupling("y is a type (ii) coupling".into()))
            }
        }
    }

    pub fn residues(&self) -> Residues {
        self.residues
    }

    pub fn n(&self) -> usize {
        self.residues.n
    }

    pub fn p(&self) -> usize {
        self.residues.p
    }

    pub fn q(&self) -> usize {
        self.residues.q
    }

    pub fn y(&self) -> T {
        self.y
    }

    /// `M = pπ − ny`.
    pub fn m(&self) -> T {
        self.m
    }

    pub fn m_abs(&self) -> T {
        self.m.abs()
    }

    /// `sgn(M)` as a scalar, never zero.
    pub fn sign_m(&self) -> T {
        if self.m > T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }

    pub fn m_positive(&self) -> bool {
        self.m > T::zero()
    }

    /// The window of the residue containing `y`.
    pub fn interval(&self) -> RationalInterval {
        let w = self.residues.window();
        if self.m_positive() {
            w.below
        } else {
            w.above
        }
    }
}

/// Verdict of [`classify_y`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification<T> {
    /// `y = kπ/m` with `m` the smallest such denominator.
    Excluded {
        k: usize,
        m: usize,
    },
    TypeI(CouplingSpec<T>),
    TypeII,
}

impl<T> Classification<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Excluded { .. } => "excluded",
            Self::TypeI(_) => "type_i",
            Self::TypeII => "type_ii",
        }
    }
}

fn nearest_excluded<T: Real>(n: usize, y: T, tol: T) -> Option<(usize, usize)> {
    let pi = T::PI();
    for m in 1..=n {
        for k in 1..m {
            let v = T::from_usize_lossy(k) * pi / T::from_usize_lossy(m);
            if (y - v).abs() <= tol {
                let g = gcd(k, m);
                return Some((k / g, m / g));
            }
        }
    }
    None
}

/// Classifies `y ∈ (0, π)` for `n` particles.
pub fn classify_y<T: Real>(n: usize, y: T, tol: T) -> Result<Classification<T>> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n >= 2",
            value: n as f64,
        });
    }
    if !(y > T::zero() && y < T::PI()) {
        return Err(Error::OutOfRange {
            what: "0 < y < pi",
            value: y.to_f64_lossy(),
        });
    }
    if let Some((k, m)) = nearest_excluded(n, y, tol) {
        return Ok(Classification::Excluded { k, m });
    }
    for p in (1..n).filter(|&p| gcd(p, n) == 1) {
        if let Ok(spec) = CouplingSpec::with_tolerance(n, p, y, tol) {
            return Ok(Classification::TypeI(spec));
        }
    }
    Ok(Classification::TypeII)
}

/// Number of negative factors `1 − sin²y / sin²(kπ/n)` in each product of
/// the Hamiltonian at the equal-distance configuration, by the closed form
/// `2⌊ny/π⌋` (`y < π/2`) or `2⌊n(π − y)/π⌋` (`y > π/2`).
pub fn negative_factor_count<T: Real>(n: usize, y: T) -> Result<usize> {
    let tol = T::lit(DEFAULT_Y_TOL);
    let pi = T::PI();
    if !(y > T::zero() && y < pi) {
        return Err(Error::OutOfRange {
            what: "0 < y < pi",
            value: y.to_f64_lossy(),
        });
    }
    if nearest_excluded(n, y, tol).is_some() || (y - pi / T::lit(2.0)).abs() <= tol {
        return Err(Error::OutOfRange {
            what: "y not excluded and y != pi/2",
            value: y.to_f64_lossy(),
        });
    }
    let nn = T::from_usize_lossy(n);
    let t = if y < pi / T::lit(2.0) {
        nn * y / pi
    } else {
        nn * (pi - y) / pi
    };
    Ok(2 * t.floor().to_usize().unwrap_or(0))
}

/// Direct sign count of the factors `1 − sin²y/sin²(kπ/n)`, `k = 1, …, n−1`.
pub fn count_negative_factors<T: Real>(n: usize, y: T) -> usize {
    let s2 = y.sin().powi(2);
    let nn = T::from_usize_lossy(n);
    (1..n)
        .filter(|&k| {
            let d = (T::from_usize_lossy(k) * T::PI() / nn).sin().powi(2);
            T::one() - s2 / d < T::zero()
        })
        .count()
}
