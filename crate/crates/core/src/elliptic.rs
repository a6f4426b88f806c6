//! The s-function (a normalised Weierstrass σ), differences of ℘, and the
//! regularised quotient `s(t)/t`.
//!
//! With real half-period `ω` and imaginary half-period `ω' = iκ`,
//!
//! ```text
//! s(z) = (2ω/π) sin(πz/2ω) ∏_{m≥1} [1 + sin²(πz/2ω) / sinh²(mπκ/ω)]
//! ```
//!
//! and `℘(z') − ℘(z) = s(z+z') s(z−z') / (s(z)² s(z')²)`. The product is cut
//! once the remaining factors provably differ from 1 by less than `eps/2` in
//! total: with `c = πκ/ω` and `r = e^{−2c}`, `sinh(mc) ≥ e^{mc}(1−r)/2`, so the
//! tail after `m` factors is at most `|sin|²·4e^{−2(m+1)c}/(1−r)³`.
//!
//! [`Kernel::Trig`] is the `κ → ∞` degeneration where `s = sin` exactly.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default target accuracy of the truncated product.
pub const DEFAULT_EPS: f64 = 1e-16;
/// Largest admissible truncation order.
pub const MAX_ORDER: usize = 1_000_000;
/// `|s(z)|` below this (times `max(1, |z|)`) counts as a lattice point.
pub const POLE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticParams<T> {
    omega: T,
    kappa: T,
    eps: T,
    // 1/sinh²(mπκ/ω) for m = 1..=real_order
    inv_sinh_sq: Vec<T>,
}

impl<T: Real> EllipticParams<T> {
    /// `ω = π/2`, `ω' = iκ`, default accuracy.
    pub fn new(kappa: T) -> Result<Self> {
        Self::with_eps(kappa, T::lit(DEFAULT_EPS))
    }

    pub fn with_eps(kappa: T, eps: T) -> Result<Self> {
        Self::with_half_periods(T::FRAC_PI_2(), kappa, eps)
    }

    /// General half-periods `ω > 0`, `ω' = i·kappa`, used for the scaling law.
    pub fn with_half_periods(omega: T, kappa: T, eps: T) -> Result<Self> {
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::OutOfRange {
                what: "kappa > 0",
                value: kappa.to_f64_lossy(),
            });
        }
        if !(eps > T::zero()) {
            return Err(Error::OutOfRange {
                what: "eps > 0",
                value: eps.to_f64_lossy(),
            });
        }
        if !(omega > T::zero()) {
            return Err(Error::OutOfRange {
                what: "omega > 0",
                value: omega.to_f64_lossy(),
            });
        }
        let mut p = Self {
            omega,
            kappa,
            eps,
            inv_sinh_sq: Vec::new(),
        };
        // |sin|² ≤ 1 on the real axis
        let order = p
            .order_for(T::one())
            .map_err(|_| Error::TruncationOverflow {
                im: 0.0,
                cap: MAX_ORDER,
            })?;
        p.inv_sinh_sq = (1..=order).map(|m| p.inv_sinh_sq_at(m)).collect();
        Ok(p)
    }

    /// Same function on the lattice scaled by `t`: `s(tz; tω, tω') = t·s(z; ω, ω')`.
    pub fn rescaled(&self, t: T) -> Result<Self> {
        Self::with_half_periods(self.omega * t, self.kappa * t, self.eps)
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Truncation order used for every real argument.
    pub fn real_order(&self) -> usize {
        self.inv_sinh_sq.len()
    }

    fn rate(&self) -> T {
        T::PI() * self.kappa / self.omega
    }

    fn inv_sinh_sq_at(&self, m: usize) -> T {
        match self.inv_sinh_sq.get(m.wrapping_sub(1)) {
            Some(&v) => v,
            None => {
                let s = (T::from_usize_lossy(m) * self.rate()).sinh();
                T::one() / (s * s)
            }
        }
    }

    /// Smallest order whose tail bound is below `eps/2`, given `|sin(πz/2ω)|²`.
    pub fn order_for(&self, sin_abs_sq: T) -> Result<usize> {
        let c = self.rate();
        let r = (-(c + c)).exp();
        let one_minus_r = T::one() - r;
        let x = sin_abs_sq.max(T::min_positive_value());
        let arg = T::lit(8.0) * x / (self.eps * one_minus_r.powi(3));
        let need = arg.ln() / (c + c);
        let cap = T::from_usize_lossy(MAX_ORDER);
        if !need.is_finite() || need > cap {
            return Err(Error::TruncationOverflow {
                im: f64::NAN,
                cap: MAX_ORDER,
            });
        }
        let m = need.ceil().to_usize().unwrap_or(0).saturating_sub(1);
        Ok(m.max(1))
    }

    fn s_real(&self, x: T) -> T {
        let a = T::PI() * x / (self.omega + self.omega);
        let sa = a.sin();
        let s2 = sa * sa;
        let prod = self
            .inv_sinh_sq
            .iter()
            .fold(T::one(), |acc, &w| acc * (T::one() + s2 * w));
        (self.omega + self.omega) / T::PI() * sa * prod
    }

    fn s_complex(&self, z: Complex<T>) -> Result<Complex<T>> {
        let scale = (self.omega + self.omega) / T::PI();
        let a = z / scale;
        let sa = a.sin();
        let order = self
            .order_for(sa.norm_sqr())
            .map_err(|_| Error::TruncationOverflow {
                im: z.im.to_f64_lossy(),
                cap: MAX_ORDER,
            })?;
        let s2 = sa * sa;
        let mut prod = Complex::new(T::one(), T::zero());
        for m in 1..=order {
            prod = prod * (Complex::new(T::one(), T::zero()) + s2 * self.inv_sinh_sq_at(m));
        }
        Ok(sa * prod * scale)
    }

    // s(t)/t, extended evenly through t = 0
    fn quotient(&self, t: T) -> T {
        let a = T::PI() * t / (self.omega + self.omega);
        let sa = a.sin();
        let s2 = sa * sa;
        let prod = self
            .inv_sinh_sq
            .iter()
            .fold(T::one(), |acc, &w| acc * (T::one() + s2 * w));
        sinc(a) * prod
    }
}

/// `sin(a)/a` with the removable singularity filled.
fn sinc<T: Real>(a: T) -> T {
    if a.abs() < T::lit(1e-4) {
        let a2 = a * a;
        T::one() - a2 / T::lit(6.0) + a2 * a2 / T::lit(120.0)
    } else {
        a.sin() / a
    }
}

/// Which odd, π-antiperiodic function the Lax matrices are built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel<T> {
    /// `s = sin`.
    Trig,
    Elliptic(EllipticParams<T>),
}

impl<T: Real> Kernel<T> {
    /// Real-axis evaluation; no imaginary part is ever formed.
    #[inline]
    pub fn s(&self, x: T) -> T {
        match self {
            Self::Trig => x.sin(),
            Self::Elliptic(p) => p.s_real(x),
        }
    }

    pub fn s_complex(&self, z: Complex<T>) -> Result<Complex<T>> {
        if z.im == T::zero() {
            return Ok(Complex::new(self.s(z.re), T::zero()));
        }
        match self {
            Self::Trig => Ok(z.sin()),
            Self::Elliptic(p) => p.s_complex(z),
        }
    }

    /// `s(t)/t` for any real `t`, with value 1 at `t = 0`.
    pub fn quotient(&self, t: T) -> T {
        match self {
            Self::Trig => sinc(t),
            Self::Elliptic(p) => p.quotient(t),
        }
    }

    pub fn is_trig(&self) -> bool {
        matches!(self, Self::Trig)
    }
}

/// Truncated product for `s(z)`.
pub fn s_eval<T: Real>(z: Complex<T>, kernel: &Kernel<T>) -> Result<Complex<T>> {
    kernel.s_complex(z)
}

fn check_pole<T: Real>(z: Complex<T>, sz: Complex<T>) -> Result<()> {
    let scale = T::one().max(z.norm());
    if sz.norm() < T::lit(POLE_TOL) * scale {
        return Err(Error::PoleAtLatticePoint {
            re: z.re.to_f64_lossy(),
            im: z.im.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `℘(z') − ℘(z)` through the s-function identity.
pub fn wp_diff<T: Real>(
    zprime: Complex<T>,
    z: Complex<T>,
    kernel: &Kernel<T>,
) -> Result<Complex<T>> {
    let sz = kernel.s_complex(z)?;
    let szp = kernel.s_complex(zprime)?;
    check_pole(z, sz)?;
    check_pole(zprime, szp)?;
    let num = kernel.s_complex(z + zprime)? * kernel.s_complex(z - zprime)?;
    Ok(num / (sz * sz * szp * szp))
}

/// `s(t)/t` on `[0, π)`.
pub fn j_reg<T: Real>(t: T, kernel: &Kernel<T>) -> Result<T> {
    if !(t >= T::zero() && t < T::PI()) {
        return Err(Error::OutOfRange {
            what: "0 <= t < pi",
            value: t.to_f64_lossy(),
        });
    }
    Ok(kernel.quotient(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ell(kappa: f64) -> Kernel<f64> {
        Kernel::Elliptic(EllipticParams::new(kappa).unwrap())
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    // Plain product with a fixed, generous number of factors.
    fn brute_s(z: Complex<f64>, kappa: f64, terms: usize) -> Complex<f64> {
        let mut p = z.sin();
        for m in 1..=terms {
            let sh = (2.0 * m as f64 * kappa).sinh();
            p *= 1.0 + z.sin().powi(2) / (sh * sh);
        }
        p
    }

    #[test]
    fn zero_at_origin_and_trig_limit() {
        assert_eq!(ell(1.5).s(0.0), 0.0);
        let v = ell(20.0).s(PI / 4.0);
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_long_product() {
        for &kappa in &[0.3, 1.0, 1.5, 4.0] {
            let k = ell(kappa);
            for &z in &[c(0.37, 0.0), c(1.2, 0.4), c(-0.7, 2.0), c(3.0, -1.1)] {
                let a = k.s_complex(z).unwrap();
                let b = brute_s(z, kappa, 400);
                assert!(
                    (a - b).norm() <= 1e-14 * (1.0 + b.norm()),
                    "kappa={kappa} z={z}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn antiperiodic_and_odd() {
        let k = ell(1.5);
        let z = 0.37;
        assert!((k.s(z + PI) + k.s(z)).abs() < 1e-15);
        let zc = c(0.4, 0.9);
        let a = k.s_complex(zc + PI).unwrap();
        let b = k.s_complex(zc).unwrap();
        assert!((a + b).norm() < 1e-14);
        assert!((k.s_complex(-zc).unwrap() + b).norm() < 1e-15);
    }

    #[test]
    fn scaling_law() {
        let base = EllipticParams::<f64>::new(1.0).unwrap();
        let scaled = Kernel::Elliptic(base.rescaled(2.0).unwrap());
        let lhs = scaled.s(2.0 * 0.3);
        let rhs = 2.0 * Kernel::Elliptic(base).s(0.3);
        assert!((lhs - rhs).abs() < 1e-15, "{lhs} vs {rhs}");
    }

    #[test]
    fn real_input_stays_real() {
        let v = s_eval(c(1.1, 0.0), &ell(0.8)).unwrap();
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn wp_diff_properties() {
        let k = ell(1.2);
        let z = c(0.8, 0.3);
        assert!(wp_diff(z, z, &k).unwrap().norm() < 1e-15);
        let a = wp_diff(c(0.5, 0.1), c(1.0, -0.2), &k).unwrap();
        let b = wp_diff(c(1.0, -0.2), c(0.5, 0.1), &k).unwrap();
        assert!((a + b).norm() < 1e-13);
        let t = wp_diff(c(0.5, 0.0), c(1.0, 0.0), &ell(20.0)).unwrap();
        let expect = 1.0 / 0.5_f64.sin().powi(2) - 1.0 / 1.0_f64.sin().powi(2);
        assert!((t.re - expect).abs() < 1e-8);
        assert!(matches!(
            wp_diff(c(0.5, 0.0), c(0.0, 0.0), &k),
            Err(Error::PoleAtLatticePoint { .. })
        ));
        assert!(matches!(
            wp_diff(c(PI, 0.0), c(0.5, 0.0), &k),
            Err(Error::PoleAtLatticePoint { .. })
        ));
    }

    #[test]
    fn j_reg_values() {
        assert_eq!(j_reg(0.0, &Kernel::Trig).unwrap(), 1.0);
        assert!((j_reg(PI / 2.0, &Kernel::Trig).unwrap() - 2.0 / PI).abs() < 1e-16);
        let k = ell(1.5);
        let j = j_reg(0.3, &k).unwrap();
        assert!(j > 0.0 && (j - k.s(0.3) / 0.3).abs() < 1e-15);
        assert!(j_reg(-0.1, &k).is_err());
        assert!(j_reg(PI, &k).is_err());
    }

    #[test]
    fn j_reg_smooth_near_zero() {
        for &t in &[1e-3_f64, 1e-6, 1e-9] {
            let v = j_reg(t, &Kernel::Trig).unwrap();
            assert!((v - (1.0 - t * t / 6.0)).abs() < 1e-13, "t={t}");
        }
        // on the elliptic side the quadratic coefficient changes but stays even
        let k = ell(1.0);
        for &t in &[1e-3, 1e-6] {
            let a = (1.0 - j_reg(t, &k).unwrap()) / (t * t);
            let b = (1.0 - j_reg(2.0 * t, &k).unwrap()) / (4.0 * t * t);
            assert!((a - b).abs() < 1e-4, "t={t} {a} {b}");
        }
    }

    #[test]
    fn positive_on_open_interval() {
        for &kappa in &[0.2, 1.0, 5.0] {
            let k = ell(kappa);
            for i in 1..100 {
                assert!(k.s(PI * i as f64 / 100.0) > 0.0);
            }
        }
    }

    #[test]
    fn trig_limit_decay_rate() {
        // leading correction ~ sin z · sin²z / sinh²(2κ) ~ e^{-4κ}
        let z = 1.0;
        let err = |kappa: f64| (ell(kappa).s(z) - z.sin()).abs();
        let (e2, e4, e8) = (err(2.0), err(4.0), err(8.0));
        let rate_lo = (e2 / e4).ln() / 2.0;
        let rate_hi = (e4 / e8).ln() / 4.0;
        assert!(rate_lo >= 3.8 && rate_hi >= 3.8, "{rate_lo} {rate_hi}");
    }

    #[test]
    fn truncation_overflow_for_huge_imaginary_part() {
        let k = ell(0.5);
        assert!(matches!(
            k.s_complex(c(0.1, 1e4)),
            Err(Error::TruncationOverflow { .. })
        ));
        assert!(matches!(
            EllipticParams::<f64>::new(1e-7),
            Err(Error::TruncationOverflow { .. })
        ));
        assert!(EllipticParams::<f64>::new(0.0).is_err());
    }

    #[test]
    fn order_grows_with_imaginary_part() {
        let p = EllipticParams::new(1.0).unwrap();
        let lo = p.order_for(1.0).unwrap();
        let hi = p.order_for((3.0_f64).cosh().powi(2)).unwrap();
        assert!(hi > lo && lo >= 1);
    }
}
