//! Local and global Lax matrices, trigonometric and elliptic.
//!
//! The global matrix is assembled from real component functions `Λ_{jℓ}(ξ)`
//! that stay finite where some `u_j` vanishes, times monomials `ū_j u_k`.

use num_complex::Complex;

use crate::coupling::CouplingSpec;
use crate::elliptic::{EllipticParams, Kernel, POLE_TOL};
use crate::error::{Error, Result};
use crate::geometry::{
    positions_x, separation, window, window_slacks, AlcovePoint, Embedding, PhasePoint,
    ProjectivePoint,
};
use crate::linalg::Matrix;
use crate::scalar::{cis, Real};

/// Radicands above `−RADICAND_TOL` are clamped to zero.
pub const RADICAND_TOL: f64 = 1e-12;

/// Which Lax matrix to build: trigonometric, or elliptic at spectral
/// parameter `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxModel<T> {
    kernel: Kernel<T>,
    lambda: Option<Complex<T>>,
}

impl<T: Real> LaxModel<T> {
    pub fn trig() -> Self {
        Self {
            kernel: Kernel::Trig,
            lambda: None,
        }
    }

    pub fn elliptic(params: EllipticParams<T>, lambda: Complex<T>) -> Result<Self> {
        let kernel = Kernel::Elliptic(params);
        let s = kernel.s_complex(lambda)?;
        if s.norm() < T::lit(POLE_TOL) * T::one().max(lambda.norm()) {
            return Err(Error::SpectralParameterOnLattice {
                re: lambda.re.to_f64_lossy(),
                im: lambda.im.to_f64_lossy(),
            });
        }
        Ok(Self {
            kernel,
            lambda: Some(lambda),
        })
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn lambda(&self) -> Option<Complex<T>> {
        self.lambda
    }

    pub fn is_trig(&self) -> bool {
        self.lambda.is_none()
    }

    pub fn name(&self) -> &'static str {
        if self.is_trig() {
            "trig"
        } else {
            "elliptic"
        }
    }

    // s(d + λ)/s(λ)
    fn spectral_factor(&self, d: T) -> Result<Complex<T>> {
        match self.lambda {
            None => Ok(Complex::new(T::one(), T::zero())),
            Some(l) => Ok(self.kernel.s_complex(l + d)? / self.kernel.s_complex(l)?),
        }
    }
}

/// An `n × n` Lax matrix tagged with its model.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix<T> {
    entries: Matrix<Complex<T>>,
    model: LaxModel<T>,
}

impl<T: Real> LaxMatrix<T> {
    pub fn entries(&self) -> &Matrix<Complex<T>> {
        &self.entries
    }

    pub fn model(&self) -> &LaxModel<T> {
        &self.model
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    pub fn det(&self) -> Complex<T> {
        self.entries.det()
    }

    pub fn unitarity_defect(&self) -> T {
        self.entries.unitarity_defect()
    }

    pub fn into_entries(self) -> Matrix<Complex<T>> {
        self.entries
    }
}

/// `sin y / sin(x_j − x_ℓ + y)`.
pub fn cauchy_trig<T: Real>(xi: &AlcovePoint<T>, y: T) -> Result<Matrix<Complex<T>>> {
    let n = xi.n();
    let x = positions_x(xi);
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let den = (x[j] - x[l] + y).sin();
            if den.abs() < T::epsilon() {
                return Err(Error::SingularDenominator {
                    row: j + 1,
                    col: l + 1,
                });
            }
            c[(j, l)] = Complex::new(y.sin() / den, T::zero());
        }
    }
    Ok(c)
}

/// `z_ℓ(ξ, ±y)` and their positive square roots.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightData<T> {
    pub z_plus: Vec<T>,
    pub z_minus: Vec<T>,
    pub v_plus: Vec<T>,
    pub v_minus: Vec<T>,
}

/// Bare product `Π_{m=ℓ+1}^{ℓ+n−1} f(S_{ℓm} ∓ y)/f(S_{ℓm})` without the
/// normalising sign; `sign` is `+1` for `z(ξ, y)`.
pub fn bare_weight<T: Real>(xi: &[T], l: usize, y: T, sign: T, kernel: &Kernel<T>) -> T {
    let n = xi.len();
    (1..n).fold(T::one(), |acc, len| {
        let s = window(xi, l, len);
        acc * kernel.s(s - sign * y) / kernel.s(s)
    })
}

pub fn weights<T: Real>(
    xi: &AlcovePoint<T>,
    spec: &CouplingSpec<T>,
    kernel: &Kernel<T>,
) -> Result<WeightData<T>> {
    let n = xi.n();
    let y = spec.y();
    let sg = kernel.s(T::from_usize_lossy(n) * y).sgn();
    let mut z_plus = Vec::with_capacity(n);
    let mut z_minus = Vec::with_capacity(n);
    for l in 1..=n {
        z_plus.push(sg * bare_weight(xi.xi(), l, y, T::one(), kernel));
        z_minus.push(sg * bare_weight(xi.xi(), l, y, -T::one(), kernel));
    }
    for (l, &z) in z_plus.iter().chain(&z_minus).enumerate() {
        if !(z > T::zero()) {
            return Err(Error::NonPositiveWeight {
                index: l % n + 1,
                value: z.to_f64_lossy(),
            });
        }
    }
    let v_plus = z_plus.iter().map(|z| z.sqrt()).collect();
    let v_minus = z_minus.iter().map(|z| z.sqrt()).collect();
    Ok(WeightData {
        z_plus,
        z_minus,
        v_plus,
        v_minus,
    })
}

/// `ρ_ℓ = e^{i(θ_{ℓ−1} − θ_ℓ)}` with `θ_0 = θ_n = 0`.
pub fn phase_factors<T: Real>(pt: &PhasePoint<T>) -> Vec<Complex<T>> {
    let t = pt.theta_padded();
    (1..=pt.n()).map(|l| cis(t[l - 1] - t[l])).collect()
}

fn check_interior<T: Real>(xi: &[T], spec: &CouplingSpec<T>) -> Result<()> {
    let min = window_slacks(xi, spec)
        .into_iter()
        .fold(T::infinity(), T::min);
    if !(min > T::zero()) {
        return Err(Error::NotInterior {
            min_slack: min.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Local Lax matrix on the chart `A_y^+ × T^{n−1}`.
pub fn local_lax<T: Real>(
    pt: &PhasePoint<T>,
    spec: &CouplingSpec<T>,
    model: &LaxModel<T>,
) -> Result<LaxMatrix<T>> {
    let n = pt.n();
    if n != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: n,
        });
    }
    check_interior(pt.xi(), spec)?;
    let kernel = model.kernel();
    let w = weights(pt.alcove(), spec, kernel)?;
    let rho = phase_factors(pt);
    let y = spec.y();
    let entries = match model.lambda() {
        None => {
            let c = cauchy_trig(pt.alcove(), y)?;
            Matrix::from_fn(n, n, |j, l| {
                c[(j, l)] * (w.v_plus[j] * w.v_minus[l]) * rho[l]
            })
        }
        Some(lambda) => {
            let pref = Complex::new(kernel.s(y), T::zero()) / kernel.s_complex(lambda)?;
            let mut m = Matrix::zeros(n, n);
            for j in 0..n {
                for l in 0..n {
                    let d = separation(pt.xi(), j + 1, l + 1);
                    let den = kernel.s(d + y);
                    if den.abs() < T::epsilon() {
                        return Err(Error::SingularDenominator {
                            row: j + 1,
                            col: l + 1,
                        });
                    }
                    let num = kernel.s_complex(lambda + d)?;
                    m[(j, l)] = pref * num / den * (w.v_plus[j] * w.v_minus[l]) * rho[l];
                }
            }
            m
        }
    };
    Ok(LaxMatrix {
        entries,
        model: model.clone(),
    })
}

/// `Δ(θ)⁻¹ · L^loc · Δ(θ)`, the form the global matrix must reproduce.
pub fn conjugated_local<T: Real>(
    pt: &PhasePoint<T>,
    emb: &Embedding<T>,
    model: &LaxModel<T>,
) -> Result<LaxMatrix<T>> {
    let loc = local_lax(pt, emb.spec(), model)?;
    let d = emb.delta(pt.theta());
    Ok(LaxMatrix {
        entries: loc.entries.conjugate_by_diagonal(&d),
        model: model.clone(),
    })
}

fn checked_sqrt<T: Real>(v: T, row: usize, col: usize) -> Result<T> {
    if v < -T::lit(RADICAND_TOL) {
        return Err(Error::NegativeRadicand {
            row,
            col,
            value: v.to_f64_lossy(),
        });
    }
    Ok(v.max(T::zero()).sqrt())
}

// index b with ℓ ≡ b + p (mod n), 1-based
#[inline]
fn shift_back(l: usize, n: usize, p: usize) -> usize {
    if l <= p {
        l + n - p
    } else {
        l - p
    }
}

/// Component functions `Λ_{jℓ}(ξ)`, with the regularising quotients
/// evaluated at the window slacks of `ξ`.
pub fn lambda_components<T: Real>(
    xi: &[T],
    spec: &CouplingSpec<T>,
    kernel: &Kernel<T>,
) -> Result<Matrix<T>> {
    let slacks = window_slacks(xi, spec);
    lambda_components_with(xi, &slacks, spec, kernel)
}

/// As [`lambda_components`], with the quotients `J_k = s(t)/t` taken at the
/// supplied `abs_sq[k]` instead. On the sphere the two agree.
pub fn lambda_components_with<T: Real>(
    xi: &[T],
    abs_sq: &[T],
    spec: &CouplingSpec<T>,
    kernel: &Kernel<T>,
) -> Result<Matrix<T>> {
    let n = spec.n();
    if xi.len() != n || abs_sq.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xi.len().min(abs_sq.len()),
        });
    }
    let (p, y, sm) = (spec.p(), spec.y(), spec.sign_m());
    let f = |t: T| kernel.s(t);
    let w = |start: usize, len: usize| window(xi, start, len);
    let jq: Vec<T> = abs_sq.iter().map(|&t| kernel.quotient(t)).collect();
    let jj = |k: usize| jq[k - 1];
    let sy = f(y);

    // Π_m √(f(S_{a,m}) f(S_{b,m}))
    let pair_den = |a: usize, b: usize, row: usize, col: usize| -> Result<T> {
        let mut d = T::one();
        for m in 1..n {
            let v = f(w(a, m)) * f(w(b, m));
            if !(v > T::zero()) {
                return Err(Error::SingularDenominator { row, col });
            }
            d = d * v.sqrt();
        }
        Ok(d)
    };

    let mut out = Matrix::zeros(n, n);
    for j in 1..=n {
        for l in 1..=n {
            let value = if j <= n - p && l == j + p {
                let num = (1..n)
                    .filter(|&m| m != p)
                    .fold(T::one(), |a, m| a * f(w(j, m) - y) * f(w(l, n - m) + y));
                -sm * sy * checked_sqrt(num, j, l)? / pair_den(j, l, j, l)?
            } else if j > n - p && l + n == j + p {
                let num = (1..n)
                    .filter(|&m| m != p)
                    .fold(T::one(), |a, m| a * f(w(j, m) - y) * f(w(l, n - m) + y));
                sm * sy * checked_sqrt(num, j, l)? / pair_den(j, l, j, l)?
            } else if j == l {
                let b = shift_back(j, n, p);
                let num = (1..n)
                    .filter(|&m| m != p)
                    .fold(T::one(), |a, m| a * f(w(j, m) - y) * f(w(j, n - m) + y));
                let mut den = T::one();
                for m in 1..n {
                    den = den * f(w(j, m));
                }
                if !(den.abs() > T::zero()) {
                    return Err(Error::SingularDenominator { row: j, col: l });
                }
                (jj(j) * jj(b)).sqrt() * checked_sqrt(num, j, l)? / den
            } else if j < l {
                let b = shift_back(l, n, p);
                let sg = if l <= p {
                    T::one()
                } else {
                    int_sign(j as i64 + p as i64 - l as i64)
                };
                let num = (1..n)
                    .filter(|&m| m != l - j && m != p)
                    .fold(T::one(), |a, m| a * f(w(j, m) - y) * f(w(l, n - m) + y));
                sy * (jj(j) * jj(b)).sqrt() / sg * checked_sqrt(num, j, l)? / pair_den(j, l, j, l)?
            } else {
                let b = shift_back(l, n, p);
                let sg = if l <= p {
                    int_sign(l as i64 + n as i64 - j as i64 - p as i64)
                } else {
                    T::one()
                };
                debug_assert!(sg != T::zero(), "special entries are handled above");
                let num = (1..n)
                    .filter(|&m| m != j - l && m != n - p)
                    .fold(T::one(), |a, m| a * f(w(j, n - m) - y) * f(w(l, m) + y));
                sy * (jj(j) * jj(b)).sqrt() / sg * checked_sqrt(num, j, l)? / pair_den(j, l, j, l)?
            };
            out[(j - 1, l - 1)] = value;
        }
    }
    Ok(out)
}

fn int_sign<T: Real>(k: i64) -> T {
    T::lit(k.signum() as f64)
}

/// Global Lax matrix at a projective point; smooth on all of `CP^{n−1}`.
pub fn global_lax<T: Real>(
    u: &ProjectivePoint<T>,
    emb: &Embedding<T>,
    model: &LaxModel<T>,
) -> Result<LaxMatrix<T>> {
    global_lax_raw(u.u(), emb, model)
}

/// Global Lax matrix evaluated on raw homogeneous coordinates. Off the
/// sphere this is a `U(1)`-invariant extension, which is what the flow
/// differentiates.
pub fn global_lax_raw<T: Real>(
    u: &[Complex<T>],
    emb: &Embedding<T>,
    model: &LaxModel<T>,
) -> Result<LaxMatrix<T>> {
    let spec = emb.spec();
    let n = spec.n();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let p = spec.p();
    let abs_sq: Vec<T> = u.iter().map(|z| z.norm_sqr()).collect();
    let xi = emb.xi_from_moduli(&abs_sq);
    let lam = lambda_components_with(&xi, &abs_sq, spec, model.kernel())?;
    let uu: Vec<Complex<T>> = if spec.m_positive() {
        u.to_vec()
    } else {
        u.iter().map(|z| z.conj()).collect()
    };
    let mut m = Matrix::zeros(n, n);
    for j in 1..=n {
        for l in 1..=n {
            let special = (j <= n - p && l == j + p) || (j > n - p && l + n == j + p);
            let mono = if special {
                Complex::new(T::one(), T::zero())
            } else {
                uu[j - 1].conj() * uu[shift_back(l, n, p) - 1]
            };
            let factor = model.spectral_factor(separation(&xi, j, l))?;
            m[(j - 1, l - 1)] = mono * factor * lam[(j - 1, l - 1)];
        }
    }
    Ok(LaxMatrix {
        entries: m,
        model: model.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn emb(n: usize, p: usize, y_over_pi: f64) -> Embedding<f64> {
        Embedding::new(CouplingSpec::new(n, p, y_over_pi * PI).unwrap()).unwrap()
    }

    // Both branches of every residue class for n ≤ 6, at fixed relative
    // positions inside each window.
    fn all_specs() -> Vec<Embedding<f64>> {
        let mut v = Vec::new();
        for n in 2..=6 {
            for w in crate::coupling::type1_intervals(n).unwrap() {
                for (iv, t) in [(w.below, 0.37), (w.above, 0.61)] {
                    let y = (iv.lo_f64() + t * (iv.hi_f64() - iv.lo_f64())) * PI;
                    v.push(Embedding::new(CouplingSpec::new(n, w.p, y).unwrap()).unwrap());
                }
            }
        }
        v
    }

    fn elliptic_model(kappa: f64, lambda: Complex<f64>) -> LaxModel<f64> {
        LaxModel::elliptic(EllipticParams::new(kappa).unwrap(), lambda).unwrap()
    }

    #[test]
    fn cauchy_examples() {
        let y = 0.2;
        let xi = AlcovePoint::new(vec![PI / 2.0, PI / 2.0]).unwrap();
        let c = cauchy_trig(&xi, y).unwrap();
        assert!((c[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((c[(0, 1)].re + y.sin() / y.cos()).abs() < 1e-14);
    }

    #[test]
    fn n2_weight_example() {
        let e = emb(2, 1, 0.24);
        let y = e.spec().y();
        let xi = AlcovePoint::new(vec![PI / 2.0, PI / 2.0]).unwrap();
        let w = weights(&xi, e.spec(), &Kernel::Trig).unwrap();
        assert!((w.z_plus[0] - y.cos()).abs() < 1e-15);
    }

    #[test]
    fn bare_weight_sign_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for e in all_specs() {
            let s = e.spec();
            let expect = if (s.p() - 1) % 2 == 0 { 1.0 } else { -1.0 } * s.sign_m();
            for _ in 0..100 {
                let pt = sampling::interior_phase_point(&e, &mut rng);
                for l in 1..=s.n() {
                    for sign in [1.0, -1.0] {
                        assert_eq!(
                            bare_weight(pt.xi(), l, s.y(), sign, &Kernel::Trig).signum(),
                            expect
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn global_matches_conjugated_local_trig() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = LaxModel::trig();
        for e in all_specs() {
            for _ in 0..30 {
                let pt = sampling::interior_phase_point(&e, &mut rng);
                let u = e.embed_raw(&pt).unwrap();
                let g = global_lax_raw(&u, &e, &model).unwrap();
                let c = conjugated_local(&pt, &e, &model).unwrap();
                let d = g.entries().max_abs_diff(c.entries());
                assert!(
                    d < 1e-10,
                    "n={} p={} M={} defect {d}",
                    e.n(),
                    e.spec().p(),
                    e.spec().m()
                );
                assert!(g.unitarity_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn global_matches_conjugated_local_elliptic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let model = elliptic_model(1.0, Complex::new(0.3, 0.7));
        for e in all_specs().into_iter().filter(|e| e.n() <= 5) {
            for _ in 0..10 {
                let pt = sampling::interior_phase_point(&e, &mut rng);
                let u = e.embed_raw(&pt).unwrap();
                let g = global_lax_raw(&u, &e, &model).unwrap();
                let c = conjugated_local(&pt, &e, &model).unwrap();
                let d = g.entries().max_abs_diff(c.entries());
                assert!(d < 1e-8, "defect {d}");
            }
        }
    }

    #[test]
    fn theta_zero_gives_local_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let e = emb(5, 3, 0.55);
        let pt = sampling::interior_phase_point(&e, &mut rng);
        let pt = PhasePoint::new(pt.alcove().clone(), vec![0.0; 4]).unwrap();
        let g = global_lax_raw(&e.embed_raw(&pt).unwrap(), &e, &LaxModel::trig()).unwrap();
        let loc = local_lax(&pt, e.spec(), &LaxModel::trig()).unwrap();
        assert!(g.entries().max_abs_diff(loc.entries()) < 1e-12);
        // the components are the entries divided by |u| monomials
        let lam = lambda_components(pt.xi(), e.spec(), &Kernel::Trig).unwrap();
        let s = window_slacks(pt.xi(), e.spec());
        let (n, p) = (5, 3);
        for j in 1..=n {
            for l in 1..=n {
                let special = (j <= n - p && l == j + p) || (j > n - p && l + n == j + p);
                let mono = if special {
                    1.0
                } else {
                    (s[j - 1] * s[shift_back(l, n, p) - 1]).sqrt()
                };
                assert!((lam[(j - 1, l - 1)] * mono - l_re(&l_entry(&loc, j, l))).abs() < 1e-10);
            }
        }
    }

    fn l_entry(m: &LaxMatrix<f64>, j: usize, l: usize) -> Complex<f64> {
        m.entries()[(j - 1, l - 1)]
    }

    fn l_re(z: &Complex<f64>) -> f64 {
        assert!(z.im.abs() < 1e-12);
        z.re
    }

    #[test]
    fn boundary_points_are_finite_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let model = LaxModel::trig();
        for e in all_specs() {
            for _ in 0..10 {
                let u = sampling::random_boundary_point(&e, &mut rng);
                let g = global_lax(&u, &e, &model).unwrap();
                assert!(g
                    .entries()
                    .data()
                    .iter()
                    .all(|z| z.re.is_finite() && z.im.is_finite()));
                assert!(g.unitarity_defect() < 1e-10);
                let det = g.det();
                assert!((det.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn determinant_is_sign_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for e in all_specs() {
            let s = e.spec();
            let sg = (s.n() as f64 * s.y()).sin().signum().powi(s.n() as i32);
            for _ in 0..10 {
                let u = sampling::sphere_point(&e, &mut rng);
                let det = global_lax(&u, &e, &LaxModel::trig()).unwrap().det();
                assert!((det - Complex::new(sg, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn special_components_carry_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for e in all_specs() {
            let (n, p) = (e.n(), e.spec().p());
            let pt = sampling::interior_phase_point(&e, &mut rng);
            let lam = lambda_components(pt.xi(), e.spec(), &Kernel::Trig).unwrap();
            let sy = e.spec().y().sin();
            for j in 1..=n - p {
                assert!((lam[(j - 1, j + p - 1)] * -e.spec().sign_m() * sy) >= 0.0);
            }
        }
    }

    #[test]
    fn gauge_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let e = emb(4, 3, 0.7);
        let u = sampling::sphere_point(&e, &mut rng);
        let rot: Vec<_> = u.u().iter().map(|z| z * cis(0.77)).collect();
        let a = global_lax_raw(u.u(), &e, &LaxModel::trig()).unwrap();
        let b = global_lax_raw(&rot, &e, &LaxModel::trig()).unwrap();
        assert!(a.entries().max_abs_diff(b.entries()) < 1e-13);
    }

    #[test]
    fn eigenvalues_on_unit_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for e in all_specs() {
            let u = sampling::sphere_point(&e, &mut rng);
            let g = global_lax(&u, &e, &LaxModel::trig()).unwrap();
            for ev in crate::linalg::eigenvalues(g.entries()) {
                assert!((ev.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn elliptic_weights_approach_trig() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let kernel = Kernel::Elliptic(EllipticParams::new(20.0).unwrap());
        for e in all_specs() {
            let pt = sampling::interior_phase_point_with_margin(&e, &mut rng, 1e-3);
            let a = weights(pt.alcove(), e.spec(), &Kernel::Trig).unwrap();
            let b = weights(pt.alcove(), e.spec(), &kernel).unwrap();
            for (x, y) in a
                .z_plus
                .iter()
                .zip(&b.z_plus)
                .chain(a.z_minus.iter().zip(&b.z_minus))
            {
                assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn continuity_across_vanishing_coordinate() {
        let e = emb(3, 2, 0.6);
        let m = e.spec().m_abs();
        let path = |t: f64| {
            let a = Complex::new(t, 0.3 * t);
            let b = Complex::new(0.6, -0.2);
            let c = Complex::new(0.5, 0.4);
            ProjectivePoint::normalized(vec![a, b, c], m).unwrap()
        };
        let at0 = global_lax(&path(0.0), &e, &LaxModel::trig()).unwrap();
        for &t in &[1e-3, -1e-3, 1e-5, -1e-5] {
            let near = global_lax(&path(t), &e, &LaxModel::trig()).unwrap();
            assert!(near.entries().max_abs_diff(at0.entries()) < 5.0 * t.abs());
        }
    }

    #[test]
    fn rejects_lattice_lambda() {
        let p = EllipticParams::new(1.0).unwrap();
        assert!(matches!(
            LaxModel::elliptic(p.clone(), Complex::new(PI, 2.0)),
            Err(Error::SpectralParameterOnLattice { .. })
        ));
        assert!(LaxModel::elliptic(p, Complex::new(0.5, 0.5)).is_ok());
    }

    #[test]
    fn outside_point_gives_negative_radicand_or_weight_error() {
        let e = emb(3, 1, 0.2);
        let xi = [PI - 0.2, 0.1, 0.1];
        assert!(
            lambda_components(&xi, e.spec(), &Kernel::Trig).is_err()
                || weights(
                    &AlcovePoint::new(xi.to_vec()).unwrap(),
                    e.spec(),
                    &Kernel::Trig
                )
                .is_err()
        );
    }
}
