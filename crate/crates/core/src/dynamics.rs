//! Hamiltonians, spectral invariants, Poisson brackets and the Hamiltonian
//! flow on `CP^{n−1}` in homogeneous coordinates.
//!
//! Brackets: on the chart `{θ_k, ξ_l} = δ_{kl}`; in homogeneous coordinates
//! `{f, g} = i Σ_j (∂f/∂u_j ∂g/∂ū_j − ∂f/∂ū_j ∂g/∂u_j)`, so that
//! `{arg u_j, |u_j|²} = 1` matches the chart. The flow of `H` is then
//! `u̇_j = i ∂H/∂ū_j`.

use num_complex::Complex;

use crate::coupling::CouplingSpec;
use crate::elliptic::{wp_diff, Kernel};
use crate::error::{Error, Result};
use crate::geometry::{window, window_slacks, Embedding, PhasePoint, ProjectivePoint};
use crate::lax::{global_lax_raw, local_lax, LaxMatrix, LaxModel};
use crate::linalg::Matrix;
use crate::ode::{integrate, Tolerances};
use crate::scalar::Real;

/// Default finite-difference step for gradients in `u`.
pub const DEFAULT_U_STEP: f64 = 1e-6;
/// Default finite-difference step for chart brackets.
pub const DEFAULT_CHART_STEP: f64 = 1e-5;

/// Chart Hamiltonian
/// `Σ_j cos(θ_j − θ_{j−1}) √Π_m f(S_{jm} − y) f(S_{jm} + y)/f(S_{jm})²`,
/// written through `1 − sin²y/sin²S` (trig) or `s(y)²(℘(y) − ℘(S))`.
pub fn hamiltonian_chart<T: Real>(
    pt: &PhasePoint<T>,
    spec: &CouplingSpec<T>,
    kernel: &Kernel<T>,
) -> Result<T> {
    let n = pt.n();
    let xi = pt.xi();
    let min = window_slacks(xi, spec)
        .into_iter()
        .fold(T::infinity(), T::min);
    if !(min > T::zero()) {
        return Err(Error::NotInterior {
            min_slack: min.to_f64_lossy(),
        });
    }
    let y = spec.y();
    let th = pt.theta_padded();
    let sy = kernel.s(y);
    let mut h = T::zero();
    for j in 1..=n {
        let mut prod = T::one();
        for len in 1..n {
            let s = window(xi, j, len);
            let factor = match kernel {
                Kernel::Trig => T::one() - (sy * sy) / (s.sin() * s.sin()),
                Kernel::Elliptic(_) => {
                    sy * sy
                        * wp_diff(
                            Complex::new(y, T::zero()),
                            Complex::new(s, T::zero()),
                            kernel,
                        )?
                        .re
                }
            };
            prod = prod * factor;
        }
        h = h + (th[j] - th[j - 1]).cos() * prod.max(T::zero()).sqrt();
    }
    Ok(h)
}

/// `Re tr` of the global Lax matrix; defined on the whole sphere.
pub fn hamiltonian_projective<T: Real>(
    u: &ProjectivePoint<T>,
    emb: &Embedding<T>,
    model: &LaxModel<T>,
) -> Result<T> {
    hamiltonian_raw(u.u(), emb, model)
}

/// `U(1)`-invariant extension of the Hamiltonian off the sphere.
pub fn hamiltonian_raw<T: Real>(
    u: &[Complex<T>],
    emb: &Embedding<T>,
    model: &LaxModel<T>,
) -> Result<T> {
    Ok(global_lax_raw(u, emb, model)?.trace().re)
}

/// Coefficients of `det(αI − L) = Σ_k c_k α^{n−k}`, `c_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet<T> {
    pub coefficients: Vec<Complex<T>>,
    pub model: &'static str,
    pub lambda: Option<Complex<T>>,
}

impl<T: Real> InvariantSet<T> {
    /// `e_k = (−1)^k c_k`, the sum of principal `k × k` minors.
    pub fn elementary(&self, k: usize) -> Complex<T> {
        let c = self.coefficients[k];
        if k.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    pub fn n(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Re e_k` and `Im e_k` for `k = 1..n−1`, in that order.
    pub fn real_parts(&self) -> Vec<T> {
        let n = self.n();
        (1..n)
            .map(|k| self.elementary(k).re)
            .chain((1..n).map(|k| self.elementary(k).im))
            .collect()
    }
}

pub fn invariants<T: Real>(l: &LaxMatrix<T>) -> InvariantSet<T> {
    InvariantSet {
        coefficients: l.entries().characteristic_polynomial(),
        model: l.model().name(),
        lambda: l.model().lambda(),
    }
}

/// The chart observables `Re e_k, Im e_k` (`k < n`) of the local Lax matrix.
pub fn spectral_observables<T: Real>(
    pt: &PhasePoint<T>,
    spec: &CouplingSpec<T>,
    model: &LaxModel<T>,
) -> Result<Vec<T>> {
    Ok(invariants(&local_lax(pt, spec, model)?).real_parts())
}

/// Same observables on the sphere, through the global Lax matrix.
pub fn spectral_observables_u<T: Real>(
    u: &[Complex<T>],
    emb: &Embedding<T>,
    model: &LaxModel<T>,
) -> Result<Vec<T>> {
    Ok(invariants(&global_lax_raw(u, emb, model)?).real_parts())
}

/// Partial derivatives `(∂/∂ξ_k, ∂/∂θ_k)`, each indexed `[k][component]`.
pub type ChartJacobian<T> = (Vec<Vec<T>>, Vec<Vec<T>>);

/// Chart partial derivatives of a vector observable by central differences,
/// with `ξ_n` eliminated. Returns `(∂/∂ξ_k, ∂/∂θ_k)`, each indexed
/// `[k][component]`.
pub fn chart_jacobian<T, F>(
    f: F,
    pt: &PhasePoint<T>,
    spec: &CouplingSpec<T>,
    h: T,
) -> Result<ChartJacobian<T>>
where
    T: Real,
    F: Fn(&PhasePoint<T>) -> Result<Vec<T>>,
{
    let n = pt.n();
    let margin = window_slacks(pt.xi(), spec)
        .into_iter()
        .fold(T::infinity(), T::min);
    if !(margin > h + h) {
        return Err(Error::TooCloseToBoundary {
            margin: margin.to_f64_lossy(),
            h: h.to_f64_lossy(),
        });
    }
    let head = &pt.xi()[..n - 1];
    let theta = pt.theta();
    let two_h = h + h;
    let diff = |a: Vec<T>, b: Vec<T>| -> Vec<T> {
        a.iter().zip(&b).map(|(x, y)| (*x - *y) / two_h).collect()
    };
    let mut dxi = Vec::with_capacity(n - 1);
    let mut dth = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let (mut p, mut m) = (head.to_vec(), head.to_vec());
        p[k] = p[k] + h;
        m[k] = m[k] - h;
        dxi.push(diff(
            f(&PhasePoint::from_raw(&p, theta))?,
            f(&PhasePoint::from_raw(&m, theta))?,
        ));
        let (mut p, mut m) = (theta.to_vec(), theta.to_vec());
        p[k] = p[k] + h;
        m[k] = m[k] - h;
        dth.push(diff(
            f(&PhasePoint::from_raw(head, &p))?,
            f(&PhasePoint::from_raw(head, &m))?,
        ));
    }
    Ok((dxi, dth))
}

/// All pairwise chart brackets `{f_a, f_b}` of a vector observable.
pub fn poisson_matrix<T, F>(
    f: F,
    pt: &PhasePoint<T>,
    spec: &CouplingSpec<T>,
    h: T,
) -> Result<Matrix<T>>
where
    T: Real,
    F: Fn(&PhasePoint<T>) -> Result<Vec<T>>,
{
    let (dxi, dth) = chart_jacobian(f, pt, spec, h)?;
    let comps = dxi.first().map_or(0, Vec::len);
    Ok(Matrix::from_fn(comps, comps, |a, b| {
        (0..dxi.len()).fold(T::zero(), |acc, k| {
            acc + dth[k][a] * dxi[k][b] - dxi[k][a] * dth[k][b]
        })
    }))
}

/// `{f, g} = Σ_k (∂f/∂θ_k ∂g/∂ξ_k − ∂f/∂ξ_k ∂g/∂θ_k)` on the chart.
pub fn poisson_bracket<T, F, G>(
    f: F,
    g: G,
    pt: &PhasePoint<T>,
    spec: &CouplingSpec<T>,
    h: T,
) -> Result<T>
where
    T: Real,
    F: Fn(&PhasePoint<T>) -> Result<T>,
    G: Fn(&PhasePoint<T>) -> Result<T>,
{
    let m = poisson_matrix(|p| Ok(vec![f(p)?, g(p)?]), pt, spec, h)?;
    Ok(m[(0, 1)])
}

/// Gradient of a real function of `u` as `(∂/∂Re u_j, ∂/∂Im u_j)` pairs.
pub fn gradient_u<T, F>(f: &F, u: &[Complex<T>], h: T) -> Result<Vec<(T, T)>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<T>,
{
    let two_h = h + h;
    let mut w = u.to_vec();
    let mut out = Vec::with_capacity(u.len());
    for j in 0..u.len() {
        let z = u[j];
        w[j] = z + Complex::new(h, T::zero());
        let ap = f(&w)?;
        w[j] = z - Complex::new(h, T::zero());
        let am = f(&w)?;
        w[j] = z + Complex::new(T::zero(), h);
        let bp = f(&w)?;
        w[j] = z - Complex::new(T::zero(), h);
        let bm = f(&w)?;
        w[j] = z;
        out.push(((ap - am) / two_h, (bp - bm) / two_h));
    }
    Ok(out)
}

/// Hamiltonian vector field `u̇_j = i ∂H/∂ū_j = (−∂_b H + i ∂_a H)/2`.
pub fn vector_field<T, F>(f: &F, u: &[Complex<T>], h: T) -> Result<Vec<Complex<T>>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<T>,
{
    let half = T::lit(0.5);
    Ok(gradient_u(f, u, h)?
        .into_iter()
        .map(|(ga, gb)| Complex::new(-gb * half, ga * half))
        .collect())
}

/// `{f, g}` in homogeneous coordinates.
pub fn poisson_bracket_u<T, F, G>(f: &F, g: &G, u: &[Complex<T>], h: T) -> Result<T>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<T>,
    G: Fn(&[Complex<T>]) -> Result<T>,
{
    let gf = gradient_u(f, u, h)?;
    let gg = gradient_u(g, u, h)?;
    let s = gf
        .iter()
        .zip(&gg)
        .fold(T::zero(), |acc, ((fa, fb), (ga, gb))| {
            acc + *fb * *ga - *fa * *gb
        });
    Ok(s * T::lit(0.5))
}

/// One point of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T> {
    pub u: ProjectivePoint<T>,
    pub t: T,
    pub h_step: T,
}

/// Integration settings of [`flow`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions<T> {
    pub tolerances: Tolerances<T>,
    /// Finite-difference step for the gradient.
    pub gradient_step: T,
}

impl<T: Real> Default for FlowOptions<T> {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            gradient_step: T::lit(DEFAULT_U_STEP),
        }
    }
}

fn pack<T: Real>(u: &[Complex<T>]) -> Vec<T> {
    u.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unpack<T: Real>(y: &[T]) -> Vec<Complex<T>> {
    y.chunks(2).map(|c| Complex::new(c[0], c[1])).collect()
}

/// Flow of an arbitrary `U(1)`-invariant observable for time `duration`,
/// sampled every `dt`. The state is projected back onto the sphere after
/// each step.
pub fn flow_observable<T, F>(
    obs: F,
    u0: &ProjectivePoint<T>,
    duration: T,
    dt: T,
    opts: &FlowOptions<T>,
) -> Result<Vec<FlowState<T>>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<T>,
{
    let m_abs = u0.m_abs();
    let h = opts.gradient_step;
    let rhs = |_t: T, y: &[T]| -> Result<Vec<T>> { Ok(pack(&vector_field(&obs, &unpack(y), h)?)) };
    let project = |y: &mut [T]| {
        let norm = y.iter().fold(T::zero(), |a, &v| a + v * v);
        let f = (m_abs / norm).sqrt();
        for v in y.iter_mut() {
            *v = *v * f;
        }
    };
    let samples = integrate(
        rhs,
        project,
        &pack(u0.u()),
        T::zero(),
        duration,
        dt,
        &opts.tolerances,
    )?;
    samples
        .into_iter()
        .map(|s| {
            Ok(FlowState {
                u: ProjectivePoint::normalized(unpack(&s.y), m_abs)?,
                t: s.t,
                h_step: s.h,
            })
        })
        .collect()
}

/// Hamiltonian flow of `H = Re tr L` for the given model.
pub fn flow<T: Real>(
    u0: &ProjectivePoint<T>,
    emb: &Embedding<T>,
    model: &LaxModel<T>,
    duration: T,
    dt: T,
    opts: &FlowOptions<T>,
) -> Result<Vec<FlowState<T>>> {
    flow_observable(
        |u: &[Complex<T>]| hamiltonian_raw(u, emb, model),
        u0,
        duration,
        dt,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticParams;
    use crate::geometry::AlcovePoint;
    use crate::linalg::{eigenvalues, poly_from_roots};
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn emb(n: usize, p: usize, y_over_pi: f64) -> Embedding<f64> {
        Embedding::new(CouplingSpec::new(n, p, y_over_pi * PI).unwrap()).unwrap()
    }

    fn ell(kappa: f64) -> LaxModel<f64> {
        LaxModel::elliptic(EllipticParams::new(kappa).unwrap(), Complex::new(0.4, 0.8)).unwrap()
    }

    #[test]
    fn n2_closed_form() {
        let e = emb(2, 1, 0.2);
        let y = e.spec().y();
        let pt = PhasePoint::new(
            AlcovePoint::new(vec![PI / 2.0, PI / 2.0]).unwrap(),
            vec![0.0],
        )
        .unwrap();
        let h = hamiltonian_chart(&pt, e.spec(), &Kernel::Trig).unwrap();
        assert!((h - 2.0 * y.cos()).abs() < 1e-14);
        let tr = local_lax(&pt, e.spec(), &LaxModel::trig()).unwrap().trace();
        assert!((tr.re - 2.0 * y.cos()).abs() < 1e-14);
        let inv = invariants(&local_lax(&pt, e.spec(), &LaxModel::trig()).unwrap());
        assert!((inv.coefficients[2].norm() - 1.0).abs() < 1e-14);
        assert!((inv.coefficients[1] + tr).norm() < 1e-15);
    }

    #[test]
    fn trace_reproduces_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for e in [emb(3, 1, 0.3), emb(4, 3, 0.7), emb(5, 2, 0.45)] {
            for model in [LaxModel::trig(), ell(1.0), ell(3.0)] {
                for _ in 0..20 {
                    let pt = sampling::interior_phase_point(&e, &mut rng);
                    let h = hamiltonian_chart(&pt, e.spec(), model.kernel()).unwrap();
                    let tr = local_lax(&pt, e.spec(), &model).unwrap().trace().re;
                    let tol = if model.is_trig() { 1e-12 } else { 1e-10 };
                    assert!((h - tr).abs() < tol, "{} {h} vs {tr}", model.name());
                    let hp = hamiltonian_projective(&e.embed(&pt).unwrap(), &e, &model).unwrap();
                    assert!((h - hp).abs() < tol);
                }
            }
        }
    }

    #[test]
    fn theta_zero_maximises_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let e = emb(4, 1, 0.3);
        for _ in 0..20 {
            let pt = sampling::interior_phase_point(&e, &mut rng);
            let zero = PhasePoint::new(pt.alcove().clone(), vec![0.0; 3]).unwrap();
            assert!(
                hamiltonian_chart(&zero, e.spec(), &Kernel::Trig).unwrap()
                    >= hamiltonian_chart(&pt, e.spec(), &Kernel::Trig).unwrap()
            );
        }
    }

    #[test]
    fn elliptic_hamiltonian_trig_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let k = Kernel::Elliptic(EllipticParams::new(20.0).unwrap());
        let e = emb(5, 3, 0.55);
        for _ in 0..20 {
            let pt = sampling::interior_phase_point(&e, &mut rng);
            let a = hamiltonian_chart(&pt, e.spec(), &Kernel::Trig).unwrap();
            let b = hamiltonian_chart(&pt, e.spec(), &k).unwrap();
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn invariants_match_eigenvalues_and_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let e = emb(5, 2, 0.45);
        for _ in 0..10 {
            let pt = sampling::interior_phase_point(&e, &mut rng);
            let loc = local_lax(&pt, e.spec(), &LaxModel::trig()).unwrap();
            let glob = global_lax_raw(&e.embed_raw(&pt).unwrap(), &e, &LaxModel::trig()).unwrap();
            let a = invariants(&loc);
            let b = invariants(&glob);
            let c = poly_from_roots(&eigenvalues(loc.entries()));
            for ((x, y), z) in a.coefficients.iter().zip(&b.coefficients).zip(&c) {
                assert!((x - y).norm() < 1e-10);
                assert!((x - z).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn elliptic_coefficient_ratio_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let e = emb(4, 3, 0.7);
        let params = EllipticParams::new(1.0).unwrap();
        let m1 = LaxModel::elliptic(params.clone(), Complex::new(0.4, 0.8)).unwrap();
        let m2 = LaxModel::elliptic(params, Complex::new(1.9, 1.3)).unwrap();
        let mut reference: Option<Vec<Complex<f64>>> = None;
        for _ in 0..20 {
            let pt = sampling::interior_phase_point(&e, &mut rng);
            let a = spectral_coeffs(&pt, &e, &m1);
            let b = spectral_coeffs(&pt, &e, &m2);
            let r: Vec<_> = (1..=4).map(|k| a[k] / b[k]).collect();
            match &reference {
                None => reference = Some(r),
                Some(r0) => {
                    for (x, y) in r.iter().zip(r0) {
                        assert!((x - y).norm() < 1e-8 * y.norm());
                    }
                }
            }
        }
    }

    fn spectral_coeffs(
        pt: &PhasePoint<f64>,
        e: &Embedding<f64>,
        m: &LaxModel<f64>,
    ) -> Vec<Complex<f64>> {
        invariants(&local_lax(pt, e.spec(), m).unwrap()).coefficients
    }

    #[test]
    fn canonical_pair_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let e = emb(4, 1, 0.3);
        let pt = sampling::interior_phase_point_with_margin(&e, &mut rng, 1e-3);
        let b =
            poisson_bracket(|p| Ok(p.theta()[0]), |p| Ok(p.xi()[0]), &pt, e.spec(), 1e-5).unwrap();
        assert!((b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn spectral_functions_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for e in [emb(3, 2, 0.6), emb(4, 1, 0.3), emb(5, 3, 0.55)] {
            for model in [LaxModel::trig(), ell(1.0)] {
                for _ in 0..3 {
                    let pt = sampling::interior_phase_point_with_margin(&e, &mut rng, 1e-3);
                    let p = poisson_matrix(
                        |q| spectral_observables(q, e.spec(), &model),
                        &pt,
                        e.spec(),
                        1e-5,
                    )
                    .unwrap();
                    let worst = p.data().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                    assert!(worst < 1e-6, "{} {worst}", model.name());
                }
            }
        }
    }

    #[test]
    fn too_close_to_boundary() {
        let e = emb(3, 1, 0.3);
        let y = e.spec().y();
        let rest = (PI - y - 1e-6) / 2.0;
        let pt = PhasePoint::new(
            AlcovePoint::new(vec![y + 1e-6, rest, rest]).unwrap(),
            vec![0.0, 0.0],
        )
        .unwrap();
        let r = poisson_bracket(|p| Ok(p.xi()[0]), |p| Ok(p.theta()[0]), &pt, e.spec(), 1e-5);
        assert!(matches!(r, Err(Error::TooCloseToBoundary { .. })));
    }

    #[test]
    fn u_bracket_matches_chart_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let e = emb(3, 1, 0.3);
        let pt = sampling::interior_phase_point_with_margin(&e, &mut rng, 1e-2);
        let u = e.embed_raw(&pt).unwrap();
        // θ_1 and ξ_1 as functions of u
        let e1 = e.clone();
        let theta1 = move |w: &[Complex<f64>]| -> Result<f64> {
            let p = ProjectivePoint::normalized(w.to_vec(), e1.spec().m_abs())?;
            let c = e1.chart(&p)?;
            Ok(c.theta()[0])
        };
        let e2 = e.clone();
        let xi1 = move |w: &[Complex<f64>]| -> Result<f64> {
            let a: Vec<f64> = w.iter().map(|z| z.norm_sqr()).collect();
            Ok(e2.xi_from_moduli(&a)[0])
        };
        let b = poisson_bracket_u(&theta1, &xi1, &u, 1e-6).unwrap();
        assert!((b - 1.0).abs() < 1e-6, "{b}");
    }

    #[test]
    fn equal_distance_is_stationary_in_xi() {
        for e in [emb(3, 1, 0.3), emb(5, 2, 0.45)] {
            let n = e.n();
            let pt = PhasePoint::new(AlcovePoint::equal_distance(n), vec![0.0; n - 1]).unwrap();
            let (dxi, _) = chart_jacobian(
                |p| Ok(vec![hamiltonian_chart(p, e.spec(), &Kernel::Trig)?]),
                &pt,
                e.spec(),
                1e-5,
            )
            .unwrap();
            assert!(dxi.iter().all(|g| g[0].abs() < 1e-8));
        }
    }

    #[test]
    fn constant_observable_does_not_move() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let e = emb(3, 1, 0.3);
        let u0 = sampling::sphere_point(&e, &mut rng);
        let traj = flow_observable(
            |_u: &[Complex<f64>]| Ok(1.5),
            &u0,
            1.0,
            0.5,
            &FlowOptions::default(),
        )
        .unwrap();
        for s in traj {
            assert!(s.u.distance(&u0) < 1e-12);
        }
    }

    #[test]
    fn flow_conserves_energy_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let e = emb(3, 2, 0.6);
        let model = LaxModel::trig();
        let u0 = sampling::sphere_point(&e, &mut rng);
        let h0 = hamiltonian_projective(&u0, &e, &model).unwrap();
        let traj = flow(&u0, &e, &model, 1.0, 0.25, &FlowOptions::default()).unwrap();
        for s in &traj {
            let norm: f64 = s.u.abs_sq().iter().sum();
            assert!((norm - e.spec().m_abs()).abs() < 1e-10);
            let h = hamiltonian_projective(&s.u, &e, &model).unwrap();
            assert!((h - h0).abs() < 1e-8, "drift {}", h - h0);
        }
    }
}
