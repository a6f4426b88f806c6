//! Random points for tests, verification suites and the CLI.
//!
//! Uniform points of the sphere have Dirichlet-distributed moduli `|u_j|²`,
//! and `ξ` is affine in those moduli, so pushing a uniform sphere point
//! through `u ↦ ξ(u)` gives a uniform point of `A_y` directly.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::coupling::{mod_inverse, type1_intervals, CouplingSpec};
use crate::elliptic::Kernel;
use crate::geometry::{window_slacks, AlcovePoint, Embedding, PhasePoint, ProjectivePoint};
use crate::scalar::Real;

/// Uniform point of `S^{2n−1}_{|M|}` (canonical gauge).
pub fn sphere_point<T: Real, R: Rng + ?Sized>(
    emb: &Embedding<T>,
    rng: &mut R,
) -> ProjectivePoint<T> {
    loop {
        let u: Vec<Complex<T>> = (0..emb.n())
            .map(|_| {
                let a: f64 = StandardNormal.sample(rng);
                let b: f64 = StandardNormal.sample(rng);
                Complex::new(T::lit(a), T::lit(b))
            })
            .collect();
        if let Ok(p) = ProjectivePoint::normalized(u, emb.spec().m_abs()) {
            return p;
        }
    }
}

/// Sphere point with the listed (0-based) coordinates set to zero.
pub fn boundary_point<T: Real, R: Rng + ?Sized>(
    emb: &Embedding<T>,
    zeros: &[usize],
    rng: &mut R,
) -> ProjectivePoint<T> {
    assert!(
        zeros.len() < emb.n(),
        "at least one coordinate must stay nonzero"
    );
    let p = sphere_point(emb, rng);
    let u: Vec<Complex<T>> = p
        .u()
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            if zeros.contains(&k) {
                Complex::new(T::zero(), T::zero())
            } else {
                z
            }
        })
        .collect();
    ProjectivePoint::normalized(u, emb.spec().m_abs()).expect("remaining coordinates are nonzero")
}

/// Sphere point where a random nonempty proper subset of coordinates vanishes.
pub fn random_boundary_point<T: Real, R: Rng + ?Sized>(
    emb: &Embedding<T>,
    rng: &mut R,
) -> ProjectivePoint<T> {
    let n = emb.n();
    let count = rng.random_range(1..n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    boundary_point(emb, &idx[..count], rng)
}

fn uniform_angles<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<T> {
    (0..k)
        .map(|_| T::lit(rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// `ξ` uniform on `A_y`, `θ` uniform on the torus.
pub fn interior_phase_point<T: Real, R: Rng + ?Sized>(
    emb: &Embedding<T>,
    rng: &mut R,
) -> PhasePoint<T> {
    interior_phase_point_with_margin(emb, rng, T::zero())
}

/// As [`interior_phase_point`], conditioned on every window slack exceeding
/// `margin` (rejection).
pub fn interior_phase_point_with_margin<T: Real, R: Rng + ?Sized>(
    emb: &Embedding<T>,
    rng: &mut R,
    margin: T,
) -> PhasePoint<T> {
    loop {
        let u = sphere_point(emb, rng);
        let xi = emb.xi_from_u(&u);
        let slacks = window_slacks(xi.xi(), emb.spec());
        if slacks.iter().all(|&s| s > margin) {
            let theta = uniform_angles(emb.n() - 1, rng);
            return PhasePoint::new(xi, theta).expect("dimensions agree");
        }
    }
}

/// Uniform point of the Weyl alcove `A` (flat Dirichlet scaled by `π`).
pub fn alcove_point<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> AlcovePoint<T> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = e.iter().sum();
    let head: Vec<T> = e[..n - 1]
        .iter()
        .map(|&v| T::lit(std::f64::consts::PI * v / total))
        .collect();
    AlcovePoint::from_independent(&head)
}

/// A type (i) coupling drawn uniformly from the union of windows, kept a
/// relative distance `rel_margin` away from the window ends.
pub fn admissible_spec<T: Real, R: Rng + ?Sized>(
    n: usize,
    rel_margin: f64,
    rng: &mut R,
) -> CouplingSpec<T> {
    let windows = type1_intervals(n).expect("n >= 2");
    let pieces: Vec<(usize, f64, f64)> = windows
        .iter()
        .flat_map(|w| {
            [
                (w.p, w.below.lo_f64(), w.below.hi_f64()),
                (w.p, w.above.lo_f64(), w.above.hi_f64()),
            ]
        })
        .collect();
    let total: f64 = pieces.iter().map(|(_, a, b)| b - a).sum();
    loop {
        let mut t = rng.random_range(0.0..total);
        for &(p, a, b) in &pieces {
            let len = b - a;
            if t < len {
                let inner = rel_margin * len;
                let y = (a + inner + (t / len) * (len - 2.0 * inner)) * std::f64::consts::PI;
                debug_assert!(mod_inverse(p, n).is_ok());
                if let Ok(s) = CouplingSpec::new(n, p, T::lit(y)) {
                    return s;
                }
                break;
            }
            t -= len;
        }
    }
}

/// A spectral parameter away from the lattice `πZ + 2iκZ`: real part in
/// `[0.2, π − 0.2]`, imaginary part in `[0.2, 2κ − 0.2]` (or `[0.2, 2]` for
/// the trigonometric kernel).
pub fn spectral_parameter<T: Real, R: Rng + ?Sized>(kernel: &Kernel<T>, rng: &mut R) -> Complex<T> {
    let pi = std::f64::consts::PI;
    let im_hi = match kernel {
        Kernel::Trig => 2.0,
        Kernel::Elliptic(p) => 2.0 * p.kappa().to_f64_lossy() - 0.2,
    };
    let re = rng.random_range(0.2..pi - 0.2);
    let im = rng.random_range(0.2..im_hi.max(0.3));
    Complex::new(T::lit(re), T::lit(im))
}
