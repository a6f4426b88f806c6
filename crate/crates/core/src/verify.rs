//! Randomised verification suites over the identities the constructions
//! must satisfy. Reports are `f64`; seeds make every run reproducible.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coupling::{gcd, CouplingSpec, Residues};
use crate::dynamics::{hamiltonian_chart, invariants, poisson_matrix, spectral_observables};
use crate::elliptic::{EllipticParams, Kernel};
use crate::error::{Error, Result};
use crate::geometry::Embedding;
use crate::intmatrix::MatrixFamily;
use crate::lax::{conjugated_local, global_lax, global_lax_raw, local_lax, LaxModel};
use crate::sampling;

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub trials: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &'static str, trials: usize, max_defect: f64, tol: f64) -> Self {
        Self {
            suite,
            trials,
            max_defect,
            tol,
            pass: max_defect <= tol && max_defect.is_finite(),
        }
    }
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 5] = ["prop21", "thm34", "thm42", "poisson", "limits"];

/// Shared inputs of the suites.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub n: usize,
    /// Needed by every suite except `prop21`.
    pub spec: Option<CouplingSpec<f64>>,
    pub kappa: f64,
    pub trials: usize,
    pub seed: u64,
    /// Overrides the per-suite tolerance when set.
    pub tol: Option<f64>,
}

fn need_spec(cfg: &SuiteConfig) -> Result<Embedding<f64>> {
    let spec = cfg
        .spec
        .ok_or_else(|| Error::InvalidCoupling("suite requires a type (i) coupling".into()))?;
    Embedding::new(spec)
}

/// Exact integer identities for every residue coprime to `n`.
pub fn prop21(n: usize) -> Result<SuiteReport> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n >= 2",
            value: n as f64,
        });
    }
    let mut trials = 0;
    let mut failures = 0;
    for p in (1..n).filter(|&p| gcd(p, n) == 1) {
        trials += 1;
        if !MatrixFamily::new(&Residues::new(n, p)?).holds() {
            failures += 1;
        }
    }
    Ok(SuiteReport::new("prop21", trials, failures as f64, 0.0))
}

/// Global versus conjugated local trig Lax matrix, unitarity, and the
/// trace identity, at random interior points.
pub fn thm34(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let emb = need_spec(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let model = LaxModel::trig();
    let mut worst = 0.0_f64;
    for _ in 0..cfg.trials {
        let pt = sampling::interior_phase_point(&emb, &mut rng);
        let g = global_lax_raw(&emb.embed_raw(&pt)?, &emb, &model)?;
        let c = conjugated_local(&pt, &emb, &model)?;
        let h = hamiltonian_chart(&pt, emb.spec(), &Kernel::Trig)?;
        worst = worst
            .max(g.entries().max_abs_diff(c.entries()))
            .max(g.unitarity_defect())
            .max((g.trace().re - h).abs());
    }
    Ok(SuiteReport::new(
        "thm34",
        cfg.trials,
        worst,
        cfg.tol.unwrap_or(1e-10),
    ))
}

/// Elliptic conjugation identity at random points and random spectral
/// parameters (three per point).
pub fn thm42(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let emb = need_spec(cfg)?;
    let params = EllipticParams::new(cfg.kappa)?;
    let kernel = Kernel::Elliptic(params.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0_f64;
    for _ in 0..cfg.trials {
        let pt = sampling::interior_phase_point(&emb, &mut rng);
        let u = emb.embed_raw(&pt)?;
        for _ in 0..3 {
            let model = LaxModel::elliptic(
                params.clone(),
                sampling::spectral_parameter(&kernel, &mut rng),
            )?;
            let g = global_lax_raw(&u, &emb, &model)?;
            let c = conjugated_local(&pt, &emb, &model)?;
            worst = worst.max(g.entries().max_abs_diff(c.entries()));
        }
    }
    Ok(SuiteReport::new(
        "thm42",
        cfg.trials * 3,
        worst,
        cfg.tol.unwrap_or(1e-8),
    ))
}

/// Fixed spectral parameter used whenever one is not supplied.
pub fn default_lambda() -> Complex<f64> {
    Complex::new(0.4, 0.8)
}

/// Minimum window slack of the sample points in [`poisson`]. Central
/// differences lose accuracy like `h²/slack²`, so points are kept away from
/// the chart boundary, within what the simplex allows.
pub fn poisson_margin(spec: &CouplingSpec<f64>) -> f64 {
    (0.25 * spec.m_abs() / spec.n() as f64).min(0.05)
}

/// Pairwise brackets of the real and imaginary parts of the spectral
/// invariants, trig and elliptic.
pub fn poisson(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let emb = need_spec(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let models = [
        LaxModel::trig(),
        LaxModel::elliptic(EllipticParams::new(cfg.kappa)?, default_lambda())?,
    ];
    let h = 1e-5;
    let margin = poisson_margin(emb.spec());
    let mut worst = 0.0_f64;
    for _ in 0..cfg.trials {
        let pt = sampling::interior_phase_point_with_margin(&emb, &mut rng, margin);
        for model in &models {
            let p = poisson_matrix(
                |q| spectral_observables(q, emb.spec(), model),
                &pt,
                emb.spec(),
                h,
            )?;
            worst = p.data().iter().fold(worst, |m, v| m.max(v.abs()));
        }
    }
    Ok(SuiteReport::new(
        "poisson",
        cfg.trials,
        worst,
        cfg.tol.unwrap_or(1e-6),
    ))
}

/// Spectral parameter at which the elliptic matrix reproduces the trig one
/// up to a diagonal conjugation.
pub fn limit_lambda(kappa: f64) -> Complex<f64> {
    Complex::new(0.0, 0.9 * kappa)
}

/// `|s − sin|` on a real grid at `κ = 8`, and elliptic versus trig
/// invariants at `κ = 10`, `λ = 0.9κ i`.
pub fn limits(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let emb = need_spec(cfg)?;
    let k8 = Kernel::Elliptic(EllipticParams::new(8.0)?);
    let mut worst = (1..1000)
        .map(|i| i as f64 * std::f64::consts::PI / 1000.0)
        .fold(0.0_f64, |m, x| m.max((k8.s(x) - x.sin()).abs()));
    let kappa = 10.0;
    let ell = LaxModel::elliptic(EllipticParams::new(kappa)?, limit_lambda(kappa))?;
    let trig = LaxModel::trig();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.trials {
        let u = sampling::sphere_point(&emb, &mut rng);
        let a = invariants(&global_lax(&u, &emb, &trig)?);
        let b = invariants(&global_lax(&u, &emb, &ell)?);
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(SuiteReport::new(
        "limits",
        cfg.trials,
        worst,
        cfg.tol.unwrap_or(1e-6),
    ))
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "prop21" => prop21(cfg.n),
        "thm34" => thm34(cfg),
        "thm42" => thm42(cfg),
        "poisson" => poisson(cfg),
        "limits" => limits(cfg),
        other => Err(Error::InvalidCoupling(format!("unknown suite {other}"))),
    }
}

/// Also checks the local matrix trace against the chart Hamiltonian for the
/// elliptic model; used by the `lax` report.
pub fn elliptic_trace_defect(
    emb: &Embedding<f64>,
    model: &LaxModel<f64>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let pt = sampling::interior_phase_point(emb, &mut rng);
        let h = hamiltonian_chart(&pt, emb.spec(), model.kernel())?;
        worst = worst.max((local_lax(&pt, emb.spec(), model)?.trace().re - h).abs());
    }
    Ok(worst)
}
