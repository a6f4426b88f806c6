//! `cpn-rs` command-line front end. JSON on stdout, CSV for trajectories,
//! `{error, detail}` on stderr.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpn_rs::coupling::{classify_y, Classification, CouplingSpec};
use cpn_rs::dynamics::{
    flow, hamiltonian_chart, hamiltonian_raw, spectral_observables_u, FlowOptions,
};
use cpn_rs::elliptic::{j_reg, wp_diff, EllipticParams, Kernel};
use cpn_rs::geometry::{
    alcove_membership, window_slacks, AlcovePoint, Embedding, PhasePoint, ProjectivePoint,
};
use cpn_rs::intmatrix::{IntMatrix, MatrixFamily};
use cpn_rs::lax::{global_lax, local_lax, LaxMatrix, LaxModel};
use cpn_rs::{sampling, verify, Complex64, Error};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "cpn-rs",
    version,
    about = "Compactified Ruijsenaars-Schneider systems on CP^(n-1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a coupling y for a given n.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        y_over_pi: f64,
        /// Distance to an excluded value below which y counts as excluded.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Integer matrices A, B, C and Omega for residue p.
    Matrices {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
    },
    /// Evaluate s, wp(z') - wp(z) or J(t) = s(t)/t.
    Special {
        #[arg(long = "fn", value_enum)]
        function: SpecialFn,
        /// Argument as RE,IM (J takes a real argument).
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        /// Second argument z' of wpdiff, as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        zprime: Option<Complex64>,
        /// Elliptic modulus kappa; omitted means the trigonometric kernel (s = sin).
        #[arg(long)]
        kappa: Option<f64>,
        /// Truncation tolerance of the infinite products.
        #[arg(long, default_value_t = cpn_rs::elliptic::DEFAULT_EPS)]
        eps: f64,
    },
    /// Uniform samples of the Weyl alcove with their position relative to A_y.
    Alcove {
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance of the boundary verdict.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Map {"xi", "theta"} JSON to homogeneous coordinates {"u"}.
    Embed {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Input file; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Map {"u"} JSON back to chart coordinates {"xi", "theta"}.
    Unembed {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Input file; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Lax matrix at a point, with an invariant report.
    Lax {
        #[command(flatten)]
        coupling: CouplingArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// JSON point, either {"xi", "theta"} or {"u"}.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        point: Option<PathBuf>,
        /// Draw a random interior point.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Global matrix on CP^(n-1) (default).
        #[arg(long, conflicts_with = "local")]
        global: bool,
        /// Local matrix in chart coordinates.
        #[arg(long)]
        local: bool,
    },
    /// Run verification suites; exit code 1 if any fails.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        n: usize,
        /// Residue p; inferred from y when omitted.
        #[arg(long)]
        p: Option<usize>,
        /// Coupling y/pi; needed by every suite except prop21.
        #[arg(long)]
        y_over_pi: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Overrides each suite's tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hamiltonian trajectory of H = Re tr L from a random sphere point, as CSV.
    Flow {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Elliptic modulus; omitted means the trigonometric model.
        #[arg(long)]
        kappa: Option<f64>,
        /// Spectral parameter RE,IM of the elliptic model.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.4,0.8")]
        lambda: Complex64,
        #[arg(long, default_value_t = 5.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct CouplingArgs {
    #[arg(long)]
    n: usize,
    /// Residue p; inferred from y when omitted.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    y_over_pi: f64,
}

#[derive(Args, Clone, Copy)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Trig)]
    model: ModelKind,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Spectral parameter RE,IM of the elliptic model.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.4,0.8")]
    lambda: Complex64,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum ModelKind {
    Trig,
    Elliptic,
}

#[derive(ValueEnum, Clone, Copy)]
enum SpecialFn {
    S,
    Wpdiff,
    #[value(name = "J")]
    J,
}

#[derive(ValueEnum, Clone, Copy)]
enum SuiteArg {
    Prop21,
    Thm34,
    Thm42,
    Poisson,
    Limits,
    All,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err("expected RE or RE,IM".into()),
    }
}

/// Failure of a run: a message for stderr and the exit code.
struct Failure {
    kind: String,
    detail: String,
    code: u8,
}

impl Failure {
    fn usage(kind: &str, detail: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            detail: detail.into(),
            code: 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let debug = format!("{e:?}");
        let name = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("error");
        Self::usage(&snake_case(name), e.to_string())
    }
}

fn snake_case(s: &str) -> String {
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if c.is_uppercase() && i > 0 {
            out.push('_');
        }
        out.extend(c.to_lowercase());
    }
    out
}

type Run<T> = Result<T, Failure>;

#[derive(Serialize)]
struct C {
    re: f64,
    im: f64,
}

impl From<Complex64> for C {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Deserialize)]
struct CIn {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointIn {
    Chart { xi: Vec<f64>, theta: Vec<f64> },
    Sphere { u: Vec<CIn> },
}

fn check_n(n: usize) -> Run<()> {
    if n < 2 {
        return Err(Failure::usage(
            "invalid_argument",
            format!("n must be at least 2, got {n}"),
        ));
    }
    Ok(())
}

fn check_y(x: f64) -> Run<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Failure::usage(
            "invalid_argument",
            format!("y/pi must lie in (0, 1), got {x}"),
        ));
    }
    Ok(x * PI)
}

fn check_kappa(k: f64) -> Run<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Failure::usage(
            "invalid_argument",
            format!("kappa must be positive, got {k}"),
        ));
    }
    Ok(())
}

fn coupling(args: &CouplingArgs) -> Run<CouplingSpec<f64>> {
    check_n(args.n)?;
    let y = check_y(args.y_over_pi)?;
    Ok(match args.p {
        Some(p) => CouplingSpec::new(args.n, p, y)?,
        None => CouplingSpec::from_y(args.n, y)?,
    })
}

fn model(args: &ModelArgs) -> Run<LaxModel<f64>> {
    Ok(match args.model {
        ModelKind::Trig => LaxModel::trig(),
        ModelKind::Elliptic => {
            check_kappa(args.kappa)?;
            LaxModel::elliptic(EllipticParams::new(args.kappa)?, args.lambda)?
        }
    })
}

fn read_input(path: &Option<PathBuf>) -> Run<PointIn> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::usage("io", format!("{}: {e}", p.display())))?
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::usage("io", e.to_string()))?;
        }
    }
    serde_json::from_str(&text).map_err(|e| Failure::usage("invalid_json", e.to_string()))
}

fn phase_point(xi: Vec<f64>, theta: Vec<f64>) -> Run<PhasePoint<f64>> {
    Ok(PhasePoint::new(AlcovePoint::new(xi)?, theta)?)
}

fn projective(u: Vec<CIn>, emb: &Embedding<f64>) -> Run<ProjectivePoint<f64>> {
    if u.len() != emb.n() {
        return Err(Error::DimensionMismatch {
            expected: emb.n(),
            got: u.len(),
        }
        .into());
    }
    let u = u.into_iter().map(|z| Complex64::new(z.re, z.im)).collect();
    Ok(ProjectivePoint::normalized(u, emb.spec().m_abs())?)
}

fn int_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
}

fn print_json<T: Serialize>(v: &T) -> Run<()> {
    let s = serde_json::to_string(v).map_err(|e| Failure::usage("serialization", e.to_string()))?;
    println!("{s}");
    Ok(())
}

#[derive(Serialize)]
struct Interval {
    lo_over_pi: String,
    hi_over_pi: String,
}

#[derive(Serialize)]
struct ClassifyOut {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<usize>,
    #[serde(rename = "M_over_pi", skip_serializing_if = "Option::is_none")]
    m_over_pi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interval: Option<Interval>,
}

fn classify(n: usize, y_over_pi: f64, tol: f64) -> Run<()> {
    check_n(n)?;
    let y = check_y(y_over_pi)?;
    let v = classify_y(n, y, tol)?;
    let mut out = ClassifyOut {
        verdict: v.name(),
        k: None,
        m: None,
        p: None,
        q: None,
        m_over_pi: None,
        interval: None,
    };
    match v {
        Classification::Excluded { k, m } => {
            out.k = Some(k);
            out.m = Some(m);
        }
        Classification::TypeI(spec) => {
            let iv = spec.interval();
            out.p = Some(spec.p());
            out.q = Some(spec.q());
            out.m_over_pi = Some(spec.m() / PI);
            out.interval = Some(Interval {
                lo_over_pi: iv.lo.to_string(),
                hi_over_pi: iv.hi.to_string(),
            });
        }
        Classification::TypeII => {}
    }
    print_json(&out)
}

#[derive(Serialize)]
struct MatricesOut {
    n: usize,
    p: usize,
    q: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<i64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<i64>>,
    #[serde(rename = "Omega")]
    omega: Vec<Vec<i64>>,
    #[serde(rename = "detA")]
    det_a: i64,
    #[serde(rename = "check_AOmegaT")]
    check: bool,
}

fn matrices(n: usize, p: usize) -> Run<()> {
    check_n(n)?;
    let res = cpn_rs::coupling::Residues::new(n, p)?;
    let f = MatrixFamily::new(&res);
    print_json(&MatricesOut {
        n,
        p,
        q: res.q(),
        a: int_rows(&f.a),
        b: int_rows(&f.b),
        c: int_rows(&f.c),
        omega: int_rows(&f.omega),
        det_a: f.det_a,
        check: f.a_omega_t_is_identity,
    })
}

#[derive(Serialize)]
struct SpecialOut {
    #[serde(rename = "fn")]
    function: &'static str,
    kernel: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    z: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    zprime: Option<C>,
    value: C,
}

fn special(
    function: SpecialFn,
    z: Complex64,
    zprime: Option<Complex64>,
    kappa: Option<f64>,
    eps: f64,
) -> Run<()> {
    let kernel = match kappa {
        Some(k) => {
            check_kappa(k)?;
            Kernel::Elliptic(EllipticParams::with_eps(k, eps)?)
        }
        None => Kernel::Trig,
    };
    let (name, value) = match function {
        SpecialFn::S => ("s", kernel.s_complex(z)?),
        SpecialFn::Wpdiff => {
            let zp = zprime
                .ok_or_else(|| Failure::usage("invalid_argument", "wpdiff needs --zprime"))?;
            ("wpdiff", wp_diff(zp, z, &kernel)?)
        }
        SpecialFn::J => {
            if z.im != 0.0 {
                return Err(Failure::usage(
                    "invalid_argument",
                    "J takes a real argument",
                ));
            }
            ("J", Complex64::new(j_reg(z.re, &kernel)?, 0.0))
        }
    };
    print_json(&SpecialOut {
        function: name,
        kernel: if kernel.is_trig() { "trig" } else { "elliptic" },
        kappa,
        z: z.into(),
        zprime: zprime
            .filter(|_| matches!(function, SpecialFn::Wpdiff))
            .map(C::from),
        value: value.into(),
    })
}

#[derive(Serialize)]
struct AlcoveSample {
    xi: Vec<f64>,
    verdict: &'static str,
    min_slack: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    active: Vec<usize>,
}

#[derive(Serialize)]
struct AlcoveOut {
    n: usize,
    p: usize,
    y_over_pi: f64,
    seed: u64,
    interior: usize,
    samples: Vec<AlcoveSample>,
}

fn alcove(args: &CouplingArgs, count: usize, seed: u64, tol: f64) -> Run<()> {
    let spec = coupling(args)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let xi: AlcovePoint<f64> = sampling::alcove_point(spec.n(), &mut rng);
        let verdict = alcove_membership(xi.xi(), &spec, tol)?;
        let min_slack = window_slacks(xi.xi(), &spec)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let active = match &verdict {
            cpn_rs::geometry::Membership::Boundary(a) => a.clone(),
            _ => Vec::new(),
        };
        samples.push(AlcoveSample {
            xi: xi.into_vec(),
            verdict: verdict.name(),
            min_slack,
            active,
        });
    }
    let interior = samples.iter().filter(|s| s.verdict == "interior").count();
    print_json(&AlcoveOut {
        n: spec.n(),
        p: spec.p(),
        y_over_pi: args.y_over_pi,
        seed,
        interior,
        samples,
    })
}

#[derive(Serialize)]
struct SphereOut {
    u: Vec<C>,
}

#[derive(Serialize)]
struct ChartOut {
    xi: Vec<f64>,
    theta: Vec<f64>,
}

fn embed(args: &CouplingArgs, input: &Option<PathBuf>) -> Run<()> {
    let emb = Embedding::new(coupling(args)?)?;
    let PointIn::Chart { xi, theta } = read_input(input)? else {
        return Err(Failure::usage(
            "invalid_json",
            "expected an object with \"xi\" and \"theta\"",
        ));
    };
    let u = emb.embed(&phase_point(xi, theta)?)?;
    print_json(&SphereOut {
        u: u.u().iter().map(|&z| z.into()).collect(),
    })
}

fn unembed(args: &CouplingArgs, input: &Option<PathBuf>) -> Run<()> {
    let emb = Embedding::new(coupling(args)?)?;
    let PointIn::Sphere { u } = read_input(input)? else {
        return Err(Failure::usage(
            "invalid_json",
            "expected an object with \"u\"",
        ));
    };
    let pt = emb.chart(&projective(u, &emb)?)?;
    print_json(&ChartOut {
        xi: pt.xi().to_vec(),
        theta: pt.theta().to_vec(),
    })
}

#[derive(Serialize)]
struct LaxReport {
    unitarity_defect: f64,
    det_defect: f64,
    /// `|Re tr L − H|` against the chart Hamiltonian; absent off the chart.
    #[serde(rename = "retrace_vs_H")]
    retrace_vs_h: Option<f64>,
}

#[derive(Serialize)]
struct LaxOut {
    n: usize,
    p: usize,
    y_over_pi: f64,
    model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<C>,
    form: &'static str,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    report: LaxReport,
}

fn lax(
    args: &CouplingArgs,
    margs: &ModelArgs,
    point: &Option<PathBuf>,
    random: bool,
    seed: u64,
    local: bool,
) -> Run<()> {
    let spec = coupling(args)?;
    let emb = Embedding::new(spec)?;
    let m = model(margs)?;
    // chart point when available, sphere point always
    let (chart, sphere): (Option<PhasePoint<f64>>, ProjectivePoint<f64>) = if random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = sampling::interior_phase_point(&emb, &mut rng);
        let u = emb.embed(&pt)?;
        (Some(pt), u)
    } else {
        match read_input(point)? {
            PointIn::Chart { xi, theta } => {
                let pt = phase_point(xi, theta)?;
                let u = emb.embed(&pt)?;
                (Some(pt), u)
            }
            PointIn::Sphere { u } => {
                let u = projective(u, &emb)?;
                (emb.chart(&u).ok(), u)
            }
        }
    };
    let l: LaxMatrix<f64> = if local {
        let pt = chart.as_ref().ok_or_else(|| {
            Failure::usage(
                "not_interior",
                "the local matrix needs a point inside the chart",
            )
        })?;
        local_lax(pt, &spec, &m)?
    } else {
        global_lax(&sphere, &emb, &m)?
    };
    let h = match &chart {
        Some(pt) => Some(hamiltonian_chart(pt, &spec, m.kernel())?),
        None => None,
    };
    let e = l.entries();
    let n = l.n();
    let report = LaxReport {
        unitarity_defect: l.unitarity_defect(),
        det_defect: (l.det() - 1.0).norm(),
        retrace_vs_h: h.map(|h| (l.trace().re - h).abs()),
    };
    print_json(&LaxOut {
        n,
        p: spec.p(),
        y_over_pi: args.y_over_pi,
        model: m.name(),
        kappa: (margs.model == ModelKind::Elliptic).then_some(margs.kappa),
        lambda: m.lambda().map(C::from),
        form: if local { "local" } else { "global" },
        re: (0..n)
            .map(|i| (0..n).map(|j| e[(i, j)].re).collect())
            .collect(),
        im: (0..n)
            .map(|i| (0..n).map(|j| e[(i, j)].im).collect())
            .collect(),
        report,
    })
}

#[derive(Serialize)]
struct ReportOut {
    suite: &'static str,
    trials: usize,
    max_defect: f64,
    tol: f64,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    suite: SuiteArg,
    n: usize,
    p: Option<usize>,
    y_over_pi: Option<f64>,
    kappa: f64,
    trials: usize,
    tol: Option<f64>,
    seed: u64,
) -> Run<bool> {
    check_n(n)?;
    check_kappa(kappa)?;
    let names: Vec<&str> = match suite {
        SuiteArg::All => verify::SUITES.to_vec(),
        SuiteArg::Prop21 => vec!["prop21"],
        SuiteArg::Thm34 => vec!["thm34"],
        SuiteArg::Thm42 => vec!["thm42"],
        SuiteArg::Poisson => vec!["poisson"],
        SuiteArg::Limits => vec!["limits"],
    };
    let needs_spec = names.iter().any(|&s| s != "prop21");
    let spec = match y_over_pi {
        Some(x) => Some(coupling(&CouplingArgs { n, p, y_over_pi: x })?),
        None if needs_spec => {
            return Err(Failure::usage(
                "invalid_argument",
                "this suite needs --y-over-pi",
            ))
        }
        None => None,
    };
    let cfg = verify::SuiteConfig {
        n,
        spec,
        kappa,
        trials,
        seed,
        tol,
    };
    let mut reports = Vec::new();
    for name in names {
        let r = verify::run_suite(name, &cfg)?;
        reports.push(ReportOut {
            suite: r.suite,
            trials: r.trials,
            max_defect: r.max_defect,
            tol: r.tol,
            pass: r.pass,
        });
    }
    let pass = reports.iter().all(|r| r.pass);
    if reports.len() == 1 {
        print_json(&reports[0])?;
    } else {
        print_json(&reports)?;
    }
    Ok(pass)
}

fn run_flow(
    args: &CouplingArgs,
    kappa: Option<f64>,
    lambda: Complex64,
    t_end: f64,
    dt: f64,
    seed: u64,
    out: &Option<PathBuf>,
) -> Run<()> {
    let spec = coupling(args)?;
    if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite()) {
        return Err(Failure::usage(
            "invalid_argument",
            "t-end and dt must be positive",
        ));
    }
    let emb = Embedding::new(spec)?;
    let m = match kappa {
        Some(k) => {
            check_kappa(k)?;
            LaxModel::elliptic(EllipticParams::new(k)?, lambda)?
        }
        None => LaxModel::trig(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = sampling::sphere_point(&emb, &mut rng);
    let traj = flow(&u0, &emb, &m, t_end, dt, &FlowOptions::default())?;
    let n = spec.n();
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(
            std::fs::File::create(p)
                .map_err(|e| Failure::usage("io", format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let io = |e: csv::Error| Failure::usage("io", e.to_string());
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["t".to_string()];
    for j in 1..=n {
        header.push(format!("re_u{j}"));
        header.push(format!("im_u{j}"));
    }
    header.push("H".into());
    header.push("sum_abs_u_sq".into());
    header.extend((1..n).map(|k| format!("S_{k}")));
    w.write_record(&header).map_err(io)?;
    for st in &traj {
        let u = st.u.u();
        let mut row = vec![st.t.to_string()];
        for z in u {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        row.push(hamiltonian_raw(u, &emb, &m)?.to_string());
        row.push(st.u.abs_sq().iter().sum::<f64>().to_string());
        let s = spectral_observables_u(u, &emb, &m)?;
        row.extend(s[..n - 1].iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::usage("io", e.to_string()))?;
    Ok(())
}

fn dispatch(cli: Cli) -> Run<ExitCode> {
    match cli.command {
        Command::Classify { n, y_over_pi, tol } => classify(n, y_over_pi, tol)?,
        Command::Matrices { n, p } => matrices(n, p)?,
        Command::Special {
            function,
            z,
            zprime,
            kappa,
            eps,
        } => special(function, z, zprime, kappa, eps)?,
        Command::Alcove {
            coupling,
            samples,
            seed,
            tol,
        } => alcove(&coupling, samples, seed, tol)?,
        Command::Embed { coupling, input } => embed(&coupling, &input)?,
        Command::Unembed { coupling, input } => unembed(&coupling, &input)?,
        Command::Lax {
            coupling,
            model,
            point,
            random,
            seed,
            global: _,
            local,
        } => lax(&coupling, &model, &point, random, seed, local)?,
        Command::Verify {
            suite,
            n,
            p,
            y_over_pi,
            kappa,
            trials,
            tol,
            seed,
        } => {
            if !run_verify(suite, n, p, y_over_pi, kappa, trials, tol, seed)? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Flow {
            coupling,
            kappa,
            lambda,
            t_end,
            dt,
            seed,
            out,
        } => run_flow(&coupling, kappa, lambda, t_end, dt, seed, &out)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: &'a str,
    detail: &'a str,
}

fn report(f: Failure) -> ExitCode {
    let v = ErrorOut {
        error: &f.kind,
        detail: &f.detail,
    };
    eprintln!("{}", serde_json::to_string(&v).unwrap_or_default());
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let detail = e.render().to_string();
            return report(Failure::usage("usage", detail.trim_end()));
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => report(f),
    }
}
