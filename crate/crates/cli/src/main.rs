use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lightcone::continuation::{build_hyperbola_family, run_rational_suite, ContinuationConfig};
use lightcone::envelopes::{
    g1_margin, jld_search, mu_cone_margin, shell_complement_margin, two_double_cone_extension, EnvelopeVerdict,
    ExtensionRegion, SearchBudget, TOL_ENV, TOL_SEARCH,
};
use lightcone::oracle::{run_suite, OracleConfig, SUITES};
use lightcone::spectral::{massgap_contradiction, MassGapWitness, SpectrumHypothesis};
use lightcone::transforms::{line_image, phi, psi_phi, psi_phi_inverse};
use lightcone::{ComplexPoint2, Error, RealPoint2, Region};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

mod parse;

const THREADS_ENV: &str = "LIGHTCONE_ENV_THREADS";

/// Membership, slices and cross-checks for envelopes of holomorphy of tube
/// domains joined along real regions of 1+1 Minkowski space.
///
/// Points are written "x0,x1" (real) or "re0,re1;im0,im1" (complex).
/// Regions are JSON objects such as {"type":"DoubleCone","a":[-1,0],"b":[0,0]};
/// prefix a path with @ to read one from a file.
///
/// Exit codes: 0 success, 1 check failure, 2 usage or schema error,
/// 3 unsupported configuration. The environment variable
/// LIGHTCONE_ENV_THREADS caps the number of worker threads.
#[derive(Parser, Debug, Serialize)]
#[command(name = "lightcone", version, verbatim_doc_comment)]
struct Cli {
    /// Seed for every randomized or quasi-random step.
    #[arg(long, global = true, default_value_t = lightcone::sampling::DEFAULT_SEED)]
    seed: u64,
    /// Half-width of the boundary band for verdicts (defaults: 1e-9 closed form, 1e-6 search).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid points per axis for witness searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Add wall time to reports (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Envelope {
    /// Tubes plus the complexified cone {x² > μ², x₀ > 0}; needs --mu.
    MuCone,
    /// Tubes plus the complexified shell band m1 < √x² < m2; needs --m1 --m2.
    Band,
    /// Complement of {z : 0 ≤ z² ≤ m²}; needs --m.
    Shell,
    /// Real points gained by D_{c,d} next to D_{(-a,0),0}; needs --a --c --d.
    Extension,
}

#[derive(Args, Debug, Serialize)]
struct Target {
    /// Closed-form envelope.
    #[arg(long, value_enum, conflicts_with = "region")]
    envelope: Option<Envelope>,
    /// Region JSON; complex points are decided by a witness search.
    #[arg(long)]
    region: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    m1: Option<f64>,
    #[arg(long)]
    m2: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    /// Lower vertex "c0,c1" of the second double cone.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Upper vertex "d0,d1" of the second double cone.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Decide one point: prints {"verdict": "inside|excluded|boundary", "margin": r}.
    Member {
        #[command(flatten)]
        target: Target,
        /// Complex point "re0,re1;im0,im1".
        #[arg(long, conflicts_with = "p", allow_hyphen_values = true)]
        z: Option<String>,
        /// Real point "x0,x1".
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
    },
    /// Verdicts on a grid of real parts at a fixed imaginary part.
    /// CSV columns x0,x1,verdict,margin, x0 outer and x1 inner.
    Slice {
        #[command(flatten)]
        target: Target,
        /// Imaginary part "y0,y1".
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
        x1: String,
        /// Points per axis (at least 2).
        #[arg(long, default_value_t = 61)]
        res: usize,
    },
    /// Apply one of the conformal maps to a point.
    Transform {
        #[arg(long, value_enum, default_value_t = MapKind::Phi)]
        map: MapKind,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        mu: Option<f64>,
        /// Slope dx0/dx1 of the line for --map line.
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Offset of the line x0 = sigma*x1 + c.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
    },
    /// Run a named cross-check; exits 1 when it fails.
    Oracle {
        /// One of: inversion, mu-cone, band-boundary, shell-complement, cauchy,
        /// max-principle, pflug, spacelike-complement, massgap, all.
        suite: String,
        /// Sample count.
        #[arg(long)]
        n: Option<usize>,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Search for a mass-gap contradiction for a spectrum confined to a shell band.
    Massgap {
        #[arg(long)]
        m: f64,
        /// Upper mass, or "inf".
        #[arg(long, value_parser = parse::mass)]
        m1: f64,
        /// Forward unit vector "s0,s1".
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Evaluate at this rapidity instead of scanning.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Continue the rational test functions along a shifted hyperbola family.
    Continue {
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = -0.8, allow_hyphen_values = true)]
        slope: f64,
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MapKind {
    /// z ↦ −z/z².
    Phi,
    /// The composite map carrying lines onto hyperbolas; needs --mu.
    Psi,
    PsiInverse,
    /// Hyperbola that is the image of x0 = sigma*x1 + c; needs --sigma --c --mu.
    Line,
}

enum Failure {
    Check(String),
    Usage(String),
    Unsupported(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedRegion(_) | Error::UnsupportedConfiguration(_) => Failure::Unsupported(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<String, Failure>;

fn need(v: Option<f64>, flag: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

/// Drops the sign of negative zero.
fn nz(v: f64) -> f64 {
    v + 0.0
}

fn fmt_num(v: f64) -> String {
    let v = nz(v);
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

enum Decider {
    MuCone(f64),
    Band(f64, f64),
    Shell(f64),
    Extension(ExtensionRegion),
    Region(Region),
}

impl Decider {
    fn new(t: &Target) -> Result<Self, Failure> {
        match (t.envelope, &t.region) {
            (Some(Envelope::MuCone), _) => {
                let mu = need(t.mu, "mu")?;
                if !(mu.is_finite() && mu >= 0.0) {
                    return Err(Failure::Usage(format!("--mu must be >= 0, got {mu}")));
                }
                Ok(Decider::MuCone(mu))
            }
            (Some(Envelope::Band), _) => {
                let (m1, m2) = (need(t.m1, "m1")?, need(t.m2, "m2")?);
                if !(m1.is_finite() && m2.is_finite() && 0.0 < m1 && m1 < m2) {
                    return Err(Failure::Usage(format!("need 0 < m1 < m2, got {m1}, {m2}")));
                }
                Ok(Decider::Band(m1, m2))
            }
            (Some(Envelope::Shell), _) => {
                let m = need(t.m, "m")?;
                if !(m.is_finite() && m > 0.0) {
                    return Err(Failure::Usage(format!("--m must be positive, got {m}")));
                }
                Ok(Decider::Shell(m))
            }
            (Some(Envelope::Extension), _) => {
                let pt = |v: &Option<String>, flag: &str| -> Result<RealPoint2, Failure> {
                    Ok(parse::real_point(v.as_deref().ok_or_else(|| Failure::Usage(format!("missing --{flag}")))?)?)
                };
                Ok(Decider::Extension(two_double_cone_extension(need(t.a, "a")?, pt(&t.c, "c")?, pt(&t.d, "d")?)?))
            }
            (None, Some(r)) => Ok(Decider::Region(parse::region(&parse::region_text(r)?)?)),
            (None, None) => Err(Failure::Usage("give --envelope or --region".into())),
        }
    }

    /// Margin and verdict, with `tol` overriding the default band.
    fn decide(
        &self,
        z: ComplexPoint2,
        tol: Option<f64>,
        budget: &SearchBudget,
    ) -> Result<(EnvelopeVerdict, f64), Failure> {
        let (margin, default_tol) = match self {
            Decider::MuCone(mu) => (mu_cone_margin(z, *mu), TOL_ENV),
            Decider::Band(m1, m2) => (g1_margin(z, *m1, *m2), TOL_ENV),
            Decider::Shell(m) => {
                let v = lightcone::envelopes::envelope_shell_complement(z, *m)?;
                let d = shell_complement_margin(z, *m);
                let tol = tol.unwrap_or(TOL_ENV);
                let verdict = match v {
                    EnvelopeVerdict::Inside if d <= tol => EnvelopeVerdict::Boundary { margin: d },
                    other => other,
                };
                let signed = if verdict.is_excluded() { -d } else { d };
                return Ok((verdict, signed));
            }
            Decider::Extension(ext) => {
                if z.im() != RealPoint2::ORIGIN {
                    return Err(Failure::Usage("the extension envelope is decided for real points only".into()));
                }
                let v = if ext.contains(z.re()) { EnvelopeVerdict::Inside } else { EnvelopeVerdict::Excluded };
                return Ok((v, f64::NAN));
            }
            Decider::Region(r) if z.im() == RealPoint2::ORIGIN => (r.signed_distance(z.re()), TOL_ENV),
            Decider::Region(r) => (jld_search(z, r, budget)?.margin(), TOL_SEARCH),
        };
        Ok((EnvelopeVerdict::from_margin(margin, tol.unwrap_or(default_tol)), margin))
    }
}

fn budget(cli: &Cli) -> SearchBudget {
    match cli.budget {
        Some(g) => SearchBudget { grid: g.max(4), ..SearchBudget::default() },
        None => SearchBudget::default(),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn member(cli: &Cli, target: &Target, z: &Option<String>, p: &Option<String>) -> Outcome {
    let point = match (z, p) {
        (Some(z), _) => parse::complex_point(z)?,
        (None, Some(p)) => parse::real_point(p)?.complexify(),
        (None, None) => return Err(Failure::Usage("give --z or --p".into())),
    };
    let d = Decider::new(target)?;
    let (verdict, margin) = d.decide(point, cli.tol, &budget(cli))?;
    Ok(match cli.format {
        Format::Json => {
            let mut s =
                serde_json::to_string(&json!({"verdict": verdict.label(), "margin": nz(margin)})).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => format!("verdict,margin\n{},{}\n", verdict.label(), fmt_num(margin)),
    })
}

fn slice(cli: &Cli, target: &Target, y: &str, x0: &str, x1: &str, res: usize) -> Outcome {
    if res < 2 {
        return Err(Failure::Usage(format!("--res must be at least 2, got {res}")));
    }
    let y = parse::real_point(y)?;
    let (a0, b0) = parse::range(x0)?;
    let (a1, b1) = parse::range(x1)?;
    let d = Decider::new(target)?;
    let bud = budget(cli);
    let xs0 = lightcone::sampling::linspace(a0, b0, res);
    let xs1 = lightcone::sampling::linspace(a1, b1, res);
    let rows: Vec<Result<Vec<(f64, f64, EnvelopeVerdict, f64)>, Failure>> = xs0
        .par_iter()
        .map(|&t| {
            xs1.iter()
                .map(|&x| {
                    let z = ComplexPoint2::from_parts(RealPoint2::new(t, x), y);
                    let (v, m) = d.decide(z, cli.tol, &bud)?;
                    Ok((t, x, v, m))
                })
                .collect()
        })
        .collect();
    let mut cells = Vec::with_capacity(res * res);
    for r in rows {
        cells.extend(r?);
    }
    Ok(match cli.format {
        Format::Csv => {
            let mut s = String::from("x0,x1,verdict,margin\n");
            for (t, x, v, m) in cells {
                let _ = writeln!(s, "{},{},{},{}", fmt_num(t), fmt_num(x), v.label(), fmt_num(m));
            }
            s
        }
        Format::Json => pretty(&Value::Array(
            cells
                .into_iter()
                .map(|(t, x, v, m)| json!({"x0": nz(t), "x1": nz(x), "verdict": v.label(), "margin": nz(m)}))
                .collect(),
        )),
    })
}

fn point_json(z: ComplexPoint2) -> Value {
    json!({"re": [nz(z.t.re), nz(z.x.re)], "im": [nz(z.t.im), nz(z.x.im)]})
}

fn transform(
    cli: &Cli,
    map: MapKind,
    z: &Option<String>,
    mu: Option<f64>,
    sigma: Option<f64>,
    c: Option<f64>,
) -> Outcome {
    let out = match map {
        MapKind::Line => {
            let h = line_image(need(sigma, "sigma")?, need(c, "c")?, need(mu, "mu")?)?;
            json!({"map": "line", "center": [h.center.t, h.center.x], "lam": h.lam})
        }
        _ => {
            let z = parse::complex_point(z.as_deref().ok_or_else(|| Failure::Usage("missing --z".into()))?)?;
            let w = match map {
                MapKind::Phi => phi(z)?,
                MapKind::Psi => psi_phi(z, need(mu, "mu")?)?,
                _ => psi_phi_inverse(z, need(mu, "mu")?)?,
            };
            json!({"map": map, "z": point_json(z), "image": point_json(w)})
        }
    };
    match cli.format {
        Format::Json => Ok(pretty(&out)),
        Format::Csv => match &out["image"] {
            Value::Null => Ok(format!("c0,c1,lam\n{},{},{}\n", out["center"][0], out["center"][1], out["lam"])),
            img => {
                Ok(format!("re0,re1,im0,im1\n{},{},{},{}\n", img["re"][0], img["re"][1], img["im"][0], img["im"][1]))
            }
        },
    }
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    config_digest: String,
    seed: u64,
    passed: bool,
    checks: Vec<lightcone::oracle::OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

fn digest(cli: &Cli) -> String {
    let cfg = serde_json::to_string(
        &json!({"seed": cli.seed, "tol": cli.tol, "budget": cli.budget, "command": &cli.command}),
    )
    .expect("json");
    Sha256::digest(cfg.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn oracle(cli: &Cli, suite: &str, n: Option<usize>, grid: Option<usize>, start: Instant) -> Outcome {
    let cfg = OracleConfig { seed: cli.seed, n, grid };
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let checks = names.iter().map(|s| run_suite(s, &cfg)).collect::<Result<Vec<_>, _>>()?;
    let passed = checks.iter().all(|c| c.passed);
    let report = RunReport {
        command: format!("oracle {suite}"),
        config_digest: digest(cli),
        seed: cli.seed,
        passed,
        checks,
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let text = match cli.format {
        Format::Json => pretty(&serde_json::to_value(&report).expect("json")),
        Format::Csv => {
            let mut s = String::from("suite,passed,checks,failures,max_deviation\n");
            for c in &report.checks {
                let _ =
                    writeln!(s, "{},{},{},{},{}", c.suite, c.passed, c.checks, c.failures, fmt_num(c.max_deviation));
            }
            s
        }
    };
    if passed {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn witness_json(w: &Option<MassGapWitness>) -> Value {
    match w {
        Some(w) => json!({
            "witness": [w.q.t, w.q.x],
            "q_square": w.q_square,
            "theta": w.theta,
            "crossing": w.crossing,
        }),
        None => json!({"witness": null, "q_square": null}),
    }
}

fn massgap(cli: &Cli, m: f64, m1: f64, s: &str, epsilon: f64, theta: Option<f64>) -> Outcome {
    let h = SpectrumHypothesis::new(m, m1, parse::real_point(s)?, epsilon)?;
    let w = match theta {
        Some(th) => h.witness_at(th),
        None => massgap_contradiction(&h)?,
    };
    let mut v = witness_json(&w);
    if !m1.is_finite() {
        v["reason"] = json!("envelope step unavailable for an unbounded band");
    }
    match cli.format {
        Format::Json => Ok(pretty(&v)),
        Format::Csv => Ok(match w {
            Some(w) => format!("q0,q1,q_square,theta\n{},{},{},{}\n", w.q.t, w.q.x, w.q_square, w.theta),
            None => "q0,q1,q_square,theta\n,,,\n".into(),
        }),
    }
}

fn cont(cli: &Cli, p: &str, slope: f64, s: &str, mu: f64, nodes: usize, start: Instant) -> Outcome {
    if nodes < 8 || nodes % 2 != 0 {
        return Err(Failure::Usage(format!("--nodes must be even and at least 8, got {nodes}")));
    }
    let fam = build_hyperbola_family(parse::real_point(p)?, slope, parse::real_point(s)?, mu)?;
    let alphas = lightcone::oracle::canonical_alphas(&fam);
    let cfg = ContinuationConfig { nodes, ..ContinuationConfig::default() };
    let rep = run_rational_suite(&fam, &alphas, &cfg)?;
    let mut v = json!({
        "family": fam,
        "alphas": alphas,
        "nodes": nodes,
        "functions": rep.functions,
        "max_error": rep.max_error,
        "max_error_doubled": rep.max_error_doubled,
        "doubling_ratio": rep.doubling_ratio(),
        "max_estimate": rep.max_estimate,
        "passed": rep.passed(),
        "config_digest": digest(cli),
    });
    if cli.timing {
        v["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    }
    let text = match cli.format {
        Format::Json => pretty(&v),
        Format::Csv => format!(
            "functions,max_error,max_error_doubled,doubling_ratio,passed\n{},{},{},{},{}\n",
            rep.functions,
            fmt_num(rep.max_error),
            fmt_num(rep.max_error_doubled),
            fmt_num(rep.doubling_ratio()),
            rep.passed()
        ),
    };
    if rep.passed() {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Usage(format!("--tol must be >= 0, got {t}")));
        }
    }
    match &cli.command {
        Command::Member { target, z, p } => member(cli, target, z, p),
        Command::Slice { target, y, x0, x1, res } => slice(cli, target, y, x0, x1, *res),
        Command::Transform { map, z, mu, sigma, c } => transform(cli, *map, z, *mu, *sigma, *c),
        Command::Oracle { suite, n, grid } => oracle(cli, suite, *n, *grid, start),
        Command::Massgap { m, m1, s, epsilon, theta } => massgap(cli, *m, *m1, s, *epsilon, *theta),
        Command::Continue { p, slope, s, mu, nodes } => cont(cli, p, *slope, s, *mu, *nodes, start),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}")),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
            _ => Ok(()),
        },
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (text, code) = match run(&cli) {
        Ok(t) => (t, 0),
        Err(Failure::Check(t)) => (t, 1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(Failure::Unsupported(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    if let Err(e) = emit(&cli, &text) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
