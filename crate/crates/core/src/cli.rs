//! The `cyclobox` command line. Flags override a `key = value` config file;
//! CYCLOBOX_SEED supplies the default seed.
//!
//! Exit codes: 0 success, 1 usage error, 2 guard refusal, 3 failed check.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::concentration::{
    isosceles_report, polytope_report, pyramid_report, right_angle_report, theorem4_report,
    vertex_pair_report, ConcentrationReport, RightAngleSpec, Verdict,
};
use crate::cyclo::{BoxSpec, CyclotomicInt};
use crate::error::Error;
use crate::moments::{
    moment_reports, oracle_cancellation_sums, oracle_moments, second_moment_point_to_vertices_via_sums,
    MomentKind,
};
use crate::rational::{parse_rational, to_f64, to_fraction_string, ExactRational};
use crate::render::{render_scene, SceneKind, SceneSpec, DEFAULT_BUDGET};
use crate::report::{cancellation_rows, emit_reports, pole_records, Format, MomentRecord, Record};
use crate::sampling::SamplerConfig;
use crate::visibility::{visibility_concentration_report, VisibilityReport, DEFAULT_MAX_ATTEMPTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cyclobox", version, about = "Exact geometry and concentration experiments on cyclotomic boxes")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Clone, Args)]
pub struct Opts {
    /// Odd prime p
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Modulus q >= 3 for poles and pole scenes
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Box half-width N
    #[arg(long = "N", global = true)]
    pub n: Option<u64>,
    /// Polytope size K
    #[arg(long = "K", global = true)]
    pub k: Option<u64>,
    /// Inverse tolerance T > 1 for polytopes
    #[arg(long = "T", global = true)]
    pub t: Option<f64>,
    /// Tolerance as "a/b", a decimal or an integer
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Required proportion for calibrated checks
    #[arg(long, global = true)]
    pub target: Option<f64>,
    /// "origin", "north-pole", "east-pole" or comma-separated coefficients
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub exhaustive: bool,
    /// json or csv; plain text when absent
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form distance moments
    Moments {
        /// Vertex-pair moments instead of point-to-vertex moments
        #[arg(long)]
        pairwise: bool,
    },
    /// Compare closed forms with the exhaustive oracle
    Verify {
        #[arg(long)]
        oracle: bool,
    },
    /// Concentration of distances: t4, t5 or isosceles
    Sample {
        #[arg(long)]
        theorem: Option<String>,
    },
    /// Right central angles from alpha
    Angles,
    /// Super-regular K-polytopes on the vertices
    Polytopes,
    /// Pyramids with apex alpha
    Pyramids,
    /// Self-visible polytopes of box points
    Visibility,
    /// North, East, South and West poles
    Poles,
    /// SVG scene
    Render {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        allow_sampling: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Document produced by a subcommand and whether its checks held.
struct Outcome {
    body: String,
    ok: bool,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Run<T> {
    v.parse().map_err(|_| usage(format!("config: bad value {v:?} for {key}")))
}

fn parse_flag(key: &str, v: &str) -> Run<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(usage(format!("config: bad value {v:?} for {key}"))),
    }
}

/// Fills unset options from the config map. Unknown keys are errors.
fn apply_config(o: &mut Opts, cfg: &BTreeMap<String, String>) -> Run<()> {
    for (k, v) in cfg {
        match k.as_str() {
            "p" => o.p = o.p.or(Some(parse_value(k, v)?)),
            "q" => o.q = o.q.or(Some(parse_value(k, v)?)),
            "N" => o.n = o.n.or(Some(parse_value(k, v)?)),
            "K" => o.k = o.k.or(Some(parse_value(k, v)?)),
            "T" => o.t = o.t.or(Some(parse_value(k, v)?)),
            "eps" => o.eps = o.eps.clone().or(Some(v.clone())),
            "eta" => o.eta = o.eta.or(Some(parse_value(k, v)?)),
            "gamma" => o.gamma = o.gamma.or(Some(parse_value(k, v)?)),
            "target" => o.target = o.target.or(Some(parse_value(k, v)?)),
            "alpha" => o.alpha = o.alpha.clone().or(Some(v.clone())),
            "samples" => o.samples = o.samples.or(Some(parse_value(k, v)?)),
            "workers" => o.workers = o.workers.or(Some(parse_value(k, v)?)),
            "seed" => o.seed = o.seed.or(Some(parse_value(k, v)?)),
            "exhaustive" => o.exhaustive |= parse_flag(k, v)?,
            "format" => o.format = o.format.clone().or(Some(v.clone())),
            "out" => o.out = o.out.clone().or(Some(PathBuf::from(v))),
            "budget" => o.budget = o.budget.or(Some(parse_value(k, v)?)),
            _ => return Err(usage(format!("config: unknown key {k:?}"))),
        }
    }
    Ok(())
}

impl Opts {
    fn p(&self) -> Run<u64> {
        self.p.ok_or_else(|| usage("--p is required"))
    }

    fn n(&self) -> u64 {
        self.n.unwrap_or(1)
    }

    fn boxspec(&self) -> Run<BoxSpec> {
        Ok(BoxSpec::new(self.p()?, self.n())?)
    }

    fn eps(&self, default: &str) -> Run<ExactRational> {
        let raw = self.eps.as_deref().unwrap_or(default);
        let e = parse_rational(raw).map_err(|e| usage(e.to_string()))?;
        if e <= ExactRational::from_integer(0.into()) {
            return Err(usage("--eps must be positive"));
        }
        Ok(e)
    }

    fn format(&self) -> Run<Option<Format>> {
        self.format
            .as_deref()
            .map(|f| f.parse::<Format>().map_err(|e| usage(e.to_string())))
            .transpose()
    }

    fn sampler(&self) -> Run<SamplerConfig> {
        let workers = self
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        Ok(SamplerConfig::new(self.seed.unwrap_or(0), self.samples.unwrap_or(10_000), workers)?)
    }

    fn alpha(&self, b: &BoxSpec) -> Run<CyclotomicInt> {
        Ok(parse_alpha(self.alpha.as_deref().unwrap_or("origin"), b)?)
    }
}

pub fn parse_alpha(s: &str, b: &BoxSpec) -> Result<CyclotomicInt, Error> {
    match s.trim() {
        "origin" | "0" => Ok(b.origin()),
        "north-pole" | "np" => Ok(b.north_pole()),
        "east-pole" | "ep" => Ok(b.east_pole()),
        list => {
            let coeffs = list
                .trim_matches(|c| c == '(' || c == ')')
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<num_bigint::BigInt>()
                        .map_err(|_| Error::InvalidParameter(format!("bad coefficient {c:?} in --alpha")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            CyclotomicInt::new(b.p(), coeffs)
        }
    }
}

fn structured<T: Record>(records: &[T], format: Format) -> Run<String> {
    Ok(emit_reports(records, format)?)
}

fn short(kind: MomentKind) -> &'static str {
    match kind {
        MomentKind::AvgPointVertices | MomentKind::AvgVertexPairs => "A",
        MomentKind::FourthVertexPairs => "L",
        MomentKind::SecondMomentPointVertices | MomentKind::VarianceVertexPairs => "M",
    }
}

fn cmd_moments(o: &Opts, pairwise: bool) -> Run<Outcome> {
    let b = o.boxspec()?;
    let alpha = if pairwise { None } else { Some(o.alpha(&b)?) };
    let reports = moment_reports(alpha.as_ref(), &b)?;
    let body = match o.format()? {
        Some(f) => structured(&reports.iter().map(MomentRecord::from).collect::<Vec<_>>(), f)?,
        None => reports
            .iter()
            .map(|r| format!("{}={}\n", short(r.kind), to_fraction_string(&r.formula_value)))
            .collect(),
    };
    Ok(Outcome { body, ok: true })
}

fn cmd_verify(o: &Opts, oracle: bool) -> Run<Outcome> {
    let b = o.boxspec()?;
    let alpha = o.alpha(&b)?;
    if !oracle {
        // closed forms against each other, no enumeration
        let direct = moment_reports(Some(&alpha), &b)?;
        let via_sums = second_moment_point_to_vertices_via_sums(&alpha, &b)?;
        let pair = moment_reports(None, &b)?;
        let var_ok = pair[2].formula_value == &pair[1].formula_value - &pair[0].formula_value * &pair[0].formula_value;
        let m_ok = direct[1].formula_value == via_sums;
        let body = format!(
            "second_moment_point_vertices two routes {}\nvariance_vertex_pairs = L - A^2 {}\n",
            if m_ok { "EXACT-EQUAL" } else { "MISMATCH" },
            if var_ok { "EXACT-EQUAL" } else { "MISMATCH" },
        );
        return Ok(Outcome { body, ok: m_ok && var_ok });
    }
    let mut reports = oracle_moments(Some(&alpha), &b)?;
    reports.extend(oracle_moments(None, &b)?);
    let cancel = oracle_cancellation_sums(&alpha, &b)?;
    let ok = reports.iter().all(|r| r.exact_equal() == Some(true)) && cancel.all_hold();
    let body = match o.format()? {
        Some(f) => {
            let mut s = structured(&reports.iter().map(MomentRecord::from).collect::<Vec<_>>(), f)?;
            s.push_str(&structured(&cancellation_rows(&cancel), f)?);
            s
        }
        None => {
            let mut s = String::new();
            for r in &reports {
                let oracle = r.oracle_value.as_ref().map(to_fraction_string).unwrap_or_default();
                let tag = if r.exact_equal() == Some(true) { "EXACT-EQUAL" } else { "MISMATCH" };
                s.push_str(&format!(
                    "{} formula={} oracle={} {tag}\n",
                    r.kind,
                    to_fraction_string(&r.formula_value),
                    oracle
                ));
            }
            for c in &cancel.checks {
                let tag = if c.holds() { "EXACT-EQUAL" } else { "MISMATCH" };
                s.push_str(&format!("sum {} enumerated={} expected={} {tag}\n", c.name, c.enumerated, c.expected));
            }
            s
        }
    };
    Ok(Outcome { body, ok })
}

fn concentration_text(r: &ConcentrationReport) -> String {
    let mut s = format!(
        "{:?} p={} N={} eps={} eta={:.6}: {}/{} = {:.6} vs bound {:.6} ({}) {}\n",
        r.theorem,
        r.p,
        r.n,
        r.epsilon,
        r.eta,
        r.hits,
        r.samples,
        r.empirical_proportion,
        r.bound,
        r.bound_kind,
        r.verdict.as_str().to_uppercase(),
    );
    for e in &r.extras {
        s.push_str(&format!("  {} = {:.6}\n", e.name, e.value));
    }
    for n in &r.notes {
        s.push_str(&format!("  note: {n}\n"));
    }
    s
}

fn concentration_outcome(o: &Opts, r: ConcentrationReport) -> Run<Outcome> {
    let ok = r.verdict != Verdict::Fail;
    let body = match o.format()? {
        Some(f) => structured(&[r], f)?,
        None => concentration_text(&r),
    };
    Ok(Outcome { body, ok })
}

fn progress(err: &mut dyn Write, what: &str, cfg: &SamplerConfig) {
    let _ = writeln!(
        err,
        "{what}: {} samples, {} workers, seed {}",
        cfg.sample_count, cfg.worker_count, cfg.seed
    );
}

fn cmd_sample(o: &Opts, theorem: Option<&str>, err: &mut dyn Write) -> Run<Outcome> {
    let b = o.boxspec()?;
    let eps = o.eps("1/2")?;
    let cfg = o.sampler()?;
    let theorem = theorem.unwrap_or("t4");
    progress(err, theorem, &cfg);
    let r = match theorem {
        "t4" => theorem4_report(&o.alpha(&b)?, &b, &eps, &cfg, o.exhaustive)?,
        "t5" => vertex_pair_report(&b, &eps, &cfg, o.exhaustive)?,
        "isosceles" => isosceles_report(&o.alpha(&b)?, &b, &eps, &cfg)?,
        other => return Err(usage(format!("unknown theorem {other:?}; expected t4, t5 or isosceles"))),
    };
    concentration_outcome(o, r)
}

fn cmd_angles(o: &Opts, err: &mut dyn Write) -> Run<Outcome> {
    let b = o.boxspec()?;
    let eps_cos = to_f64(&o.eps("1/10")?);
    let spec = RightAngleSpec {
        eps_cos,
        target: o.target.unwrap_or(0.95),
        eta: o.eta.unwrap_or_else(|| (1.0 / eps_cos).ln() / (b.p() as f64).ln()),
        gamma: o.gamma.unwrap_or(0.1),
    };
    let alpha = parse_alpha(o.alpha.as_deref().unwrap_or("north-pole"), &b)?;
    let cfg = o.sampler()?;
    progress(err, "angles", &cfg);
    concentration_outcome(o, right_angle_report(&alpha, &b, &spec, &cfg)?)
}

fn cmd_polytopes(o: &Opts, err: &mut dyn Write) -> Run<Outcome> {
    let b = o.boxspec()?;
    let t = match (o.t, o.eta) {
        (Some(t), _) => t,
        (None, Some(eta)) => (b.p() as f64).powf(eta),
        (None, None) => return Err(usage("polytopes needs --T or --eta")),
    };
    let cfg = o.sampler()?;
    progress(err, "polytopes", &cfg);
    concentration_outcome(o, polytope_report(&b, o.k.unwrap_or(3), t, &cfg)?)
}

fn cmd_pyramids(o: &Opts, err: &mut dyn Write) -> Run<Outcome> {
    let b = o.boxspec()?;
    let eps = o.eps("1/2")?;
    let cfg = o.sampler()?;
    progress(err, "pyramids", &cfg);
    concentration_outcome(o, pyramid_report(&o.alpha(&b)?, &b, o.k.unwrap_or(3), &eps, &cfg)?)
}

fn visibility_text(r: &VisibilityReport) -> String {
    let mut s = format!(
        "visibility p={} N={} K={}: {}/{} = {:.6} within {} of 1/sqrt6 vs target {:.6} {}\n  visible_fraction = {:.6}\n  mean_dist_sq = {:.6}\n  N/p = {:.3}\n",
        r.p,
        r.n,
        r.k,
        r.hits,
        r.sample_count,
        r.proportion_near_center,
        r.epsilon,
        r.target,
        if r.pass { "PASS" } else { "FAIL" },
        r.visible_fraction,
        r.mean_dist_sq,
        r.n_over_p,
    );
    for n in &r.notes {
        s.push_str(&format!("  note: {n}\n"));
    }
    s
}

fn cmd_visibility(o: &Opts, err: &mut dyn Write) -> Run<Outcome> {
    let b = o.boxspec()?;
    let eps = to_f64(&o.eps("1/20")?);
    let cfg = o.sampler()?;
    progress(err, "visibility", &cfg);
    let r = visibility_concentration_report(&b, o.k.unwrap_or(3), eps, &cfg, DEFAULT_MAX_ATTEMPTS)?;
    let ok = r.pass;
    let body = match o.format()? {
        Some(f) => structured(&[r], f)?,
        None => visibility_text(&r),
    };
    Ok(Outcome { body, ok })
}

/// Maps values that print as zero at 10 decimals to +0.
fn unsigned_zero(v: f64) -> f64 {
    if v.abs() < 5e-11 {
        0.0
    } else {
        v
    }
}

fn cmd_poles(o: &Opts) -> Run<Outcome> {
    let q = o.q.or(o.p).ok_or_else(|| usage("poles needs --q"))?;
    let recs = pole_records(q, o.n())?;
    let body = match o.format()? {
        Some(f) => structured(&recs, f)?,
        None => {
            let mut s = String::new();
            for r in &recs {
                s.push_str(&format!("{} {} = {:.10} {:+.10}i\n", r.name, r.coeffs, unsigned_zero(r.re), unsigned_zero(r.im)));
            }
            match recs[0].euclidean_diameter {
                Some(d) => s.push_str(&format!("euclidean diameter = {d:.10}\n")),
                None => s.push_str("euclidean diameter: q is even, no closed form\n"),
            }
            s
        }
    };
    Ok(Outcome { body, ok: true })
}

fn cmd_render(o: &Opts, kind: Option<&str>, count: Option<u64>, allow_sampling: bool) -> Run<Outcome> {
    let kind: SceneKind = kind
        .ok_or_else(|| usage("render needs --kind"))?
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let q = o.q.or(o.p).ok_or_else(|| usage("render needs --p or --q"))?;
    let mut spec = SceneSpec::new(kind, q, o.n());
    if let Some(k) = o.k {
        spec.k = k;
    }
    if let Some(c) = count {
        spec.count = c;
    }
    spec.budget = o.budget.unwrap_or(DEFAULT_BUDGET);
    spec.seed = o.seed.unwrap_or(0);
    spec.allow_sampling = allow_sampling;
    Ok(Outcome { body: render_scene(&spec)?, ok: true })
}

/// Writes `<path>.partial` and renames it, so an interrupted run leaves
/// no file at `path`.
fn write_atomically(path: &Path, body: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let res = std::fs::write(&tmp, body).and_then(|_| std::fs::rename(&tmp, path));
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    res
}

fn dispatch(cli: Cli, err: &mut dyn Write) -> Run<(Opts, Outcome)> {
    let mut o = cli.opts;
    if let Some(path) = o.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        apply_config(&mut o, &parse_config(&text).map_err(usage)?)?;
    }
    if o.seed.is_none() {
        if let Ok(s) = std::env::var("CYCLOBOX_SEED") {
            o.seed = Some(s.trim().parse().map_err(|_| usage(format!("CYCLOBOX_SEED={s:?} is not a u64")))?);
        }
    }
    let outcome = match cli.command {
        Command::Moments { pairwise } => cmd_moments(&o, pairwise)?,
        Command::Verify { oracle } => cmd_verify(&o, oracle)?,
        Command::Sample { theorem } => cmd_sample(&o, theorem.as_deref(), err)?,
        Command::Angles => cmd_angles(&o, err)?,
        Command::Polytopes => cmd_polytopes(&o, err)?,
        Command::Pyramids => cmd_pyramids(&o, err)?,
        Command::Visibility => cmd_visibility(&o, err)?,
        Command::Poles => cmd_poles(&o)?,
        Command::Render { kind, count, allow_sampling } => cmd_render(&o, kind.as_deref(), count, allow_sampling)?,
    };
    Ok((o, outcome))
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_with_io<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            };
        }
    };
    let result = dispatch(cli, err).and_then(|(o, outcome)| {
        match &o.out {
            Some(path) => write_atomically(path, &outcome.body)?,
            None => out.write_all(outcome.body.as_bytes())?,
        }
        Ok(outcome.ok)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(err, "check failed");
            EXIT_CHECK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_guard() {
                EXIT_GUARD
            } else {
                EXIT_USAGE
            }
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run() -> i32 {
    run_with_io(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
