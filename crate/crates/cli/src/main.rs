//! `fif`: validate, render, evaluate and analyse fractal interpolation systems.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 word or point
//! budget exceeded, 3 a separation witness was found.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use fif_core::attractor::{graph_point, validate, ValidationOptions};
use fif_core::io::{
    emit_any_spec, figure1_svg, orbit_csv, parse_spec, points_csv, sample_svg, AnySystem,
    RunReport,
};
use fif_core::orbit::{classify_orbit_curve, epsilon_net, epsilon_net_auto, verify_orbit_on_curve, OrbitTrace};
use fif_core::separation::{wsp_check_1d, wsp_check_2d, FamilyElement, WspOptions, WspStatus, WspVerdict, DEFAULT_WORD_BUDGET};
use fif_core::{
    evaluate_f, sample_attractor, Affine2, FifError, IfsSystem, Rational, SampleOptions, Scalar,
    Word,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_WITNESS: u8 = 3;

#[derive(Parser)]
#[command(name = "fif", version, about = "Affine fractal interpolation functions with overlapping pieces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SpecArgs {
    /// System file
    spec: PathBuf,
    /// Override a parameter declared in the file, as NAME=VALUE
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "1d")]
    One,
    #[value(name = "2d")]
    Two,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Check contraction, covering and the graph property
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Sample the attractor to CSV and optionally SVG
    Render {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate the interpolation function at one abscissa
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Bounded-depth search for family elements close to the identity
    Wsp {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, value_enum, default_value = "1d")]
        mode: Mode,
        /// Cap on materialized words
        #[arg(long, env = "FIF_WORD_BUDGET", default_value_t = DEFAULT_WORD_BUDGET)]
        budget: u128,
    },
    /// Orbit of the graph's end point under g_j^-1 g_i as an eps-net, to CSV
    Orbit {
        #[command(flatten)]
        spec: SpecArgs,
        /// Word i, comma-separated 1-based indices
        #[arg(long, allow_hyphen_values = true)]
        gi: String,
        /// Word j, comma-separated 1-based indices
        #[arg(long, allow_hyphen_values = true)]
        gj: String,
        /// Net radius; chosen automatically when omitted
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form curve carrying the orbit of (x0, y0) under g
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        x0: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        y0: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        a: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        b: String,
        /// Iterates used for the residual check
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Draw the four-map system with its overlapping pieces
    ExampleFigure1 {
        #[arg(long, allow_hyphen_values = true, default_value = "1/5")]
        param: String,
        #[arg(long, default_value_t = 7)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<FifError> for Failure {
    fn from(e: FifError) -> Self {
        let code = match e {
            FifError::DepthTooLarge { .. } => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load(args: &SpecArgs) -> Result<(AnySystem, Vec<u8>), Failure> {
    let bytes = read(&args.spec)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| fail("system file is not UTF-8"))?;
    let overrides = args
        .params
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| fail(format!("expected NAME=VALUE, got {kv:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spec = parse_spec(&text, &overrides)?;
    for w in &spec.warnings {
        eprintln!("warning: {w}");
    }
    // provenance covers the effective system, not just the file
    let mut provenance = bytes;
    provenance.extend_from_slice(emit_any_spec(&spec.system).as_bytes());
    Ok((spec.system, provenance))
}

fn parse_scalar<S: Scalar + FromStrScalar>(text: &str) -> Result<S, Failure> {
    S::parse_scalar(text).ok_or_else(|| fail(format!("bad number {text:?}")))
}

trait FromStrScalar: Sized {
    fn parse_scalar(text: &str) -> Option<Self>;
}

impl FromStrScalar for Rational {
    /// Fractions, integers and plain decimals (`-0.25`) parse exactly.
    fn parse_scalar(text: &str) -> Option<Self> {
        if let Ok(v) = Rational::from_str(text) {
            return Some(v);
        }
        let (int, frac) = text.split_once('.')?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let digits = format!("{int}{frac}");
        let denom = format!("1{}", "0".repeat(frac.len()));
        Rational::from_str(&format!("{digits}/{denom}")).ok()
    }
}

impl FromStrScalar for f64 {
    fn parse_scalar(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some(_) => Rational::from_str(text).ok().map(|r| r.to_f64()),
            None => text.parse().ok().filter(|v: &f64| v.is_finite()),
        }
    }
}

fn is_decimal(text: &str) -> bool {
    text.contains(['.', 'e', 'E'])
}

macro_rules! with_system {
    ($sys:expr, |$s:ident| $body:expr) => {
        match $sys {
            AnySystem::Exact($s) => $body,
            AnySystem::Float($s) => $body,
        }
    };
}

fn cmd_validate(args: &SpecArgs, tol: f64) -> Outcome {
    let (sys, input) = load(args)?;
    let opts = ValidationOptions {
        graph_tolerance: tol,
        ..ValidationOptions::default()
    };
    let mut report = RunReport::new("validate", &input);
    let ok = with_system!(&sys, |s| {
        let v = validate(s, &opts);
        report.field("maps", v.map_count);
        report.field("arithmetic", if sys.is_exact() { "exact" } else { "floating" });
        report.field("contraction", status(&v.contraction));
        report.field("self_map", status(&v.self_map));
        report.field("covering", status(&v.covering));
        report.field("graph", status(&v.graph));
        report.field("graph_tolerance", format!("{:?}", v.graph_tolerance));
        report.field("max_discrepancy", format!("{:?}", v.max_discrepancy));
        let rows: Vec<Vec<String>> = v
            .intersections
            .iter()
            .map(|c| {
                vec![
                    c.i.to_string(),
                    c.j.to_string(),
                    c.lo.to_string(),
                    c.hi.to_string(),
                    if c.is_overlap() { "overlap" } else { "touch" }.to_string(),
                ]
            })
            .collect();
        report.table("strip_intersections", &["i", "j", "lo", "hi", "kind"], &rows);
        let valid = v.is_valid();
        report.field("valid", valid);
        if let Some(e) = v.first_error() {
            eprintln!("error: {e}");
        }
        valid
    });
    print!("{}", report.render());
    Ok(if ok { 0 } else { EXIT_FAILURE })
}

fn status(r: &Option<FifError>) -> String {
    r.as_ref().map_or("ok".to_string(), |e| e.to_string())
}

fn require_valid<S: Scalar>(sys: &IfsSystem<S>) -> Result<(), Failure> {
    let v = validate(sys, &ValidationOptions::default());
    match v.first_error() {
        Some(e) => Err(e.clone().into()),
        None => Ok(()),
    }
}

fn cmd_render(args: &SpecArgs, depth: usize, out: &Path, svg: Option<&Path>) -> Outcome {
    let (sys, input) = load(args)?;
    let sample = with_system!(&sys, |s| {
        require_valid(s)?;
        sample_attractor(s, depth, &SampleOptions::default())?.to_f64()
    });
    write(out, &points_csv(&sample.points))?;
    if let Some(path) = svg {
        write(path, &sample_svg(&sample))?;
    }
    let mut report = RunReport::new("render", &input);
    report
        .field("depth", depth)
        .field("points", sample.len())
        .field("resolution", sample.resolution)
        .field("tolerance", sample.tolerance);
    print!("{}", report.render());
    Ok(0)
}

fn cmd_eval(args: &SpecArgs, x: &str, tol: f64) -> Outcome {
    let (sys, _) = load(args)?;
    let y = with_system!(&sys, |s| {
        require_valid(s)?;
        evaluate_f(s, &parse_scalar(x)?, tol)?
    });
    println!("{y:?}");
    Ok(0)
}

fn gap_rows<S: Scalar>(v: &WspVerdict<S>) -> Vec<Vec<String>> {
    v.gap_by_depth
        .iter()
        .map(|g| {
            let (j, i, m) = g.minimizer.as_ref().map_or(("-".into(), "-".into(), "-".into()), |e| {
                (e.j_word.to_string(), e.i_word.to_string(), e.map2.to_string())
            });
            vec![g.depth.to_string(), format!("{:?}", g.delta), j, i, m]
        })
        .collect()
}

fn report_verdict<S: Scalar>(report: &mut RunReport, label: &str, v: &WspVerdict<S>) {
    let status = match v.status {
        WspStatus::NoWitnessUpToDepth => "no-witness-up-to-depth",
        WspStatus::WitnessFound => "witness-found",
    };
    report.field(&format!("{label}.status"), status);
    report.field(&format!("{label}.delta_star"), format!("{:?}", v.delta_star()));
    report.field(&format!("{label}.words_materialized"), v.words_materialized);
    report.field(&format!("{label}.coincidences"), v.coincidence_count);
    for (j, i) in v.coincidences.iter().take(8) {
        report.field(&format!("{label}.coincidence"), format!("{j} = {i}"));
    }
    if v.straight_line_warning {
        report.field(&format!("{label}.warning"), "the graph is a straight segment; planar and projected verdicts need not agree");
    }
    report.table(&format!("{label}.gap_by_depth"), &["depth", "delta", "j", "i", "map"], &gap_rows(v));
}

fn cmd_wsp(args: &SpecArgs, depth: usize, tol: f64, mode: Mode, budget: u128) -> Outcome {
    let (sys, input) = load(args)?;
    let opts = WspOptions { word_budget: budget };
    let mut report = RunReport::new("wsp", &input);
    report.field("depth", depth).field("tol", tol).field("budget", budget);
    let mut witness = false;
    with_system!(&sys, |s| {
        require_valid(s)?;
        if matches!(mode, Mode::One | Mode::Both) {
            let v = wsp_check_1d(s, depth, tol, &opts)?;
            witness |= v.status == WspStatus::WitnessFound;
            report_verdict(&mut report, "1d", &v);
        }
        if matches!(mode, Mode::Two | Mode::Both) {
            let v = wsp_check_2d(s, depth, tol, &opts)?;
            witness |= v.status == WspStatus::WitnessFound;
            report_verdict(&mut report, "2d", &v);
        }
    });
    print!("{}", report.render());
    Ok(if witness { EXIT_WITNESS } else { 0 })
}

fn cmd_orbit(args: &SpecArgs, gi: &str, gj: &str, eps: Option<f64>, out: Option<&Path>) -> Outcome {
    let (sys, input) = load(args)?;
    let (gi, gj) = (Word::parse(gi)?, Word::parse(gj)?);
    let mut report = RunReport::new("orbit", &input);
    let csv = with_system!(&sys, |s| {
        require_valid(s)?;
        let el = FamilyElement::from_words(s, gj.clone(), gi.clone())?;
        let trace = match eps {
            Some(e) => epsilon_net(s, &el.map2, e)?,
            None => epsilon_net_auto(s, &el.map2)?,
        };
        report
            .field("g", &el.map2)
            .field("eps", format!("{:?}", trace.eps))
            .field("delta", format!("{:?}", trace.delta))
            .field("crossing", trace.crossing)
            .field("covering_distance", format!("{:?}", trace.covering_distance));
        orbit_csv(&trace)
    });
    match out {
        Some(path) => {
            write(path, &csv)?;
            print!("{}", report.render());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn classify_with<S: Scalar + FromStrScalar>(v: &[&str; 9], steps: usize, report: &mut RunReport) -> Result<(), Failure> {
    let n: Vec<S> = v.iter().map(|t| parse_scalar::<S>(t)).collect::<Result<_, _>>()?;
    let g = Affine2::new(n[0].clone(), n[1].clone(), n[2].clone(), n[3].clone(), n[4].clone());
    let origin = (n[5].clone(), n[6].clone());
    let model = classify_orbit_curve(&g, origin.clone(), (n[7].clone(), n[8].clone()))?;
    let trace = OrbitTrace::within(&g, origin, (&n[7], &n[8]), steps);
    report.field("kind", model.kind);
    report.field("A", format!("{:?}", model.a));
    report.field("B", format!("{:?}", model.b));
    if let Some(c) = model.c {
        report.field("C", format!("{c:?}"));
    }
    if let Some(k) = model.k {
        report.field("K", format!("{k:?}"));
    }
    if let Some(c) = model.singularity() {
        report.field("singularity", format!("{c:?}"));
    }
    if let Some((a, b)) = &model.exact_parabola {
        report.field("A_exact", a).field("B_exact", b);
    }
    if model.near_case_boundary {
        report.field("warning", "case decided by a floating threshold; classification near a case boundary is ill-posed");
    }
    report.field("normalized_frame", "X = (x - x0)/(b - a), Y = y - y0");
    report.field("curve", model.statement_form());
    report.field("iterates_checked", trace.crossing);
    report.field("oracle_residual", format!("{:?}", verify_orbit_on_curve(&trace, &model)));
    Ok(())
}

fn cmd_classify(v: [&str; 9], steps: usize) -> Outcome {
    let input = v.join(" ");
    let mut report = RunReport::new("classify", input.as_bytes());
    if v.iter().any(|t| is_decimal(t)) {
        classify_with::<f64>(&v, steps, &mut report)?;
    } else {
        classify_with::<Rational>(&v, steps, &mut report)?;
    }
    print!("{}", report.render());
    Ok(0)
}

fn cmd_figure(param: &str, depth: usize, out: &Path) -> Outcome {
    let a = Rational::from_str(param).map_err(|_| fail(format!("parameter must be an exact fraction, got {param:?}")))?;
    write(out, &figure1_svg(&a, depth)?)?;
    let sys = fif_core::examples::four_map(a)?;
    let mut report = RunReport::new("example-figure1", param.as_bytes());
    for x in ["0", "1/5", "7/15", "8/15", "4/5", "1"] {
        let (p, _) = graph_point(&sys, &Rational::from_str(x).unwrap())?;
        report.field("marked", format!("({},{})", p.0, p.1));
    }
    print!("{}", report.render());
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { spec, tol } => cmd_validate(&spec, tol),
        Command::Render { spec, depth, out, svg } => cmd_render(&spec, depth, &out, svg.as_deref()),
        Command::Eval { spec, x, tol } => cmd_eval(&spec, &x, tol),
        Command::Wsp { spec, depth, tol, mode, budget } => cmd_wsp(&spec, depth, tol, mode, budget),
        Command::Orbit { spec, gi, gj, eps, out } => cmd_orbit(&spec, &gi, &gj, eps, out.as_deref()),
        Command::Classify { p, q, r, h, s, x0, y0, a, b, steps } => {
            cmd_classify([&p, &q, &r, &h, &s, &x0, &y0, &a, &b], steps)
        }
        Command::ExampleFigure1 { param, depth, out } => cmd_figure(&param, depth, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
