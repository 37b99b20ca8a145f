//! `lagpot`: batch front end for the kernel library.
//!
//! Five subcommands cover the library surface: `eval` samples a potential
//! kernel on a grid or at a single point, `envelope-check` calibrates a
//! two-sided envelope and verifies its ratio constant against a ceiling,
//! `region` classifies a `(p, q)` pair for `L^p -> L^q` boundedness,
//! `figure` exports the exact boundary polygon of a boundedness region,
//! and `experiments` runs the reproducible experiment suites.
//!
//! Results stream as RFC 4180 CSV (default) or as a JSON document
//! `{meta, data}` whose `meta` echoes the parsed configuration.  Output is
//! deterministic for a fixed command line.  Exit codes: 0 on success,
//! 1 when a verification check fails, 2 on usage or domain errors.
//! `LPL_THREADS` caps the size of the worker pool.

mod sink;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lagpot::lp_lq_regions::{
    bounded_global_conv, bounded_local_conv, bounded_local_hermite, figure_data, parse_rational,
};
use lagpot::potential_kernels::{
    calibrate_envelope, envelope_conv, envelope_dunkl, envelope_hermite_osc,
    exp_je_decomposition, potential_kernel,
};
use lagpot::quadrature::QuadConfig;
use lagpot::{
    Axis, EnvelopeConstants, EnvelopeFamily, FigureSetting, GridSpec, KernelKind, Params,
    RatioReport, RegionPoint,
};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use sink::{csv_document, emit, json_document, relative_gap, RunConfig};

#[derive(Parser)]
#[command(
    name = "lagpot",
    version,
    about = "Heat and potential kernels of Laguerre and Dunkl-Laguerre expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a potential kernel on a grid or at a single point.
    Eval(EvalArgs),
    /// Calibrate a two-sided envelope and check its ratio constant.
    EnvelopeCheck(EnvelopeArgs),
    /// Classify a (p, q) pair for L^p -> L^q boundedness.
    Region(RegionArgs),
    /// Export the exact boundary of a boundedness region.
    Figure(FigureArgs),
    /// Run a reproducible experiment suite.
    Experiments(ExperimentsArgs),
}

/// Kernel selector shared by the evaluation-style subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Half-line kernel against the measure y^(2 alpha + 1) dy.
    Conv,
    /// Half-line kernel against Lebesgue measure.
    Hermite,
    /// Line kernel against the weight |y|^(2 alpha + 1).
    Dunkl,
    /// Auxiliary half-line kernel without the Gamma(sigma) normalisation.
    DunklAux,
}

impl KindArg {
    fn kernel(self) -> KernelKind {
        match self {
            KindArg::Conv => KernelKind::Convolution,
            KindArg::Hermite => KernelKind::HermiteType,
            KindArg::Dunkl => KernelKind::Dunkl,
            KindArg::DunklAux => KernelKind::DunklAux,
        }
    }

    fn setting(self) -> Result<FigureSetting, String> {
        match self {
            KindArg::Conv => Ok(FigureSetting::Conv),
            KindArg::Hermite => Ok(FigureSetting::HermiteType),
            KindArg::Dunkl => Ok(FigureSetting::Dunkl),
            KindArg::DunklAux => Err(
                "boundedness regions are classified for conv, hermite, and dunkl kernels, \
                 not dunkl-aux"
                    .into(),
            ),
        }
    }

    fn name(self) -> &'static str {
        match self {
            KindArg::Conv => "conv",
            KindArg::Hermite => "hermite",
            KindArg::Dunkl => "dunkl",
            KindArg::DunklAux => "dunkl-aux",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    fn name(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Args)]
struct OutputOpts {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Kernel to evaluate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Order of the underlying expansion, alpha > -1.
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Subordination exponent, sigma > 0.
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    /// Sampling axis `log:lo:hi:n` or `lin:lo:hi:n`, used for both
    /// coordinates unless --grid-y is given.
    #[arg(long, value_parser = parse_axis)]
    grid: Option<Axis>,
    /// Separate sampling axis for the second coordinate.
    #[arg(long, value_parser = parse_axis)]
    grid_y: Option<Axis>,
    /// First coordinate of a single evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Second coordinate of a single evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// Kernel whose envelope is calibrated.
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    /// Sampling axis `log:lo:hi:n` or `lin:lo:hi:n` for the first
    /// coordinate (and the second unless --grid-y is given).  Offset the
    /// two axes to keep the grid clear of the diagonal when sigma <= 1/2.
    #[arg(long, value_parser = parse_axis)]
    grid: Axis,
    #[arg(long, value_parser = parse_axis)]
    grid_y: Option<Axis>,
    /// Envelope family; derived from --kind when omitted.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Evaluate the envelope shape at this sigma instead of --sigma; the
    /// raw ratio spread then diagnoses a deliberately mismatched exponent.
    #[arg(long, allow_hyphen_values = true)]
    envelope_sigma: Option<f64>,
    /// Largest acceptable ratio constant.
    #[arg(long, default_value_t = 100.0)]
    ceiling: f64,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Two-region envelope of the conv kernel.
    Conv,
    /// Four-case envelope of the dunkl kernel (alpha > -1/2).
    Dunkl,
    /// Oscillator-form envelope of the dunkl kernel at alpha = -1/2.
    HermiteOsc,
    /// Sandwich by exponential, Gamma-type, and Gaussian-tail terms.
    JeSplit,
}

impl FamilyArg {
    fn family(self) -> EnvelopeFamily {
        match self {
            FamilyArg::Conv => EnvelopeFamily::Conv,
            FamilyArg::Dunkl => EnvelopeFamily::Dunkl,
            FamilyArg::HermiteOsc => EnvelopeFamily::HermiteOsc,
            FamilyArg::JeSplit => EnvelopeFamily::JeSplit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PartArg {
    Full,
    Local,
    Global,
}

#[derive(Args)]
struct RegionArgs {
    /// Operator setting to classify.
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    /// Source exponent: a rational like 2, 4/3, 1.25, or inf.
    #[arg(long)]
    p: String,
    /// Target exponent: a rational like 2, 4/3, 1.25, or inf.
    #[arg(long)]
    q: String,
    /// Which piece of the kernel the classification concerns.
    #[arg(long, value_enum, default_value_t = PartArg::Full)]
    part: PartArg,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct FigureArgs {
    /// Operator setting whose region boundary is exported.
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    /// Collinear subdivisions per polygon edge, at least 2.
    #[arg(long, default_value_t = 2)]
    resolution: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    /// Cross-kernel identities at random points of (0, 5)^2.
    Identities,
    /// Global row-norm power laws at x = 8..64.
    RowNorms,
    /// Travelling-bump image growth at n = 8..64.
    BumpGrowth,
    /// Log-edge profile with finite norm and unbounded image norm.
    LogEdge,
    /// Negative-value scan of the line kernel.
    Negativity,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Identities => "identities",
            SuiteArg::RowNorms => "row-norms",
            SuiteArg::BumpGrowth => "bump-growth",
            SuiteArg::LogEdge => "log-edge",
            SuiteArg::Negativity => "negativity",
        }
    }
}

#[derive(Args)]
struct ExperimentsArgs {
    /// Which suite to run.
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Kernel the suite drives, where it has a choice.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Source exponent: a rational like 2, 10/9, 1.25, or inf.
    #[arg(long)]
    p: Option<String>,
    /// Target exponent: a rational like 5, 4/3, 1.25, or inf.
    #[arg(long)]
    q: Option<String>,
    /// Scan box for the negativity suite, as `lin:0:half_width:density`.
    #[arg(long, value_parser = parse_axis)]
    grid: Option<Axis>,
    /// Relative quadrature tolerance; expensive suites floor it at their
    /// own desk-scale values.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for the suites that sample random points.
    #[arg(long, default_value_t = 0x5EED)]
    seed: u64,
    #[command(flatten)]
    output: OutputOpts,
}

fn parse_axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(format!(
            "grid spec must be log:lo:hi:n or lin:lo:hi:n, got {text:?}"
        ));
    }
    let lo: f64 = parts[1]
        .parse()
        .map_err(|e| format!("bad grid lower bound {:?}: {e}", parts[1]))?;
    let hi: f64 = parts[2]
        .parse()
        .map_err(|e| format!("bad grid upper bound {:?}: {e}", parts[2]))?;
    let n: usize = parts[3]
        .parse()
        .map_err(|e| format!("bad grid count {:?}: {e}", parts[3]))?;
    if n < 1 {
        return Err(format!("grid count must be at least 1, got {n}"));
    }
    if !(hi >= lo) {
        return Err(format!("grid needs lo <= hi, got {lo} > {hi}"));
    }
    match parts[0] {
        "log" => {
            if !(lo > 0.0) {
                return Err(format!("log grids need lo > 0, got {lo}"));
            }
            Ok(Axis::Log { lo, hi, n })
        }
        "lin" => Ok(Axis::Lin { lo, hi, n }),
        other => Err(format!("grid scale must be log or lin, got {other:?}")),
    }
}

/// Parses a Lebesgue exponent in [1, inf] and returns its exact inverse.
fn parse_exponent(name: &str, text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(BigRational::zero());
    }
    let r = parse_rational(t).map_err(|e| e.to_string())?;
    if r < BigRational::one() {
        return Err(format!("{name} must be at least 1 (or inf), got {t}"));
    }
    Ok(r.recip())
}

fn init_threads() -> Result<(), String> {
    match std::env::var("LPL_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("LPL_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("LPL_THREADS must be a positive integer, got 0".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("could not configure the thread pool: {e}"))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("LPL_THREADS is not valid unicode: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Eval(args) => cmd_eval(&args),
        Command::EnvelopeCheck(args) => cmd_envelope_check(&args),
        Command::Region(args) => cmd_region(&args),
        Command::Figure(args) => cmd_figure(&args),
        Command::Experiments(args) => cmd_experiments(&args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[derive(Serialize)]
struct EvalRow {
    x: f64,
    y: f64,
    sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_abs: Option<f64>,
    divergent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    achieved_tol: Option<f64>,
}

fn cmd_eval(args: &EvalArgs) -> Result<bool, String> {
    let params = Params::new(args.alpha, args.sigma).map_err(|e| e.to_string())?;
    if !(args.tol > 0.0) || !args.tol.is_finite() {
        return Err(format!("--tol must be a positive number, got {}", args.tol));
    }
    let kind = args.kind.kernel();
    let (points, grid, point) = match (args.x, args.y, &args.grid) {
        (Some(x), Some(y), None) => (vec![(x, y)], None, Some((x, y))),
        (None, None, Some(axis)) => {
            let grid = GridSpec {
                x: *axis,
                y: args.grid_y.unwrap_or(*axis),
            };
            (grid.points(), Some(grid), None)
        }
        _ => {
            return Err(
                "pass either --grid (with optional --grid-y) or both --x and --y".into(),
            )
        }
    };
    let quad = QuadConfig {
        rel_tol: args.tol,
        ..QuadConfig::default()
    };
    let probe = QuadConfig {
        rel_tol: (args.tol * 1e-2).max(1e-12),
        ..QuadConfig::default()
    };
    let rows: Result<Vec<EvalRow>, lagpot::Error> = points
        .par_iter()
        .map(|&(x, y)| {
            let v = potential_kernel(kind, &params, x, y, &quad)?;
            if v.is_divergent() {
                return Ok(EvalRow {
                    x,
                    y,
                    sign: v.sign(),
                    log_abs: None,
                    divergent: true,
                    achieved_tol: Some(0.0),
                });
            }
            let check = potential_kernel(kind, &params, x, y, &probe)?;
            let gap = relative_gap(&v, &check);
            Ok(EvalRow {
                x,
                y,
                sign: v.sign(),
                log_abs: v.log_abs().is_finite().then(|| v.log_abs()),
                divergent: false,
                achieved_tol: gap.is_finite().then_some(gap),
            })
        })
        .collect();
    let rows = rows.map_err(|e| e.to_string())?;

    let config = RunConfig {
        subcommand: "eval".into(),
        kind: Some(args.kind.name().into()),
        alpha: Some(args.alpha),
        sigma: Some(args.sigma),
        grid,
        point,
        rel_tol: Some(args.tol),
        format: args.output.format.name().into(),
        out: args.output.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let text = match args.output.format {
        FormatArg::Csv => {
            let records: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        format!("{}", r.x),
                        format!("{}", r.y),
                        format!("{}", r.sign),
                        if r.divergent {
                            "inf".into()
                        } else {
                            format!("{}", r.log_abs.unwrap_or(f64::NEG_INFINITY))
                        },
                        format!("{}", r.achieved_tol.unwrap_or(f64::INFINITY)),
                    ]
                })
                .collect();
            csv_document(
                &[
                    "x",
                    "y",
                    "sign",
                    "log_abs (natural log)",
                    "achieved_tol (relative)",
                ],
                &records,
            )?
        }
        FormatArg::Json => json_document(&config, json!({ "rows": rows }))?,
    };
    emit(&args.output.out, &text)?;
    Ok(true)
}

fn default_family(kind: KindArg, alpha: f64) -> Result<EnvelopeFamily, String> {
    match kind {
        KindArg::Conv => Ok(EnvelopeFamily::Conv),
        KindArg::DunklAux => Ok(EnvelopeFamily::JeSplit),
        KindArg::Dunkl if alpha > -0.5 => Ok(EnvelopeFamily::Dunkl),
        KindArg::Dunkl if alpha == -0.5 => Ok(EnvelopeFamily::HermiteOsc),
        KindArg::Dunkl => Err(format!(
            "no positive envelope describes the dunkl kernel at alpha = {alpha} < -1/2; \
             it takes negative values there"
        )),
        KindArg::Hermite => Err(
            "no envelope family describes the hermite kernel directly; calibrate conv and \
             carry the weight (xy)^(alpha + 1/2)"
                .into(),
        ),
    }
}

/// Raw ratio spread of the kernel against an envelope shape evaluated at a
/// deliberately different sigma; the spread is reported as a symmetric
/// ratio constant and grows without bound under grid refinement whenever
/// the shape exponent is wrong.
fn mismatch_report(
    kind: KernelKind,
    params: &Params,
    shape_params: &Params,
    grid: &GridSpec,
    family: EnvelopeFamily,
) -> Result<RatioReport, String> {
    let unit = EnvelopeConstants::new(1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let pts = grid.points();
    if pts.is_empty() {
        return Err("calibration grid is empty".into());
    }
    let quad = QuadConfig::default();
    let ratios: Result<Vec<f64>, lagpot::Error> = pts
        .par_iter()
        .map(|&(x, y)| {
            let k = potential_kernel(kind, params, x, y, &quad)?;
            if k.sign() != 1 || k.is_divergent() {
                return Err(lagpot::Error::Singular(format!(
                    "kernel is not positive and finite at ({x}, {y})"
                )));
            }
            let shape = match family {
                EnvelopeFamily::Conv => envelope_conv(shape_params, x, y, &unit)?.1.log_abs(),
                EnvelopeFamily::Dunkl => envelope_dunkl(shape_params, x, y, &unit)?.1.log_abs(),
                EnvelopeFamily::HermiteOsc => {
                    envelope_hermite_osc(shape_params.sigma, x, y, &unit)?
                        .1
                        .log_abs()
                }
                EnvelopeFamily::JeSplit => {
                    let (lo, up) = exp_je_decomposition(kind, shape_params, x, y)?;
                    0.5 * (lo.log_abs() + up.log_abs())
                }
            };
            Ok(k.log_abs() - shape)
        })
        .collect();
    let ratios = ratios.map_err(|e| e.to_string())?;
    let (mut min_r, mut max_r) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = (pts[0], pts[0]);
    for (i, &r) in ratios.iter().enumerate() {
        if r < min_r {
            min_r = r;
            argmin = pts[i];
        }
        if r > max_r {
            max_r = r;
            argmax = pts[i];
        }
    }
    let c_ratio = (0.5 * (max_r - min_r)).exp().max(1.0);
    Ok(RatioReport {
        min_ratio: min_r,
        max_ratio: max_r,
        argmin,
        argmax,
        fitted: EnvelopeConstants::new(c_ratio, 1.0, 1.0).map_err(|e| e.to_string())?,
        grid: *grid,
    })
}

fn cmd_envelope_check(args: &EnvelopeArgs) -> Result<bool, String> {
    let params = Params::new(args.alpha, args.sigma).map_err(|e| e.to_string())?;
    if !(args.ceiling >= 1.0) {
        return Err(format!(
            "--ceiling must be at least 1, got {}",
            args.ceiling
        ));
    }
    let kind = args.kind.kernel();
    let family = match args.family {
        Some(f) => f.family(),
        None => default_family(args.kind, args.alpha)?,
    };
    let grid = GridSpec {
        x: args.grid,
        y: args.grid_y.unwrap_or(args.grid),
    };
    let report = match args.envelope_sigma {
        Some(s2) => {
            let shape_params = Params::new(args.alpha, s2).map_err(|e| e.to_string())?;
            mismatch_report(kind, &params, &shape_params, &grid, family)?
        }
        None => calibrate_envelope(kind, &params, &grid, family).map_err(|e| e.to_string())?,
    };
    let pass = report.fitted.c_ratio <= args.ceiling;

    let config = RunConfig {
        subcommand: "envelope-check".into(),
        kind: Some(args.kind.name().into()),
        alpha: Some(args.alpha),
        sigma: Some(args.sigma),
        grid: Some(grid),
        family: Some(format!("{:?}", family)),
        envelope_sigma: args.envelope_sigma,
        ceiling: Some(args.ceiling),
        format: args.output.format.name().into(),
        out: args.output.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let text = match args.output.format {
        FormatArg::Csv => csv_document(
            &[
                "c_ratio",
                "c_lower (exponential rate)",
                "c_upper (exponential rate)",
                "min_log_ratio (natural log)",
                "max_log_ratio (natural log)",
                "argmin_x",
                "argmin_y",
                "argmax_x",
                "argmax_y",
                "pass",
            ],
            &[vec![
                format!("{}", report.fitted.c_ratio),
                format!("{}", report.fitted.c_lower),
                format!("{}", report.fitted.c_upper),
                format!("{}", report.min_ratio),
                format!("{}", report.max_ratio),
                format!("{}", report.argmin.0),
                format!("{}", report.argmin.1),
                format!("{}", report.argmax.0),
                format!("{}", report.argmax.1),
                format!("{}", pass),
            ]],
        )?,
        FormatArg::Json => json_document(
            &config,
            json!({ "report": report, "ceiling": args.ceiling, "pass": pass }),
        )?,
    };
    emit(&args.output.out, &text)?;
    Ok(pass)
}

fn cmd_region(args: &RegionArgs) -> Result<bool, String> {
    Params::new(args.alpha, args.sigma).map_err(|e| e.to_string())?;
    let inv_p = parse_exponent("p", &args.p)?;
    let inv_q = parse_exponent("q", &args.q)?;
    let pt = RegionPoint::new(inv_p, inv_q).map_err(|e| e.to_string())?;
    let verdict = match (args.part, args.kind) {
        (PartArg::Full, _) => {
            let setting = args.kind.setting()?;
            lagpot::lp_lq_regions::bounded_for_setting(setting, args.alpha, args.sigma, &pt)
        }
        (PartArg::Local, KindArg::Conv) => bounded_local_conv(args.alpha, args.sigma, &pt),
        (PartArg::Local, KindArg::Hermite) => bounded_local_hermite(args.alpha, args.sigma, &pt),
        (PartArg::Global, KindArg::Conv) => bounded_global_conv(args.alpha, args.sigma, &pt),
        (part, kind) => {
            return Err(format!(
                "--part {part:?} is not classified for --kind {}; the split classifications \
                 cover local conv, local hermite, and global conv",
                kind.name()
            )
            .to_lowercase())
        }
    }
    .map_err(|e| e.to_string())?;

    let config = RunConfig {
        subcommand: "region".into(),
        kind: Some(args.kind.name().into()),
        alpha: Some(args.alpha),
        sigma: Some(args.sigma),
        p: Some(args.p.clone()),
        q: Some(args.q.clone()),
        part: Some(format!("{:?}", args.part).to_lowercase()),
        format: args.output.format.name().into(),
        out: args.output.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let text = match args.output.format {
        FormatArg::Csv => csv_document(
            &["p", "q", "bounded", "rule", "binding_constraint"],
            &[vec![
                args.p.clone(),
                args.q.clone(),
                format!("{}", verdict.bounded),
                verdict.rule.clone(),
                verdict.binding_constraint.clone(),
            ]],
        )?,
        FormatArg::Json => json_document(
            &config,
            json!({
                "inv_p": pt.inv_p.to_string(),
                "inv_q": pt.inv_q.to_string(),
                "verdict": verdict,
            }),
        )?,
    };
    emit(&args.output.out, &text)?;
    Ok(true)
}

fn cmd_figure(args: &FigureArgs) -> Result<bool, String> {
    let setting = args.kind.setting()?;
    let data =
        figure_data(setting, args.alpha, args.sigma, args.resolution).map_err(|e| e.to_string())?;

    let config = RunConfig {
        subcommand: "figure".into(),
        kind: Some(args.kind.name().into()),
        alpha: Some(args.alpha),
        sigma: Some(args.sigma),
        resolution: Some(args.resolution),
        format: args.output.format.name().into(),
        out: args.output.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let text = match args.output.format {
        FormatArg::Csv => data.to_csv(),
        FormatArg::Json => json_document(&config, json!({ "figure": data }))?,
    };
    emit(&args.output.out, &text)?;
    Ok(true)
}

fn require<T: Copy>(value: Option<T>, flag: &str, suite: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("the {suite} suite needs {flag}"))
}

fn inv_to_f64(inv: &BigRational) -> f64 {
    inv.to_f64().expect("inverse exponents lie in [0, 1]")
}

fn cmd_experiments(args: &ExperimentsArgs) -> Result<bool, String> {
    let suite = args.suite;
    if !(args.tol > 0.0) || !args.tol.is_finite() {
        return Err(format!("--tol must be a positive number, got {}", args.tol));
    }
    let result = match suite {
        SuiteArg::Identities => {
            let sigma = require(args.sigma, "--sigma", "identities")?;
            if let Some(a) = args.alpha {
                if a != -0.5 {
                    return Err(format!(
                        "the identities tie the kernels at alpha = -1/2; got --alpha {a} \
                         (omit the flag or pass -0.5)"
                    ));
                }
            }
            suites::identities(sigma, args.tol, args.seed, 50)?
        }
        SuiteArg::RowNorms => {
            let kind = args.kind.unwrap_or(KindArg::Conv);
            let params = Params::new(
                require(args.alpha, "--alpha", "row-norms")?,
                require(args.sigma, "--sigma", "row-norms")?,
            )
            .map_err(|e| e.to_string())?;
            let p_text = args.p.as_deref().ok_or("the row-norms suite needs --p")?;
            let inv_p = parse_exponent("p", p_text)?;
            if inv_p.is_zero() {
                return Err("the row-norms suite needs a finite p".into());
            }
            suites::row_norms(kind.kernel(), &params, 1.0 / inv_to_f64(&inv_p), args.tol)?
        }
        SuiteArg::BumpGrowth => {
            if matches!(args.kind, Some(k) if k != KindArg::Conv) {
                return Err("the bump-growth benchmark is defined for the conv kernel".into());
            }
            let params = Params::new(
                require(args.alpha, "--alpha", "bump-growth")?,
                require(args.sigma, "--sigma", "bump-growth")?,
            )
            .map_err(|e| e.to_string())?;
            let p_text = args.p.as_deref().ok_or("the bump-growth suite needs --p")?;
            let q_text = args.q.as_deref().ok_or("the bump-growth suite needs --q")?;
            let inv_p = parse_exponent("p", p_text)?;
            let inv_q = parse_exponent("q", q_text)?;
            if inv_p.is_zero() || inv_q.is_zero() {
                return Err("the bump-growth suite needs finite p and q".into());
            }
            suites::bump_growth(&params, inv_to_f64(&inv_p), inv_to_f64(&inv_q), args.tol)?
        }
        SuiteArg::LogEdge => {
            if matches!(args.kind, Some(k) if k != KindArg::Conv) {
                return Err("the log-edge benchmark is defined for the conv kernel".into());
            }
            let params = Params::new(
                require(args.alpha, "--alpha", "log-edge")?,
                require(args.sigma, "--sigma", "log-edge")?,
            )
            .map_err(|e| e.to_string())?;
            let p = match args.p.as_deref() {
                Some(t) => {
                    let inv = parse_exponent("p", t)?;
                    if inv.is_zero() {
                        return Err("the log-edge suite needs a finite p".into());
                    }
                    1.0 / inv_to_f64(&inv)
                }
                None => 1.0 / (2.0 * params.sigma),
            };
            suites::log_edge(&params, p, args.tol)?
        }
        SuiteArg::Negativity => {
            if matches!(args.kind, Some(k) if k != KindArg::Dunkl) {
                return Err("negativity scanning applies to the dunkl kernel".into());
            }
            let params = Params::new(
                require(args.alpha, "--alpha", "negativity")?,
                require(args.sigma, "--sigma", "negativity")?,
            )
            .map_err(|e| e.to_string())?;
            let (half_width, density) = match args.grid {
                None => (20.0, 12),
                Some(Axis::Lin { lo, hi, n }) if lo == 0.0 && hi > 0.0 && n >= 1 => (hi, n),
                Some(other) => {
                    return Err(format!(
                        "the negativity scan box reads lin:0:half_width:density, got {other:?}"
                    ))
                }
            };
            suites::negativity(&params, half_width, density, args.tol)?
        }
    };

    let config = RunConfig {
        subcommand: "experiments".into(),
        suite: Some(suite.name().into()),
        kind: args.kind.map(|k| k.name().into()),
        alpha: args.alpha,
        sigma: args.sigma,
        p: args.p.clone(),
        q: args.q.clone(),
        grid: args.grid.map(GridSpec::square),
        rel_tol: Some(args.tol),
        seed: Some(args.seed),
        format: args.output.format.name().into(),
        out: args.output.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let text = match args.output.format {
        FormatArg::Csv => {
            let records: Vec<Vec<String>> =
                result.rows.iter().map(|r| r.csv_record()).collect();
            csv_document(
                &[
                    "experiment_id",
                    "params (name=value;...)",
                    "value_log (natural log)",
                    "sign",
                    "achieved_tol (relative)",
                ],
                &records,
            )?
        }
        FormatArg::Json => json_document(
            &config,
            json!({
                "rows": result.rows,
                "summary": result.summary,
                "pass": result.pass,
            }),
        )?,
    };
    emit(&args.output.out, &text)?;
    Ok(result.pass)
}
