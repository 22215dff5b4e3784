//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a solve does
//! not converge or breaks down numerically.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::collocation::collocation_points;
use crate::error::Error;
use crate::expr::{parse, Var};
use crate::metrics::{convergence_study, problem_error_report, uniform_grid, ErrorKind};
use crate::orthopoly::{Family, DEFAULT_GEGENBAUER_ALPHA};
use crate::sbvp::{builtin, from_json, Problem};
use crate::solver::{solve, Approach, InitialGuess, Solution, SolverConfig};
use crate::wavelet::{project, reconstruct, ProjectionWeight, WaveletBasis};

/// Points used by `approximate`.
pub const APPROXIMATION_POINTS: usize = 65;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(
                Error::Conditioning { .. } | Error::SingularMatrix { .. } | Error::PointEval { .. },
            ) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sbvp",
    version,
    about = "Wavelet collocation for singular boundary value problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one problem with one family and approach.
    Solve(SolveArgs),
    /// Tabulate the error over a range of resolution levels.
    Convergence(ConvergenceArgs),
    /// Run all five families with both approaches side by side.
    Compare(CompareArgs),
    /// Project a function of t onto the basis and report the reconstruction.
    Approximate(ApproximateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Chebyshev,
    Hermite,
    Laguerre,
    Legendre,
    Gegenbauer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ApproachArg {
    Qa,
    Newton,
}

impl From<ApproachArg> for Approach {
    fn from(a: ApproachArg) -> Approach {
        match a {
            ApproachArg::Qa => Approach::Quasilinearization,
            ApproachArg::Newton => Approach::Newton,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct ProblemArgs {
    /// Builtin problem: example1..example4 or manufactured.
    #[arg(long)]
    pub problem: Option<String>,
    /// JSON problem description.
    #[arg(long)]
    pub problem_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolverArgs {
    /// Stopping tolerance on the max-norm update.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Initial iterate: one constant, or one value per collocation point.
    /// Defaults to the guess stored with a builtin problem.
    #[arg(long, allow_hyphen_values = true)]
    pub guess: Option<String>,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Output file; stdout when absent or "-".
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = FamilyArg::Legendre)]
    pub family: FamilyArg,
    /// Gegenbauer parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = ApproachArg::Newton)]
    pub approach: ApproachArg,
    /// Resolution level; the basis has 2^J functions.
    #[arg(long = "J", default_value_t = 3)]
    pub level: u32,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma list, grid:N, or collocation. Defaults to 0, 1/16, 3/16, ..., 15/16, 1.
    #[arg(long)]
    pub points: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = FamilyArg::Legendre)]
    pub family: FamilyArg,
    /// Gegenbauer parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = ApproachArg::Newton)]
    pub approach: ApproachArg,
    #[arg(long = "J-min", default_value_t = 1)]
    pub level_min: u32,
    #[arg(long = "J-max", default_value_t = 4)]
    pub level_max: u32,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Gegenbauer parameter for the Ge columns.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long = "J", default_value_t = 3)]
    pub level: u32,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma list, grid:N, or collocation. Defaults to 0, 1/16, 3/16, ..., 15/16, 1.
    #[arg(long)]
    pub points: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ApproximateArgs {
    /// Function of t.
    #[arg(long)]
    pub function: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Legendre)]
    pub family: FamilyArg,
    /// Gegenbauer parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long = "J", default_value_t = 3)]
    pub level: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Formats like C's `%.9g`, with `nan` for NaN.
pub fn fmt_g(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `0, 1/16, 3/16, ..., 15/16, 1`.
pub fn default_points() -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend((0..8).map(|i| (2 * i + 1) as f64 / 16.0));
    pts.push(1.0);
    pts
}

/// Parses `--points`.
pub fn parse_points(text: Option<&str>, level: u32) -> Result<Vec<f64>, CliError> {
    let Some(text) = text else {
        return Ok(default_points());
    };
    let text = text.trim();
    if text == "collocation" {
        return Ok(collocation_points(1usize << level.min(30))?
            .points()
            .to_vec());
    }
    if let Some(n) = text.strip_prefix("grid:") {
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad grid size in --points {text}")))?;
        if n == 0 {
            return Err(CliError::Usage("--points grid:N needs N >= 1".into()));
        }
        return Ok(uniform_grid(n));
    }
    let pts = parse_list(text, "--points")?;
    if let Some(t) = pts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(CliError::Usage(format!("point {t} lies outside [0, 1]")));
    }
    Ok(pts)
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad number {s:?} in {flag}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("non-finite value in {flag}")))
            }
        })
        .collect()
}

fn load_problem(args: &ProblemArgs) -> Result<Problem, CliError> {
    match (&args.problem, &args.problem_file) {
        (Some(name), None) => Ok(builtin(name)?),
        (None, Some(path)) => Ok(from_json(&std::fs::read(path)?)?),
        _ => Err(CliError::Usage(
            "give exactly one of --problem, --problem-file".into(),
        )),
    }
}

fn family_of(arg: FamilyArg, alpha: Option<f64>) -> Result<Family, CliError> {
    let family = match (arg, alpha) {
        (FamilyArg::Gegenbauer, a) => Family::Gegenbauer {
            alpha: a.unwrap_or(DEFAULT_GEGENBAUER_ALPHA),
        },
        (_, Some(_)) => {
            return Err(CliError::Usage(
                "--alpha only applies to --family gegenbauer".into(),
            ))
        }
        (FamilyArg::Chebyshev, None) => Family::Chebyshev,
        (FamilyArg::Hermite, None) => Family::Hermite,
        (FamilyArg::Laguerre, None) => Family::Laguerre,
        (FamilyArg::Legendre, None) => Family::Legendre,
    };
    family.validate()?;
    Ok(family)
}

fn solver_config(
    args: &SolverArgs,
    approach: Approach,
    problem: &Problem,
) -> Result<SolverConfig, CliError> {
    let initial_guess = match &args.guess {
        Some(text) => {
            let values = parse_list(text, "--guess")?;
            Some(if values.len() == 1 {
                InitialGuess::Constant(values[0])
            } else {
                InitialGuess::Values(values)
            })
        }
        None => problem.suggested_guess.map(InitialGuess::Constant),
    };
    let config = SolverConfig {
        approach,
        max_iter: args.max_iter,
        tol: args.tol,
        initial_guess,
    };
    config.validate()?;
    Ok(config)
}

fn approach_of(s: &Solution) -> &'static str {
    match s.approach {
        Approach::Newton => "newton",
        Approach::Quasilinearization => "qa",
    }
}

/// Right-aligned columns separated by two spaces.
fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn render_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn render(format: Format, header: &[String], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => render_csv(header, rows),
        _ => render_table(header, rows),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

#[derive(Serialize)]
struct SolveRow {
    t: f64,
    y: f64,
    exact: Option<f64>,
    abs_error: Option<f64>,
}

#[derive(Serialize)]
struct SolveDoc {
    problem: String,
    method: String,
    family: String,
    approach: &'static str,
    #[serde(rename = "J")]
    level: u32,
    #[serde(rename = "M")]
    size: usize,
    converged: bool,
    iterations: usize,
    residual_norm: f64,
    rows: Vec<SolveRow>,
    linf: Option<f64>,
    l2: Option<f64>,
}

fn cmd_solve(args: &SolveArgs) -> Result<(String, i32), CliError> {
    let problem = load_problem(&args.problem)?;
    let family = family_of(args.family, args.alpha)?;
    let config = solver_config(&args.solver, args.approach.into(), &problem)?;
    let points = parse_points(args.points.as_deref(), args.level)?;
    let basis = WaveletBasis::new(family, args.level)?;
    let sol = solve(&problem, &basis, &config)?;
    let report = if problem.has_exact() {
        Some(problem_error_report(&sol, &problem, &points)?)
    } else {
        None
    };
    let rows: Vec<SolveRow> = points
        .iter()
        .enumerate()
        .map(|(i, &t)| SolveRow {
            t,
            y: sol.y(t),
            exact: report.as_ref().map(|r| r.pointwise[i].exact),
            abs_error: report.as_ref().map(|r| r.pointwise[i].abs_error),
        })
        .collect();
    let code = if sol.converged { 0 } else { 2 };
    let doc = SolveDoc {
        problem: problem.name.clone(),
        method: sol.method_label(),
        family: family.to_string(),
        approach: approach_of(&sol),
        level: args.level,
        size: basis.size(),
        converged: sol.converged,
        iterations: sol.iterations,
        residual_norm: sol.residual_norm,
        rows,
        linf: report.as_ref().map(|r| r.linf),
        l2: report.as_ref().map(|r| r.l2),
    };
    if args.output.format == Format::Json {
        return Ok((to_json(&doc), code));
    }
    let opt = |v: Option<f64>| fmt_g(v.unwrap_or(f64::NAN));
    let header = strings(&["t", "y", "exact", "abs_error"]);
    let cells: Vec<Vec<String>> = doc
        .rows
        .iter()
        .map(|r| vec![fmt_g(r.t), fmt_g(r.y), opt(r.exact), opt(r.abs_error)])
        .collect();
    let mut out = String::new();
    if args.output.format == Format::Table {
        let _ = writeln!(
            out,
            "problem {}  method {}  J {}  M {}",
            doc.problem, doc.method, doc.level, doc.size
        );
        let _ = writeln!(
            out,
            "converged {}  iterations {}  residual {}",
            doc.converged,
            doc.iterations,
            fmt_g(doc.residual_norm)
        );
    }
    out.push_str(&render(args.output.format, &header, &cells));
    if args.output.format == Format::Table {
        if let (Some(linf), Some(l2)) = (doc.linf, doc.l2) {
            let _ = writeln!(out, "linf {}  l2 {}", fmt_g(linf), fmt_g(l2));
        }
    }
    Ok((out, code))
}

#[derive(Serialize)]
struct ConvergenceDoc {
    problem: String,
    family: String,
    approach: &'static str,
    error: &'static str,
    rows: Vec<ConvergenceDocRow>,
}

#[derive(Serialize)]
struct ConvergenceDocRow {
    #[serde(rename = "J")]
    level: u32,
    #[serde(rename = "M")]
    size: usize,
    linf: f64,
    l2: f64,
    iterations: usize,
    converged: bool,
}

fn cmd_convergence(args: &ConvergenceArgs) -> Result<(String, i32), CliError> {
    let problem = load_problem(&args.problem)?;
    let family = family_of(args.family, args.alpha)?;
    let config = solver_config(&args.solver, args.approach.into(), &problem)?;
    let study = convergence_study(&problem, family, args.level_min..=args.level_max, &config)?;
    let code = if study.rows.iter().all(|r| r.converged) {
        0
    } else {
        2
    };
    let (err, err_l2) = match study.kind {
        ErrorKind::Exact => ("linf", "l2"),
        ErrorKind::SuccessiveDifference => ("succ_diff", "succ_diff_l2"),
    };
    if args.output.format == Format::Json {
        let doc = ConvergenceDoc {
            problem: problem.name.clone(),
            family: family.to_string(),
            approach: match config.approach {
                Approach::Newton => "newton",
                Approach::Quasilinearization => "qa",
            },
            error: err,
            rows: study
                .rows
                .iter()
                .map(|r| ConvergenceDocRow {
                    level: r.level,
                    size: r.size,
                    linf: r.linf,
                    l2: r.l2,
                    iterations: r.iterations,
                    converged: r.converged,
                })
                .collect(),
        };
        return Ok((to_json(&doc), code));
    }
    let header = strings(&["J", "M", err, err_l2, "iterations"]);
    let cells: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            vec![
                r.level.to_string(),
                r.size.to_string(),
                fmt_g(r.linf),
                fmt_g(r.l2),
                r.iterations.to_string(),
            ]
        })
        .collect();
    Ok((render(args.output.format, &header, &cells), code))
}

#[derive(Serialize)]
struct CompareMethod {
    method: String,
    converged: bool,
    iterations: Option<usize>,
    residual_norm: Option<f64>,
    error: Option<String>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct CompareDoc {
    problem: String,
    #[serde(rename = "J")]
    level: u32,
    t: Vec<f64>,
    methods: Vec<CompareMethod>,
    exact: Option<Vec<f64>>,
}

fn cmd_compare(args: &CompareArgs, stderr: &mut dyn Write) -> Result<(String, i32), CliError> {
    let problem = load_problem(&args.problem)?;
    let alpha = args.alpha.unwrap_or(DEFAULT_GEGENBAUER_ALPHA);
    Family::Gegenbauer { alpha }.validate()?;
    let points = parse_points(args.points.as_deref(), args.level)?;
    let newton = solver_config(&args.solver, Approach::Newton, &problem)?;
    let qa = solver_config(&args.solver, Approach::Quasilinearization, &problem)?;
    let jobs: Vec<(Family, &SolverConfig)> = [&newton, &qa]
        .into_iter()
        .flat_map(|cfg| {
            Family::table_order(alpha)
                .into_iter()
                .map(move |f| (f, cfg))
        })
        .collect();
    let level = args.level;
    let problem_ref = &problem;
    let results: Vec<Result<Solution, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(family, cfg)| {
                scope.spawn(move || {
                    let basis = WaveletBasis::new(family, level)?;
                    solve(problem_ref, &basis, cfg)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let mut code = 0;
    let mut methods = Vec::new();
    for ((family, cfg), result) in jobs.iter().zip(results) {
        let label = format!("{}{}", family.abbrev(), cfg.approach.suffix());
        let nan = vec![f64::NAN; points.len()];
        let method = match result {
            Ok(sol) if sol.converged => CompareMethod {
                method: label,
                converged: true,
                iterations: Some(sol.iterations),
                residual_norm: Some(sol.residual_norm),
                error: None,
                values: points.iter().map(|&t| sol.y(t)).collect(),
            },
            Ok(sol) => {
                let _ = writeln!(
                    stderr,
                    "{label}: no convergence after {} iterations",
                    sol.iterations
                );
                code = 2;
                CompareMethod {
                    method: label,
                    converged: false,
                    iterations: Some(sol.iterations),
                    residual_norm: Some(sol.residual_norm),
                    error: Some("not converged".into()),
                    values: nan,
                }
            }
            Err(e @ Error::ResolutionTooHigh { .. }) => return Err(e.into()),
            Err(e) => {
                let _ = writeln!(stderr, "{label}: {e}");
                code = 2;
                CompareMethod {
                    method: label,
                    converged: false,
                    iterations: None,
                    residual_norm: None,
                    error: Some(e.to_string()),
                    values: nan,
                }
            }
        };
        methods.push(method);
    }
    let exact = if problem.has_exact() {
        Some(
            points
                .iter()
                .map(|&t| problem.eval_exact(t))
                .collect::<Result<Vec<f64>, Error>>()?,
        )
    } else {
        None
    };
    let doc = CompareDoc {
        problem: problem.name.clone(),
        level,
        t: points,
        methods,
        exact,
    };
    if args.output.format == Format::Json {
        return Ok((to_json(&doc), code));
    }
    let mut header = vec!["t".to_string()];
    header.extend(doc.methods.iter().map(|m| m.method.clone()));
    if doc.exact.is_some() {
        header.push("Exact".into());
    }
    let cells: Vec<Vec<String>> = doc
        .t
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![fmt_g(t)];
            row.extend(doc.methods.iter().map(|m| fmt_g(m.values[i])));
            if let Some(ex) = &doc.exact {
                row.push(fmt_g(ex[i]));
            }
            row
        })
        .collect();
    Ok((render(args.output.format, &header, &cells), code))
}

#[derive(Serialize)]
struct ApproxRow {
    t: f64,
    f: f64,
    reconstruction: f64,
    error: f64,
}

#[derive(Serialize)]
struct ApproxDoc {
    function: String,
    family: String,
    #[serde(rename = "J")]
    level: u32,
    coefficients: Vec<f64>,
    rows: Vec<ApproxRow>,
    linf: f64,
}

fn cmd_approximate(args: &ApproximateArgs) -> Result<(String, i32), CliError> {
    let expr = parse(&args.function).map_err(Error::from)?;
    if expr.depends_on(Var::Y) {
        return Err(CliError::Usage("--function must depend on t only".into()));
    }
    let family = family_of(args.family, args.alpha)?;
    let basis = WaveletBasis::new(family, args.level)?;
    let f = |t: f64| expr.eval(t, 0.0).unwrap_or(f64::NAN);
    let c = project(f, &basis, ProjectionWeight::Family)?;
    let mut rows = Vec::new();
    for t in uniform_grid(APPROXIMATION_POINTS) {
        let fv = expr.eval(t, 0.0).map_err(|source| Error::PointEval {
            index: rows.len(),
            t,
            source,
        })?;
        let r = reconstruct(&c, &basis, t)?;
        rows.push(ApproxRow {
            t,
            f: fv,
            reconstruction: r,
            error: (r - fv).abs(),
        });
    }
    let linf = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let doc = ApproxDoc {
        function: args.function.clone(),
        family: family.to_string(),
        level: args.level,
        coefficients: c.0,
        rows,
        linf,
    };
    if args.output.format == Format::Json {
        return Ok((to_json(&doc), 0));
    }
    let header = strings(&["t", "f", "reconstruction", "error"]);
    let cells: Vec<Vec<String>> = doc
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_g(r.t),
                fmt_g(r.f),
                fmt_g(r.reconstruction),
                fmt_g(r.error),
            ]
        })
        .collect();
    let mut out = render(args.output.format, &header, &cells);
    if args.output.format == Format::Table {
        let _ = writeln!(out, "linf {}", fmt_g(doc.linf));
    }
    Ok((out, 0))
}

fn output_path(cmd: &Command) -> Option<&PathBuf> {
    let out = match cmd {
        Command::Solve(a) => &a.output,
        Command::Convergence(a) => &a.output,
        Command::Compare(a) => &a.output,
        Command::Approximate(a) => &a.output,
    };
    out.output.as_ref().filter(|p| p.as_os_str() != "-")
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<(String, i32), CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Compare(a) => cmd_compare(a, stderr),
        Command::Approximate(a) => cmd_approximate(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    let result = execute(&cli, stderr).and_then(|(text, code)| {
        match output_path(&cli.command) {
            Some(path) => std::fs::write(path, text.as_bytes())?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => {
            if code == 2 {
                let _ = writeln!(stderr, "error: solver did not converge");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("sbvp").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.0625), "0.0625");
        assert_eq!(fmt_g(0.9941916161234), "0.994191616");
        assert_eq!(fmt_g(-123456.7891234), "-123456.789");
        assert_eq!(fmt_g(2.49669e-9), "2.49669e-09");
        assert_eq!(fmt_g(1.5e12), "1.5e+12");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.00001), "1e-05");
        assert_eq!(fmt_g(999999999.6), "1e+09");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn points_parsing() {
        assert_eq!(default_points().len(), 10);
        assert_eq!(
            parse_points(Some("grid:3"), 2).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(parse_points(Some("0.25, 0.5"), 2).unwrap(), vec![0.25, 0.5]);
        assert_eq!(
            parse_points(Some("collocation"), 1).unwrap(),
            vec![0.25, 0.75]
        );
        assert!(parse_points(Some("grid:x"), 2).is_err());
        assert!(parse_points(Some("0.5,abc"), 2).is_err());
        assert!(parse_points(Some("1.5"), 2).is_err());
    }

    #[test]
    fn alpha_needs_gegenbauer() {
        assert!(family_of(FamilyArg::Legendre, Some(1.5)).is_err());
        assert_eq!(
            family_of(FamilyArg::Gegenbauer, Some(1.5)).unwrap(),
            Family::Gegenbauer { alpha: 1.5 }
        );
        assert!(family_of(FamilyArg::Gegenbauer, Some(-0.7)).is_err());
        let (code, _, err) = run_capture(&["solve", "--problem", "example1", "--alpha", "2"]);
        assert_eq!(code, 1);
        assert!(err.contains("--alpha"));
    }

    #[test]
    fn solve_reports_table_value() {
        let (code, out, _) = run_capture(&[
            "solve",
            "--problem",
            "example1",
            "--family",
            "hermite",
            "--J",
            "3",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        let row = out.lines().find(|l| l.starts_with("0.1875,")).unwrap();
        let y: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((y - 0.994191616).abs() <= 5e-7);
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_capture(&["solve", "--problem", "nosuch"]);
        assert_eq!(code, 1);
        assert!(err.contains("unknown builtin"), "{err}");
        assert_eq!(run_capture(&["solve"]).0, 1);
        assert_eq!(
            run_capture(&["solve", "--problem", "example1", "--J", "7"]).0,
            1
        );
        assert_eq!(run_capture(&["frobnicate"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn non_convergence_exits_two() {
        let (code, out, _) = run_capture(&[
            "solve",
            "--problem",
            "example1",
            "--max-iter",
            "1",
            "--format",
            "json",
        ]);
        assert_eq!(code, 2);
        assert!(out.contains("\"converged\": false"));
    }
}
