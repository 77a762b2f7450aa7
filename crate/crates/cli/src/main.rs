//! `pb`: evaluate, scan, verify and compare Pólya-Bernstein operators.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or I/O error.
//! Every failure writes one JSON object `{"error": {...}}` to stderr.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand};
use polya_bernstein::operators::DEFAULT_OMEGA_RESOLUTION;
use polya_bernstein::report::{write_curve_csv, SCHEMA_VERSION};
use polya_bernstein::verify::DEFAULT_C_MAX;
use polya_bernstein::*;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "pb",
    version,
    about = "Pólya-urn Bernstein operators: evaluation and numerical verification"
)]
struct Cli {
    /// Cap on worker threads (default: available cores).
    #[arg(long, global = true, env = "PB_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an operator at one point or over a grid (CSV `x,fx,opx,error`).
    Eval(EvalArgs),
    /// Sup scans over an n range, written as a JSON report.
    Scan(ScanArgs),
    /// Run verification sweeps and write a JSON bundle.
    Verify(VerifyArgs),
    /// Side-by-side error profiles of B_n and R_n (CSV `x,err_bernstein,err_rn`).
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct FnArgs {
    /// Builtin test function: one, linear, square, abs-mid, sin-pi, sawtooth, sqrt.
    #[arg(long = "fn", conflicts_with = "fn_csv")]
    func: Option<String>,
    /// Sampled function table with header `x,fx`.
    #[arg(long)]
    fn_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// bernstein, rn or polya.
    #[arg(long)]
    op: String,
    #[command(flatten)]
    function: FnArgs,
    #[arg(long)]
    n: u32,
    /// Single evaluation point; omit for grid mode.
    #[arg(long)]
    x: Option<f64>,
    /// Grid size in grid mode.
    #[arg(long, default_value_t = 10001)]
    points: usize,
    /// Step profile for `--op polya`: zero, rn or const:<c>.
    #[arg(long)]
    c_mode: Option<String>,
    /// CSV destination in grid mode (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "target", required = true, multiple = false, args = ["sikkema", "popoviciu", "bracket"])]
struct ScanArgs {
    /// sup of 1 + sqrt(n)(F(x) + F(1-x)).
    #[arg(long)]
    sikkema: bool,
    /// sup |Op(f;x) - f(x)| / ω(f, n^{-1/2}).
    #[arg(long)]
    popoviciu: bool,
    /// sup of the bracket bound 1 + Σ ]sqrt(n)|x-k/n|[ p_k.
    #[arg(long)]
    bracket: bool,
    /// Inclusive range `lo..hi` or a single value.
    #[arg(long, default_value = "2..30")]
    n: String,
    /// zero or rn (sikkema and bracket scans).
    #[arg(long)]
    c_mode: Option<String>,
    #[command(flatten)]
    function: FnArgs,
    /// bernstein or rn (popoviciu scans).
    #[arg(long, default_value = "rn")]
    op: String,
    #[arg(long, default_value_t = 10001)]
    points: usize,
    /// Disable breakpoint refinement of the sample grid.
    #[arg(long)]
    no_refine: bool,
    /// Resolution of the modulus of continuity (popoviciu scans).
    #[arg(long, default_value_t = DEFAULT_OMEGA_RESOLUTION)]
    omega_resolution: usize,
    /// JSON destination (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-point curve `n,x,value` (sikkema scans).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "checks", required = true, multiple = true, args = ["lemma", "kozniewska", "n6", "dominance", "conjecture"])]
struct VerifyArgs {
    /// Rising-factorial inequality sweep.
    #[arg(long)]
    lemma: bool,
    /// Closed form of the truncated first moment against the direct sum.
    #[arg(long)]
    kozniewska: bool,
    /// Piecewise bounds for n = 6.
    #[arg(long)]
    n6: bool,
    /// F_n^c dominated by its bracket form.
    #[arg(long)]
    dominance: bool,
    /// Monotonicity of the interleaved ratio in c (findings do not fail).
    #[arg(long)]
    conjecture: bool,
    #[arg(long, default_value = "2..40")]
    n: String,
    #[arg(long, default_value_t = 10001)]
    points: usize,
    #[arg(long)]
    no_refine: bool,
    #[arg(long, default_value_t = 21)]
    c_samples: usize,
    /// Upper end of the c grid for the conjecture scan.
    #[arg(long, default_value_t = DEFAULT_C_MAX)]
    c_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    function: FnArgs,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 10001)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code and stderr payload.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    field: Option<String>,
    message: String,
}

impl Failure {
    fn usage(field: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "invalid-argument",
            field: Some(field.into()),
            message: message.into(),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Failure {
            code: 2,
            kind: "io",
            field: None,
            message: format!("{}: {err}", path.display()),
        }
    }

    fn emit(&self) {
        let obj =
            json!({"error": {"kind": self.kind, "field": self.field, "message": self.message}});
        eprintln!("{obj}");
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (kind, field) = match &e {
            Error::InvalidArgument { field, .. } => {
                ("invalid-argument", Some((*field).to_string()))
            }
            Error::Table(_) => ("table", Some("fn-csv".to_string())),
            _ => ("domain", None),
        };
        Failure {
            code: 2,
            kind,
            field,
            message,
        }
    }
}

type CliResult = std::result::Result<u8, Failure>;

fn clap_failure(err: &clap::Error) -> Failure {
    let field = match err.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => Some(
            s.trim_start_matches('-')
                .split([' ', '='])
                .next()
                .unwrap_or_default()
                .to_string(),
        ),
        _ => None,
    };
    let rendered = err.render().to_string();
    let message = rendered
        .lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ");
    Failure {
        code: 2,
        kind: "usage",
        field,
        message: message.trim().to_string(),
    }
}

fn load_function(args: &FnArgs) -> std::result::Result<FunctionSpec, Failure> {
    match (&args.func, &args.fn_csv) {
        (Some(name), None) => Ok(name.parse::<Builtin>()?.into()),
        (None, Some(path)) => Ok(SampledTable::from_csv_path(path)?.into()),
        _ => Err(Failure::usage("fn", "give exactly one of --fn or --fn-csv")),
    }
}

fn parse_range(s: &str) -> std::result::Result<NRange, Failure> {
    s.parse::<NRange>().map_err(|e| match e {
        Error::InvalidArgument { reason, .. } => Failure::usage("n", reason),
        other => other.into(),
    })
}

/// Output sink: a buffered file or stdout.
fn sink(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_all(path: Option<&Path>, body: &str) -> std::result::Result<(), Failure> {
    let name = path.unwrap_or(Path::new("<stdout>"));
    let mut out = sink(path)?;
    out.write_all(body.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Failure::io(name, e))
}

fn grid(points: usize, no_refine: bool) -> GridSpec {
    GridSpec {
        refine_breakpoints: !no_refine,
        ..GridSpec::with_points(points)
    }
}

/// Single values are printed to 15 significant digits, which hides the
/// last-ulp noise of the sums.
fn display_value(v: f64) -> f64 {
    format!("{v:.14e}").parse().unwrap_or(v)
}

fn cmd_eval(a: &EvalArgs) -> CliResult {
    let f = load_function(&a.function)?;
    let profile = match (a.op.as_str(), &a.c_mode) {
        ("polya", mode) => Some(mode.as_deref().unwrap_or("zero").parse::<CProfile>()?),
        ("bernstein" | "rn", None) => None,
        ("bernstein" | "rn", Some(_)) => {
            return Err(Failure::usage("c-mode", "only applies to --op polya"))
        }
        (other, _) => {
            return Err(Failure::usage(
                "op",
                format!("`{other}` is not bernstein, rn or polya"),
            ))
        }
    };
    let apply = |x: f64| -> Result<f64> {
        match (a.op.as_str(), profile) {
            (_, Some(p)) => polya_operator_eval(&f, a.n, x, p),
            ("bernstein", _) => bernstein_eval(&f, a.n, x),
            _ => r_n_eval(&f, a.n, x),
        }
    };
    if let Some(x) = a.x {
        let v = display_value(apply(x)?);
        write_all(a.out.as_deref(), &format!("{v}\n"))?;
        return Ok(0);
    }
    let spec = GridSpec::uniform(a.points);
    spec.validate()?;
    let mut body = String::from("x,fx,opx,error\n");
    for x in spec.uniform_points() {
        let fx = f.eval(x);
        let opx = apply(x)?;
        body.push_str(&format!("{x},{fx},{opx},{}\n", (opx - fx).abs()));
    }
    write_all(a.out.as_deref(), &body)?;
    Ok(0)
}

fn cmd_scan(a: &ScanArgs) -> CliResult {
    let range = parse_range(&a.n)?;
    let spec = grid(a.points, a.no_refine);
    let report = if a.popoviciu {
        if a.c_mode.is_some() {
            return Err(Failure::usage("c-mode", "does not apply to --popoviciu"));
        }
        if a.csv.is_some() {
            return Err(Failure::usage(
                "csv",
                "curves are available for --sikkema only",
            ));
        }
        let f = load_function(&a.function)?;
        let op = a.op.parse::<OperatorKind>()?;
        popoviciu_scan(&f, range, &spec, op, a.omega_resolution)?
    } else {
        if a.function.func.is_some() || a.function.fn_csv.is_some() {
            return Err(Failure::usage("fn", "only applies to --popoviciu"));
        }
        let mode = a.c_mode.as_deref().unwrap_or("zero").parse::<CMode>()?;
        if a.bracket {
            if a.csv.is_some() {
                return Err(Failure::usage(
                    "csv",
                    "curves are available for --sikkema only",
                ));
            }
            scan_bracket_sup(range, mode, &spec)?
        } else {
            let report = scan_sup(range, mode, &spec)?;
            if let Some(path) = &a.csv {
                let rows = sikkema_curve(range, mode, &spec)?;
                let mut out = sink(Some(path))?;
                write_curve_csv(&mut out, &rows)
                    .and_then(|()| out.flush())
                    .map_err(|e| Failure::io(path, e))?;
            }
            report
        }
    };
    write_all(a.out.as_deref(), &format!("{}\n", report.to_json()))?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> CliResult {
    let range = parse_range(&a.n)?;
    let spec = grid(a.points, a.no_refine);
    let mut reports = Vec::new();
    let mut passed = true;
    let mut push = |r: VerificationReport, counts: bool| -> std::result::Result<(), Failure> {
        passed &= r.passed || !counts;
        reports.push(serde_json::to_value(&r).map_err(|e| Failure {
            code: 2,
            kind: "internal",
            field: None,
            message: e.to_string(),
        })?);
        Ok(())
    };
    if a.lemma {
        push(verify_lemma_claim(range, &spec, a.c_samples)?, true)?;
    }
    if a.kozniewska {
        push(
            verify_kozniewska(range, &spec, CSweep::Uniform(a.c_samples))?,
            true,
        )?;
    }
    if a.n6 {
        push(n6_case_check(&spec)?, true)?;
    }
    if a.dominance {
        push(verify_dominance(range, &spec)?, true)?;
    }
    if a.conjecture {
        push(conjecture_scan(range, &spec, a.c_samples, a.c_max)?, false)?;
    }
    let bundle = json!({"schema": SCHEMA_VERSION, "passed": passed, "reports": reports});
    let body = serde_json::to_string_pretty(&bundle).expect("JSON values always serialize");
    write_all(a.out.as_deref(), &format!("{body}\n"))?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_compare(a: &CompareArgs) -> CliResult {
    let f = load_function(&a.function)?;
    let spec = GridSpec::uniform(a.points);
    spec.validate()?;
    let mut body = String::from("x,err_bernstein,err_rn\n");
    for x in spec.uniform_points() {
        let fx = f.eval(x);
        let eb = (bernstein_eval(&f, a.n, x)? - fx).abs();
        let er = (r_n_eval(&f, a.n, x)? - fx).abs();
        body.push_str(&format!("{x},{eb},{er}\n"));
    }
    write_all(a.out.as_deref(), &body)?;
    Ok(0)
}

fn run(cli: &Cli) -> CliResult {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::usage("workers", "must be at least 1"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Failure {
        code: 2,
        kind: "internal",
        field: Some("workers".into()),
        message: e.to_string(),
    })?;
    pool.install(|| match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compare(a) => cmd_compare(a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            clap_failure(&e).emit();
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            f.emit();
            ExitCode::from(f.code)
        }
    }
}
