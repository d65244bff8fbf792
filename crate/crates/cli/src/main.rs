use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gptlab::io::{self, SetupFile};
use gptlab::report::{self, TensorOptions, SCHEMA};
use gptlab::scalar::{set_float_tolerance, Rational};
use gptlab::tensor::{DEFAULT_BUDGET, DEFAULT_RAY_LIMIT, DEFAULT_VERTEX_LIMIT};
use gptlab::{catalog, with_space, Error};
use serde_json::json;

/// Bit symmetry, self-duality and maximal tensor products of polytopal state spaces.
#[derive(Parser, Debug)]
#[command(name = "gptlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Zero threshold for floating-point spaces.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tolerance, global = true)]
    tolerance: f64,

    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    jobs: Option<u32>,

    /// Largest composite dimension dA·dB for tensor products.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    budget: usize,

    /// Composites with at least this many candidate vertices skip the direct
    /// bit-symmetry check.
    #[arg(long, default_value_t = DEFAULT_VERTEX_LIMIT, global = true)]
    vertex_limit: usize,

    /// Cap on intermediate rays during tensor-product vertex enumeration.
    #[arg(long, default_value_t = DEFAULT_RAY_LIMIT, global = true)]
    ray_limit: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symmetry group, bit symmetry, inner product and self-duality of one space.
    Analyze {
        /// Catalog entry (`square`, `ngon:N`, `simplex:N`, `cube:N`) or file path.
        spec: String,
        /// Re-validate a saved JSON report against the space instead of analyzing.
        #[arg(long, value_name = "REPORT")]
        recheck: Option<PathBuf>,
    },
    /// Maximal tensor product of two spaces.
    Tensor {
        a: String,
        b: String,
        /// List the class of every composite vertex.
        #[arg(long)]
        classify: bool,
        /// Maximal CHSH value over the composite.
        #[arg(long)]
        chsh: bool,
        /// Check that entanglement rules out bit symmetry of the composite.
        #[arg(long = "check-theorem2")]
        check_theorem2: bool,
        /// CHSH measurements file (defaults to the fiducial measurements).
        #[arg(long, value_name = "FILE")]
        setup: Option<PathBuf>,
    },
    /// Decide whether two pure states are perfectly distinguishable.
    Distinguish { spec: String, i: usize, j: usize },
    /// List catalog entries, or print one entry in the state-space file format.
    Catalog {
        #[arg(long, value_name = "SPEC")]
        export: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let eps: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if eps.is_finite() && eps > 0.0 {
        Ok(eps)
    } else {
        Err("tolerance must be a positive finite number".into())
    }
}

fn emit(format: Format, text: String, value: impl serde::Serialize) {
    let body = match format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("reports serialize") + "\n",
    };
    write_stdout(&body);
}

/// Writes to stdout, treating a closed pipe as success.
fn write_stdout(body: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(body.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("gptlab: {e}");
        }
    }
}

fn run(cli: Cli) -> gptlab::Result<()> {
    match cli.command {
        Command::Analyze {
            spec,
            recheck: None,
        } => {
            let space = catalog::resolve(&spec)?;
            let r = report::analyze_any(&space)?;
            emit(cli.format, report::render_text(&r), &r);
        }
        Command::Analyze {
            spec,
            recheck: Some(path),
        } => {
            let space = catalog::resolve(&spec)?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let saved: report::AnalysisReport =
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    location: format!(
                        "{} line {}, column {}",
                        path.display(),
                        e.line(),
                        e.column()
                    ),
                    message: e.to_string(),
                })?;
            let problems = report::recheck_any(&saved, &space)?;
            if !problems.is_empty() {
                return Err(Error::Validation {
                    invariant: "report",
                    detail: problems.join("; "),
                });
            }
            emit(
                cli.format,
                format!("{}: every certificate re-checks\n", path.display()),
                json!({"schema": SCHEMA, "space": saved.space, "rechecked": true}),
            );
        }
        Command::Tensor {
            a,
            b,
            classify,
            chsh,
            check_theorem2,
            setup,
        } => {
            let a = catalog::resolve(&a)?;
            let b = catalog::resolve(&b)?;
            let file = setup.as_deref().map(SetupFile::load).transpose()?;
            let exact = a.is_exact() && b.is_exact();
            let opts = TensorOptions {
                budget: cli.budget,
                ray_limit: cli.ray_limit,
                vertex_limit: cli.vertex_limit,
                classify,
                chsh,
                theorem2: check_theorem2,
                setup: match &file {
                    Some(f) if !exact => Some(f.to_setup::<f64>()?),
                    _ => None,
                },
            };
            let setup_exact = match &file {
                Some(f) if exact => Some(f.to_setup::<Rational>()?),
                _ => None,
            };
            let r = report::tensor_report_any(&a, &b, &opts, setup_exact)?;
            emit(cli.format, report::render_tensor_text(&r), &r);
        }
        Command::Distinguish { spec, i, j } => {
            let space = catalog::resolve(&spec)?;
            let r = with_space!(&space, s => report::distinguish_report(s, i, j))?;
            emit(cli.format, report::render_distinguish_text(&r), &r);
        }
        Command::Catalog { export: Some(spec) } => {
            let space = catalog::resolve(&spec)?;
            let text = with_space!(&space, s => io::to_json_string(s));
            write_stdout(&(text + "\n"));
        }
        Command::Catalog { export: None } => {
            let entries = catalog::entries();
            let text: String = entries
                .iter()
                .map(|(spec, about)| format!("{spec:<12} {about}\n"))
                .collect();
            let listing: Vec<_> = entries
                .iter()
                .map(|(spec, about)| json!({"spec": spec, "description": about}))
                .collect();
            emit(
                cli.format,
                text,
                json!({"schema": SCHEMA, "entries": listing}),
            );
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    set_float_tolerance(cli.tolerance);
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .expect("thread pool is configured once");
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gptlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
