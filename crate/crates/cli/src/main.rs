//! `radial-toeplitz`: eigenvalues, averages, Berezin transforms and
//! boundedness checks for radial measures, written as CSV or JSON lines.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 numerical non-convergence.

mod report;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use radial_toeplitz::berezin::{self, BerezinMethod, PolarGrid};
use radial_toeplitz::carleson::{self, GridConfig};
use radial_toeplitz::oracle::{self, diagonal_report};
use radial_toeplitz::output::{
    header_comment, write_berezin_csv, write_gamma_csv, write_kappa_csv,
};
use radial_toeplitz::spectral::{self, SpectralMethod};
use radial_toeplitz::{acceptance, dsl, Error, Execution, QuadratureConfig, RadialMeasure};

#[derive(Parser, Debug)]
#[command(
    name = "radial-toeplitz",
    version,
    about = "Radial Toeplitz operators on the Bergman space"
)]
struct Cli {
    /// Run sweeps on one thread instead of the worker pool.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct MeasureArg {
    /// Measure description, e.g. "2*dirac(0.5) - 0.5i*lebesgue".
    #[arg(long)]
    measure: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues γ(n), n = 0..=n-max, as CSV.
    Gamma {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = GammaChoice::Moments)]
        method: GammaChoice,
    },
    /// Average function κ(r) on a grid, as CSV.
    Kappa {
        #[command(flatten)]
        measure: MeasureArg,
        /// `uniform:M` (r = i/M, i < M) or `geometric:J` (r = 1 - 2^-j, j <= J).
        #[arg(long, default_value = "uniform:256")]
        grid: String,
    },
    /// Berezin transform β(a) on a grid, as CSV.
    Berezin {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, value_enum, default_value_t = BerezinChoice::Direct)]
        method: BerezinChoice,
        /// Comma-separated points in [0, 1); defaults to 0, 0.05, ..., 0.95, 0.99.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a_grid: Option<Vec<f64>>,
    },
    /// Boundedness report with the sampled norm chain.
    Check {
        #[command(flatten)]
        measure: MeasureArg,
        #[command(flatten)]
        grids: GridArgs,
        #[arg(long)]
        json: bool,
    },
    /// Lipschitz modulus of γ in the logarithmic metric.
    Lipschitz {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        grids: GridArgs,
        #[arg(long)]
        json: bool,
    },
    /// Truncated matrix of the operator, compared with diag(γ).
    Oracle {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = PathChoice::Exact)]
        path: PathChoice,
        /// Angular trapezoid nodes; defaults to 2*dim + 2.
        #[arg(long)]
        nodes: Option<usize>,
        /// Write the matrix as CSV to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Largest n sampled for γ.
    #[arg(long = "horizon", default_value_t = 4096)]
    horizon: u64,
    /// Uniform κ samples on [0, 1).
    #[arg(long, default_value_t = 256)]
    uniform: usize,
    /// Levels of the ladder r = 1 - 2^-j.
    #[arg(long, default_value_t = 40)]
    levels: u32,
    /// Berezin grid; defaults to 0, 0.05, ..., 0.95, 0.99.
    #[arg(long, value_delimiter = ',')]
    a_grid: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GammaChoice {
    Moments,
    Distribution,
    Averages,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BerezinChoice {
    Direct,
    Series,
    Averages,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathChoice {
    Exact,
    Quadrature,
}

/// Failure of a command, carrying its exit code.
enum Failure {
    Core(Error, Option<String>),
    Usage(String),
    Io(io::Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e, None)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

/// Runs the driver on `argv` (including the program name) and returns the exit code.
fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = dispatch(cli.command, exec, out, err);
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Core(e, source)) => {
            match (&e, source) {
                (Error::Parse(diags), Some(src)) => {
                    let _ = writeln!(err, "error: invalid measure");
                    let _ = writeln!(err, "{}", dsl::render_diagnostics(diags, &src));
                }
                _ => {
                    let _ = writeln!(err, "error: {e}");
                }
            }
            e.exit_code()
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            1
        }
    }
}

fn measure_of(arg: &MeasureArg) -> Result<RadialMeasure, Failure> {
    dsl::parse_measure(&arg.measure).map_err(|e| Failure::Core(e, Some(arg.measure.clone())))
}

/// Header value, quoted when it contains anything beyond a plain token.
fn quoted(s: &str) -> String {
    if !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "._:-".contains(c))
    {
        s.to_string()
    } else {
        serde_json::to_string(s).expect("strings serialize")
    }
}

fn list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn grid_config(args: &GridArgs, exec: Execution) -> Result<GridConfig, Failure> {
    if args.levels > 52 {
        return Err(Failure::Usage(format!(
            "--levels must be at most 52, got {}",
            args.levels
        )));
    }
    if args.uniform == 0 {
        return Err(Failure::Usage("--uniform must be positive".into()));
    }
    let mut grids = GridConfig {
        horizon: args.horizon,
        uniform: args.uniform,
        geometric_levels: args.levels,
        exec,
        ..GridConfig::default()
    };
    if let Some(a) = &args.a_grid {
        grids.a_grid = a.clone();
    }
    Ok(grids)
}

fn grid_header(grids: &GridConfig) -> Vec<(&'static str, String)> {
    vec![
        ("horizon", grids.horizon.to_string()),
        ("uniform", grids.uniform.to_string()),
        ("levels", grids.geometric_levels.to_string()),
        ("a-grid", list(&grids.a_grid)),
    ]
}

fn kappa_points(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "--grid expects uniform:M or geometric:J, got {spec:?}"
        ))
    };
    let (kind, count) = spec.split_once(':').ok_or_else(bad)?;
    let count: u32 = count.parse().map_err(|_| bad())?;
    match kind {
        "uniform" if count > 0 => Ok((0..count).map(|i| i as f64 / count as f64).collect()),
        "geometric" if count <= 52 => {
            Ok((0..=count).map(|j| 1.0 - 2f64.powi(-(j as i32))).collect())
        }
        "geometric" => Err(Failure::Usage(format!(
            "geometric grids stop at J = 52, got {count}"
        ))),
        _ => Err(bad()),
    }
}

fn dispatch(
    command: Command,
    exec: Execution,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let cfg = QuadratureConfig::default();
    match command {
        Command::Gamma {
            measure,
            n_max,
            method,
        } => {
            let eta = measure_of(&measure)?;
            let (methods, with_method): (Vec<SpectralMethod>, bool) = match method {
                GammaChoice::Moments => (vec![SpectralMethod::Moments], false),
                GammaChoice::Distribution => (vec![SpectralMethod::Distribution], false),
                GammaChoice::Averages => (vec![SpectralMethod::Averages], false),
                GammaChoice::All => (SpectralMethod::ALL.to_vec(), true),
            };
            let seqs = methods
                .iter()
                .map(|&m| spectral::gamma_range(&eta, 0..=n_max, m, &cfg, exec))
                .collect::<Result<Vec<_>, _>>()?;
            let header = header_comment(&[
                ("command", "gamma".into()),
                ("measure", quoted(&eta.to_string())),
                ("n-max", n_max.to_string()),
                ("method", format!("{method:?}").to_lowercase()),
            ]);
            write_gamma_csv(out, &header, &seqs, with_method)?;
        }
        Command::Kappa { measure, grid } => {
            let eta = measure_of(&measure)?;
            let points = kappa_points(&grid)?;
            let rows = points
                .iter()
                .map(|&r| spectral::kappa(&eta, r).map(|k| (r, k)))
                .collect::<Result<Vec<_>, _>>()?;
            let header = header_comment(&[
                ("command", "kappa".into()),
                ("measure", quoted(&eta.to_string())),
                ("grid", quoted(&grid)),
            ]);
            write_kappa_csv(out, &header, &rows)?;
        }
        Command::Berezin {
            measure,
            method,
            a_grid,
        } => {
            let eta = measure_of(&measure)?;
            let grid = a_grid.unwrap_or_else(berezin::default_a_grid);
            let (methods, with_method): (Vec<BerezinMethod>, bool) = match method {
                BerezinChoice::Direct => (vec![BerezinMethod::Direct], false),
                BerezinChoice::Series => (vec![BerezinMethod::Series], false),
                BerezinChoice::Averages => (vec![BerezinMethod::Averages], false),
                BerezinChoice::All => (BerezinMethod::ALL.to_vec(), true),
            };
            let profiles = methods
                .iter()
                .map(|&m| berezin::beta_profile(&eta, &grid, m, &cfg, exec))
                .collect::<Result<Vec<_>, _>>()?;
            let header = header_comment(&[
                ("command", "berezin".into()),
                ("measure", quoted(&eta.to_string())),
                ("method", format!("{method:?}").to_lowercase()),
                ("a-grid", list(&grid)),
            ]);
            write_berezin_csv(out, &header, &profiles, with_method)?;
        }
        Command::Check {
            measure,
            grids,
            json,
        } => {
            let eta = measure_of(&measure)?;
            let grids = grid_config(&grids, exec)?;
            let analysis = carleson::carleson_report(&eta, &grids)?;
            if json {
                report::check_json(out, &analysis)?;
            } else {
                report::check_text(out, &analysis, &grid_header(&grids))?;
            }
            if !analysis.chain_ok(1e-7) {
                return Err(Failure::Verification("sampled norm chain violated".into()));
            }
        }
        Command::Lipschitz {
            measure,
            n_max,
            grids,
            json,
        } => {
            let eta = measure_of(&measure)?;
            let grids = grid_config(&grids, exec)?;
            let r = carleson::lipschitz_report(&eta, n_max, &grids)?;
            if json {
                report::lipschitz_json(out, &r)?;
            } else {
                report::lipschitz_text(out, &r)?;
            }
            if r.applicable && !r.pass {
                return Err(Failure::Verification("Lipschitz bound violated".into()));
            }
        }
        Command::Oracle {
            measure,
            dim,
            path,
            nodes,
            dump,
            json,
        } => {
            let eta = measure_of(&measure)?;
            if dim == 0 {
                return Err(Failure::Usage("--dim must be positive".into()));
            }
            let op = match path {
                PathChoice::Exact => oracle::gram_matrix(&eta, dim, nodes.unwrap_or(2 * dim + 2))?,
                PathChoice::Quadrature => {
                    let grid = PolarGrid {
                        angular: nodes,
                        ..PolarGrid::default()
                    };
                    oracle::gram_matrix_quadrature(&eta, dim, &grid, exec)?
                }
            };
            let gammas = spectral::gamma_range(
                &eta,
                0..=dim as u64 - 1,
                SpectralMethod::Moments,
                &cfg,
                exec,
            )?;
            let tol = match path {
                PathChoice::Exact => 1e-12,
                PathChoice::Quadrature => 1e-8,
            };
            let diag = diagonal_report(&op, &gammas, tol, tol)?;
            let rotation = oracle::rotation_commutation(&op, Complex64::from_polar(1.0, 1.0), 4);
            if let Some(file) = &dump {
                let header = header_comment(&[
                    ("command", "oracle".into()),
                    ("measure", quoted(&eta.to_string())),
                    ("dim", dim.to_string()),
                    ("path", format!("{path:?}").to_lowercase()),
                    ("nodes", op.angular_nodes.to_string()),
                ]);
                fs::write(file, header + &op.to_csv())?;
            }
            if json {
                report::oracle_json(out, &diag, &op, rotation)?;
            } else {
                report::oracle_text(out, &diag, &op, rotation)?;
            }
            if !diag.pass {
                return Err(Failure::Verification(
                    "truncated matrix is not diag(γ) within tolerance".into(),
                ));
            }
        }
        Command::Selftest => {
            let outcomes = acceptance::run_all();
            for o in &outcomes {
                writeln!(out, "{o}")?;
            }
            let failed: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| o.id.to_string())
                .collect();
            writeln!(
                out,
                "{} of {} criteria passed",
                outcomes.len() - failed.len(),
                outcomes.len()
            )?;
            if !failed.is_empty() {
                writeln!(err, "failing criteria: {}", failed.join(", "))?;
                return Err(Failure::Verification(format!(
                    "{} criteria failed",
                    failed.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = run(std::env::args_os(), &mut out, &mut stderr.lock());
    ExitCode::from(code as u8)
}
