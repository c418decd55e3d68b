//! Batch verification front end for the `scalarspec` crate: sweeps models,
//! runs the identity, bound, lemma, discrete and centering suites and writes
//! the results as CSV or JSON.

pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scalarspec::model::critical_radius;
use scalarspec::HypersurfaceModel;

pub use config::{MPolicy, SweepConfig};
pub use report::{emit_report, Format, Row, RunReport};
pub use suites::{run_suite, Suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(#[from] UsageError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Umbilical,
    Clifford,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "clifford")]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Dimension of the first Clifford factor.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Radius of the first Clifford factor; the critical radius when omitted.
    #[arg(long)]
    c: Option<f64>,
    /// Normalized scalar curvature of an umbilical model.
    #[arg(long)]
    r: Option<f64>,
}

impl ModelArgs {
    fn model(&self) -> Result<HypersurfaceModel, UsageError> {
        let bad = |e: scalarspec::Error| UsageError(e.to_string());
        match self.family {
            Family::Umbilical => {
                let r = self.r.ok_or_else(|| UsageError("--r is required for umbilical models".into()))?;
                HypersurfaceModel::umbilical(self.n, r).map_err(bad)
            }
            Family::Clifford => {
                let c = match self.c {
                    Some(c) => c,
                    None => critical_radius(self.n, self.m).map_err(bad)?,
                };
                HypersurfaceModel::clifford(self.n, self.m, c).map_err(bad)
            }
        }
    }
}

#[derive(Debug, Args)]
struct Tuning {
    #[arg(long)]
    resolution: Option<usize>,
    /// Centering tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid sizes for the discrete solver (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    grid: Vec<usize>,
    /// JSON sweep configuration; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Tuning {
    fn config(&self) -> Result<SweepConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => SweepConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => SweepConfig::default(),
        };
        if let Some(res) = self.resolution {
            config.resolution = res;
        }
        if let Some(tol) = self.tol {
            config.tolerances.insert("center".into(), tol);
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if !self.grid.is_empty() {
            config.grid_sizes = self.grid.clone();
        }
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Box and Jacobi spectra of one model.
    Spectra {
        #[command(flatten)]
        model: ModelArgs,
        /// Highest harmonic degree included.
        #[arg(long, default_value_t = scalarspec::spectrum::DEFAULT_CUTOFF)]
        cutoff: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalue bounds of one model, and the critical identities for critical Clifford products.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-difference confirmation of lambda_2 for one Clifford product.
    Discrete {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
    },
    /// Centering of the sampled model with constant and tilted weights.
    Center {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
    },
    /// Runs a suite over a parameter sweep.
    Sweep {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Restrict the sweep to one dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Clifford splits to visit (comma separated).
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        /// Scalar curvatures of the umbilical models (comma separated).
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Parser)]
#[command(name = "scalarspec", version, about = "Spectral bound verification for constant scalar curvature hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn timed(suite: &str, work: impl FnOnce() -> Vec<Row>) -> RunReport {
    let start = std::time::Instant::now();
    let rows = work();
    RunReport::new(suite, rows, start.elapsed().as_secs_f64())
}

fn execute(command: Command) -> Result<(RunReport, Output), CliError> {
    Ok(match command {
        Command::Spectra { model, cutoff, output } => {
            let model = model.model()?;
            (timed("spectra", || suites::spectrum_rows(&model, cutoff)), output)
        }
        Command::Verify { model, tuning, output } => {
            let config = tuning.config()?;
            config.validate()?;
            let model = model.model()?;
            let report = timed("verify", || {
                let mut rows = suites::bound_rows(&model, config.tolerance("bounds"));
                if let HypersurfaceModel::Clifford { n, m, .. } = model {
                    if model.geometry().map(|g| (g.r - 1.0).abs() <= scalarspec::bounds::UNIT_SCALAR_TOL).unwrap_or(false) {
                        rows.extend(suites::identity_rows(n, m, config.tolerance("identities")));
                    }
                }
                rows
            });
            (report, output)
        }
        Command::Discrete { model, tuning, output } => {
            let config = tuning.config()?;
            config.validate()?;
            let model = model.model()?;
            let report = timed("discrete", || suites::discrete_rows(&model, &config.grid_sizes, &config));
            (report, output)
        }
        Command::Center { model, tuning, output } => {
            let config = tuning.config()?;
            config.validate()?;
            let model = model.model()?;
            let report = suites::in_pool(|| timed("center", || suites::center_rows(&model, &config)))?;
            (report, output)
        }
        Command::Sweep {
            suite,
            n,
            m,
            r,
            tuning,
            output,
        } => {
            let mut config = tuning.config()?;
            if let Some(n) = n {
                config.n_min = n;
                config.n_max = n;
            }
            if !m.is_empty() {
                config.m_policy = MPolicy::List(m);
            }
            if !r.is_empty() {
                config.r_list = r;
            }
            (run_suite(&config, suite)?, output)
        }
    })
}

/// Parses arguments, runs the command and writes the report. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(cli.command).and_then(|(report, output)| {
        let format = match output.format {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        };
        emit_report(&report, format, output.out.as_deref())?;
        Ok(report)
    });
    match result {
        Ok(report) if report.pass => EXIT_PASS,
        Ok(report) => {
            let failed = report.rows.iter().filter(|r| !r.pass).count();
            eprintln!("{failed} of {} checks failed", report.rows.len());
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("scalarspec: {e}");
            e.exit_code()
        }
    }
}
