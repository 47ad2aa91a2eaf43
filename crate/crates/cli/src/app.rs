//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, FileConfig};
use crate::error::{exit, CliError, CliResult};
use crate::grid::parse_grid;
use crate::manifest::{manifest_path, parse_manifest};
use crate::run::{Command, Run, Variant};
use crate::table::Format;
use crate::verify::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "fracbdi",
    version,
    about = "Time-fractional linear birth-death process with immigration"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Exact equal-rates coefficient table c[n,k] for k <= --order.
    Coeffs(Common),
    /// State probabilities on a time grid.
    Pmf(Common),
    /// Series components p_k(n,t) for n <= --nmax, k <= --order.
    Components(Common),
    /// Mean, second factorial moment and variance on a time grid.
    Moments(Common),
    /// Monte Carlo histogram at a single time.
    Simulate(Common),
    /// Run an invariant suite; exits 3 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Regenerate the output described by a manifest.
    Replay {
        manifest: PathBuf,
        /// Write here instead of the manifest's output path.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Model variant for pmf and moments; tflbpwi sets mu = 0, tfldpwi sets lambda = 0.
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Times: comma list or start:stop:step.
    #[arg(long = "t", allow_hyphen_values = true)]
    t: Option<String>,
    /// Series truncation order K.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest state kept in the simulated histogram.
    #[arg(long)]
    state_cap: Option<usize>,
    /// Output file; a manifest is written next to it. Defaults to stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// TOML file with the same keys as the long flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn load_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(&shown, e))?;
    parse_config(&text).map_err(|e| CliError::Usage(format!("{shown}: {e}")))
}

fn resolve(command: Command, c: Common) -> CliResult<Run> {
    let f = load_config(&c.config)?;
    let verify = matches!(command, Command::Verify(_));
    let variant = match (c.variant, &f.variant) {
        (Some(v), _) => v,
        (None, Some(s)) => Variant::parse(s).ok_or_else(|| CliError::Usage(format!("unknown variant {s:?}")))?,
        (None, None) => Variant::default(),
    };
    let format = match (c.format, &f.format) {
        (Some(x), _) => x,
        (None, Some(s)) => Format::parse(s).ok_or_else(|| CliError::Usage(format!("unknown format {s:?}")))?,
        (None, None) if verify => Format::Json,
        (None, None) => Format::Csv,
    };
    let default_t = if verify { "0:0.4:0.1" } else { "1" };
    let grid = c.t.or(f.t).unwrap_or_else(|| default_t.into());
    let times = parse_grid(&grid).map_err(|e| CliError::Usage(format!("--t {grid:?}: {e}")))?;
    Ok(Run {
        command,
        variant,
        alpha: c.alpha.or(f.alpha).unwrap_or(1.0),
        lambda: c.lambda.or(f.lambda).unwrap_or(1.0),
        mu: c.mu.or(f.mu).unwrap_or(1.0),
        nu: c.nu.or(f.nu).unwrap_or(1.0),
        times,
        order: c.order.or(f.order).unwrap_or(fracbdi::adm::DEFAULT_ORDER),
        n_max: c.nmax.or(f.nmax).unwrap_or(20),
        replicas: c.replicas.or(f.replicas).unwrap_or(100_000),
        seed: c.seed.or(f.seed).unwrap_or(0),
        state_cap: c.state_cap.or(f.state_cap).unwrap_or(fracbdi::mc::DEFAULT_STATE_CAP),
        format,
        out: c.out,
    })
}

fn execute(run: &Run) -> CliResult<()> {
    let outcome = run.execute()?;
    match &run.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            outcome
                .table
                .write(run.format, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(path, e))?;
            let mpath = manifest_path(path);
            std::fs::write(&mpath, run.manifest(path).to_json()).map_err(|e| CliError::io(&mpath, e))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            outcome
                .table
                .write(run.format, &mut lock)
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    match outcome.failure {
        Some(f) => Err(CliError::Verify(f)),
        None => Ok(()),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let run = match cli.command {
        Sub::Coeffs(c) => resolve(Command::Coeffs, c)?,
        Sub::Pmf(c) => resolve(Command::Pmf, c)?,
        Sub::Components(c) => resolve(Command::Components, c)?,
        Sub::Moments(c) => resolve(Command::Moments, c)?,
        Sub::Simulate(c) => resolve(Command::Simulate, c)?,
        Sub::Verify { suite, common } => resolve(Command::Verify(suite), common)?,
        Sub::Replay { manifest, out } => {
            let shown = manifest.display().to_string();
            let text = std::fs::read_to_string(&manifest).map_err(|e| CliError::io(&shown, e))?;
            let m = parse_manifest(&text).map_err(|e| CliError::Usage(format!("{shown}: {e}")))?;
            let mut run = Run::from_manifest(&m)?;
            if out.is_some() {
                run.out = out;
            }
            run
        }
    };
    execute(&run)
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::VALIDATION } else { exit::OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
