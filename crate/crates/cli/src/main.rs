mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "graftlab", version, about = "Verification suite and parameter sweeps for grafted hyperbolic collars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity suite and write a JSON report array.
    Verify(Flags),
    /// Sweep one chart parameter and write one CSV row per point.
    Sweep(Flags),
    /// Compare the numeric perturbed geodesic with the linearised displacement.
    Geodesic(Flags),
    /// Dump the chart and its derived quantities as JSON.
    Chart(Flags),
    /// Dump hyperbolic mode profiles (or, with --spectral, cylinder coefficients) as CSV.
    Modes {
        #[command(flatten)]
        flags: Flags,
        #[arg(long)]
        spectral: bool,
    },
}

/// Every key of the configuration file is also a flag.
#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long = "outer-bc")]
    outer_bc: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long = "fd-step")]
    fd_step: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let pairs = [
            ("ell", &self.ell),
            ("s", &self.s),
            ("a", &self.a),
            ("outer_bc", &self.outer_bc),
            ("modes", &self.modes),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("out", &self.out),
            ("param", &self.param),
            ("from", &self.from),
            ("to", &self.to),
            ("steps", &self.steps),
            ("t", &self.t),
            ("fd_step", &self.fd_step),
            ("points", &self.points),
            ("amplitude", &self.amplitude),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(var) = std::env::var("GRAFTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = var.parse().map_err(|_| format!("GRAFTLAB_THREADS: cannot parse {var:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("GRAFTLAB_THREADS: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (flags, spectral) = match &cli.command {
        Command::Verify(f) | Command::Sweep(f) | Command::Geodesic(f) | Command::Chart(f) => (f, false),
        Command::Modes { flags, spectral } => (flags, *spectral),
    };
    let cfg = match flags.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Verify(_) => run::verify(&cfg),
        Command::Sweep(_) => run::sweep(&cfg),
        Command::Geodesic(_) => run::geodesic(&cfg),
        Command::Chart(_) => run::chart(&cfg),
        Command::Modes { .. } => run::modes(&cfg, spectral),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
