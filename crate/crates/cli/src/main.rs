//! `gqd`: batch front end for discord curves, flow region maps, single
//! trajectories and the oracle cross-check suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gqd_core::sweep::config::{Format, Mode, RunConfig, SweepRange};
use gqd_core::sweep::run;
use gqd_core::{Error, SpectralModel};

#[derive(Parser, Debug)]
#[command(name = "gqd", version, about = "Geometric quantum discord under structured reservoirs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one batch job; flags override values from --config.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Curves,
    RegionMap,
    Trajectory,
    CrossCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SpectralArg {
    Lorentzian,
    Ohmic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha_sq: Option<f64>,
    #[arg(long, value_enum)]
    spectral: Option<SpectralArg>,
    /// Lorentzian width in units of gamma0.
    #[arg(long, conflicts_with_all = ["eta", "s", "omega_c"])]
    lambda: Option<f64>,
    /// Ohmic-like coupling.
    #[arg(long)]
    eta: Option<f64>,
    /// Ohmic-like exponent.
    #[arg(long)]
    s: Option<f64>,
    /// Ohmic-like cutoff in units of omega0.
    #[arg(long)]
    omega_c: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Sweep steps (region-map) or q samples (curves).
    #[arg(long)]
    steps: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    workers: Option<usize>,
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Curves => Mode::Curves,
        ModeArg::RegionMap => Mode::RegionMap,
        ModeArg::Trajectory => Mode::Trajectory,
        ModeArg::CrossCheck => Mode::CrossCheck,
    }
}

/// Applies the spectral flags to `current`, starting from family defaults
/// when the family changes or nothing was configured.
fn spectral_override(args: &RunArgs, current: Option<SpectralModel>) -> Option<SpectralModel> {
    let family = args.spectral.or(match current {
        Some(SpectralModel::Lorentzian { .. }) => Some(SpectralArg::Lorentzian),
        Some(SpectralModel::OhmicLike { .. }) => Some(SpectralArg::Ohmic),
        None if args.lambda.is_some() => Some(SpectralArg::Lorentzian),
        None if args.eta.is_some() || args.s.is_some() || args.omega_c.is_some() => Some(SpectralArg::Ohmic),
        None => None,
    })?;
    let model = match (family, current) {
        (SpectralArg::Lorentzian, Some(m @ SpectralModel::Lorentzian { .. })) => m,
        (SpectralArg::Ohmic, Some(m @ SpectralModel::OhmicLike { .. })) => m,
        (SpectralArg::Lorentzian, _) => SpectralModel::lorentzian(1.0, 0.5),
        (SpectralArg::Ohmic, _) => SpectralModel::ohmic(0.1, 3.0, 2.0),
    };
    Some(match model {
        SpectralModel::Lorentzian { gamma0, lambda, omega0 } => {
            SpectralModel::Lorentzian { gamma0, lambda: args.lambda.map_or(lambda, |r| r * gamma0), omega0 }
        }
        SpectralModel::OhmicLike { eta, s, omega_c, omega0 } => SpectralModel::OhmicLike {
            eta: args.eta.unwrap_or(eta),
            s: args.s.unwrap_or(s),
            omega_c: args.omega_c.unwrap_or(omega_c),
            omega0,
        },
    })
}

fn build_config(args: &RunArgs) -> gqd_core::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::new(mode_of(args.mode)),
    };
    cfg.mode = mode_of(args.mode);
    if let Some(a2) = args.alpha_sq {
        cfg.alpha_sq = Some(a2);
    }
    if cfg.alpha_sq.is_none() && matches!(cfg.mode, Mode::RegionMap | Mode::Trajectory) {
        cfg.alpha_sq = Some(0.5);
    }
    cfg.spectral = spectral_override(args, cfg.spectral);
    if cfg.spectral.is_none() && matches!(cfg.mode, Mode::RegionMap | Mode::Trajectory) {
        cfg.spectral = Some(SpectralModel::lorentzian(1.0, 0.5));
    }
    if args.t_max.is_some() {
        cfg.solver.t_max = args.t_max;
    }
    if args.dt.is_some() {
        cfg.solver.dt = args.dt;
    }
    if let Some(steps) = args.steps {
        match cfg.mode {
            Mode::Curves => cfg.q_points = steps,
            _ => {
                let model = cfg.spectral.unwrap_or(SpectralModel::lorentzian(1.0, 0.5));
                let (min, max) = match (&cfg.sweep, model) {
                    (Some(s), _) => (s.min, s.max),
                    (None, SpectralModel::Lorentzian { .. }) => (0.02, 1.98),
                    (None, SpectralModel::OhmicLike { .. }) => (0.02, 1.0),
                };
                let param_name = cfg.sweep.as_ref().and_then(|s| s.param_name.clone());
                cfg.sweep = Some(SweepRange { param_name, min, max, steps });
            }
        }
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run(args) = cli.command;

    let cfg = match build_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("gqd: {e}");
            return ExitCode::from(2);
        }
    };

    match run(&cfg) {
        Ok(outcome) => {
            if let Some(path) = &outcome.manifest {
                eprintln!("gqd: {} sweep rows failed; see {}", outcome.artifact.failures().len(), path.display());
            }
            let failed = outcome.artifact.failed_checks();
            if failed > 0 {
                eprintln!("gqd: {failed} cross-checks outside tolerance");
            }
            if outcome.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::Config(msg)) => {
            eprintln!("gqd: configuration error: {msg}");
            ExitCode::from(2)
        }
        // Downstream reader closed early, e.g. `| head`.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gqd: {e}");
            ExitCode::from(1)
        }
    }
}
