use std::path::PathBuf;
use std::process::ExitCode;

use casimir_modes_cli::commands::{
    cmd_dispersion, cmd_energy, cmd_force, cmd_modes, cmd_scatter, reject_ideal,
};
use casimir_modes_cli::config::{parse_linear_grid, Geometry, RunConfig};
use casimir_modes_cli::table::{Format, OutputTable};
use casimir_modes_cli::verify::{self, Suite};
use casimir_modes_cli::{CliError, CliResult, EXIT_NUMERICAL, EXIT_USAGE};
use clap::{Parser, Subcommand};

/// Mode spectra and Casimir forces of planar three-layer media.
#[derive(Parser, Debug)]
#[command(name = "casimir-modes", version, about)]
struct Cli {
    /// Configuration file (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Stack preset: single-interface, I, II, III, IV, ideal or custom.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Dimensionless width L = 2 a omega_p / c (excludes --gap-nm).
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    l: Option<f64>,
    /// Mirror separation d = 2a in nanometres (excludes --L).
    #[arg(long = "gap-nm", global = true)]
    gap_nm: Option<f64>,
    /// Plasma frequency in rad/s.
    #[arg(long = "omega-p", global = true)]
    omega_p: Option<f64>,
    /// Drude relaxation in rad/s; positive values switch plasma to Drude.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Transverse-wavenumber grid q = k/k_p as a:b:n (inclusive, linear).
    #[arg(long = "q-grid", global = true)]
    q_grid: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Tolerance for the verification suites.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Discrete dispersion branches Omega(q) with the continuum boundaries.
    Dispersion,
    /// Mode census (surface / hybrid / waveguide / fundamental) per q.
    Modes,
    /// S-matrix scan over the two-sided continuum.
    Scatter,
    /// Force and energy versus separation.
    Force,
    /// Energy versus separation.
    Energy,
    /// Run a verification suite and report pass/fail.
    Verify {
        /// unitarity, plasmon, modes, lifshitz, spectral-sum or all.
        suite: String,
    },
}

fn build_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(anyhow::anyhow!("cannot read {}: {e}", path.display()))
            })?;
            RunConfig::from_toml(&text).map_err(CliError::Usage)?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.preset = p.parse().map_err(CliError::Usage)?;
    }
    match (cli.l, cli.gap_nm) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(anyhow::anyhow!("--L and --gap-nm are exclusive")))
        }
        (Some(l), None) => cfg.geometry = Geometry::DimensionlessWidth(l),
        (None, Some(nm)) => cfg.geometry = Geometry::Separation(nm * 1e-9),
        (None, None) => {}
    }
    if let Some(v) = cli.omega_p {
        cfg.omega_p = v;
    }
    if let Some(v) = cli.gamma {
        cfg.gamma = v;
    }
    if let Some(spec) = &cli.q_grid {
        cfg.q_grid = parse_linear_grid(spec).map_err(CliError::Usage)?;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse().map_err(CliError::Usage)?;
    }
    if let Some(path) = &cli.out {
        cfg.out = Some(path.clone());
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    cfg.validate().map_err(CliError::Usage)?;
    Ok(cfg)
}

fn emit(table: &OutputTable, cfg: &RunConfig) -> CliResult<()> {
    let rendered = table.render(cfg.format);
    write_output(&rendered, cfg)
}

fn write_output(text: &str, cfg: &RunConfig) -> CliResult<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Usage(anyhow::anyhow!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = build_config(cli)?;
    match &cli.cmd {
        Cmd::Dispersion => {
            reject_ideal(&cfg)?;
            emit(&cmd_dispersion(&cfg)?, &cfg)
        }
        Cmd::Modes => {
            reject_ideal(&cfg)?;
            emit(&cmd_modes(&cfg)?, &cfg)
        }
        Cmd::Scatter => {
            reject_ideal(&cfg)?;
            emit(&cmd_scatter(&cfg)?, &cfg)
        }
        Cmd::Force => emit(&cmd_force(&cfg)?, &cfg),
        Cmd::Energy => emit(&cmd_energy(&cfg)?, &cfg),
        Cmd::Verify { suite } => {
            let suite: Suite = suite.parse().map_err(CliError::Usage)?;
            let checks = verify::run(suite, &cfg);
            print!("{}", verify::render_table(&checks));
            let report = verify::render_json(&checks, &cfg);
            match &cfg.out {
                Some(_) => write_output(&report, &cfg)?,
                None if cfg.format == Format::Json => print!("{report}"),
                None => {}
            }
            if checks.iter().all(|c| c.pass()) {
                Ok(())
            } else {
                Err(CliError::Numerical(anyhow::anyhow!("verification failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.message());
            ExitCode::from(match e.exit_code() {
                EXIT_USAGE => EXIT_USAGE as u8,
                _ => EXIT_NUMERICAL as u8,
            })
        }
    }
}
