use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use otlab_cli::commands;
use otlab_cli::config::RunConfig;
use otlab_cli::output::{Emitter, OutFormat};

#[derive(Parser)]
#[command(
    name = "otlab",
    version,
    about = "Orlicz-Schatten spectral laboratory on truncated quantum tori"
)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for reports and tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Primary report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue table, L_s spectrum, and Weyl fit.
    Spectrum {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "R")]
        radius: Option<i64>,
        #[arg(long)]
        s: Option<f64>,
    },
    /// Luxemburg norm of a sequence file (one value per line).
    Norm {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        phi: Option<String>,
    },
    /// Convergence verdict for the L_s singular-value series.
    Membership {
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "R")]
        radius: Option<i64>,
    },
    /// Factorization report and the optimality table.
    Factorize,
    /// Solve (-Delta + V) u = f and run the regularity check.
    Solve {
        /// Source element JSON; defaults to the unit.
        #[arg(long)]
        f: Option<PathBuf>,
    },
    /// Heat smoothing survey and scaling fit.
    Heat,
    /// Transport survey over random density pairs.
    Distance,
    /// Run every registered claim and write the canonical report.
    #[command(name = "check-all")]
    CheckAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match RunConfig::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let format = match cli.format {
        Format::Json => OutFormat::Json,
        Format::Csv => OutFormat::Csv,
    };
    let mut emitter = match Emitter::new(&cli.out, format) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("output error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Spectrum { d, radius, s } => {
            commands::cmd_spectrum(&cfg, &mut emitter, *d, *radius, *s)
        }
        Command::Norm { file, phi } => {
            commands::cmd_norm(&cfg, &mut emitter, file, phi.as_deref())
        }
        Command::Membership { phi, s, d, radius } => {
            commands::cmd_membership(&cfg, &mut emitter, phi.as_deref(), *s, *d, *radius)
        }
        Command::Factorize => commands::cmd_factorize(&cfg, &mut emitter),
        Command::Solve { f } => commands::cmd_solve(&cfg, &mut emitter, f.as_deref()),
        Command::Heat => commands::cmd_heat(&cfg, &mut emitter),
        Command::Distance => commands::cmd_distance(&cfg, &mut emitter),
        Command::CheckAll => commands::cmd_check_all(&cfg, &mut emitter),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
