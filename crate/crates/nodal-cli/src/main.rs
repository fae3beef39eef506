mod commands;
mod config;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "nodal", version, about = "Special functions, Frobenius structure and lattice actions of the nodal quiver")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML file with defaults for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Relative size of the last series term kept.
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    /// Largest change under panel doubling accepted by the period quadrature.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, global = true)]
    n_quad: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated u values for the period asymptotics.
    #[arg(long, global = true, allow_hyphen_values = true)]
    u_grid: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a named function.
    Eval(commands::EvalArgs),
    /// Run a verification suite.
    Verify {
        /// identities, frobenius, lattice, invariants, gamma or all
        suite: String,
    },
    /// Apply a braid word to an exceptional triple of K-classes.
    Braid(commands::BraidArgs),
    /// Lyashko-Looijenga map and its inverse.
    Ll {
        #[command(subcommand)]
        dir: commands::LlCommand,
    },
    /// List real roots.
    Roots {
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
    /// Gamma-structure identities and period asymptotics, or a single period.
    Gamma(commands::GammaArgs),
    /// Frobenius tensors at a flat point.
    Frobenius {
        /// t1,t2,tau
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, commands::CliError> {
    let g = cli.global;
    let file = match &g.config {
        Some(p) => FileConfig::load(p).map_err(commands::CliError::Config)?,
        None => FileConfig::default(),
    };
    let flags = FileConfig {
        seed: g.seed,
        samples: g.samples,
        tail_tol: g.tail_tol,
        quad_tol: g.quad_tol,
        n_quad: g.n_quad,
        max_terms: None,
        format: g.format,
        out: g.out,
        u_grid: g.u_grid.as_deref().map(parse::real_list).transpose().map_err(commands::CliError::Config)?,
    };
    let cfg = RunConfig::resolve(file, flags).map_err(commands::CliError::Config)?;
    match cli.command {
        Command::Eval(a) => commands::eval(&a, &cfg),
        Command::Verify { suite } => commands::verify(&suite, &cfg),
        Command::Braid(a) => commands::braid(&a, &cfg),
        Command::Ll { dir } => commands::ll(&dir, &cfg),
        Command::Roots { bound } => commands::roots(bound, &cfg),
        Command::Gamma(a) => commands::gamma(&a, &cfg),
        Command::Frobenius { t } => commands::frobenius(&t, &cfg),
    }
}
