mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eulerkit::commands::{self, Settings};
use eulerkit::par::Exec;
use serde_json::Value;

use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}: {1}")]
    Json(String, serde_json::Error),
    #[error(transparent)]
    Core(#[from] eulerkit::Error),
}

#[derive(Parser, Debug)]
#[command(name = "eulerkit", version, about = "Exact and certified checks for cyclotomic Euler systems")]
struct Cli {
    /// key=value config file (default: $EULERKIT_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// omit wall time so repeated runs are byte-identical
    #[arg(long, global = true)]
    deterministic: bool,
    /// disable the parallel job scheduler
    #[arg(long, global = true)]
    sequential: bool,
    /// working precision in bits
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// trial-division budget for norm factorization
    #[arg(long, global = true)]
    factor_budget: Option<u64>,
    /// directory for the L-value and discrete-log caches
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// write the certificate here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Distribution relations over all nested pairs of family fields
    DistCheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        max_conductor: Option<u64>,
    },
    /// Leading term of L_S(χ, s) at s = 0
    Lvalue {
        /// "f:quadratic" or "f:e1,e2,..."
        #[arg(long)]
        chi: String,
        /// finite primes of S (∞ is always included)
        #[arg(long = "S", value_delimiter = ',')]
        s: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Θ reconstruction on ℚ(m)^+
    Theta {
        #[arg(long)]
        m: u64,
    },
    /// Exterior bidual membership
    Bidual {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        element: PathBuf,
    },
    /// Circular distribution axioms and Coleman reduction
    Coleman {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Norm coherence of (1−ζ_{p^n})^{r_n}
    Normcoherent {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        seq: PathBuf,
    },
    /// Valuations, residue logs and derivative classes at a prime above q
    Kolyvagin {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        input: PathBuf,
    },
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.display().to_string(), e))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = cli.config.clone().or_else(|| std::env::var_os("EULERKIT_CONFIG").map(PathBuf::from));
    let cfg = Config::load(file.as_deref(), &|k| std::env::var(k).ok())?;
    let settings = Settings {
        precision: cli.precision.unwrap_or(cfg.precision),
        factor_budget: cli.factor_budget.unwrap_or(cfg.factor_budget),
        cache_dir: cli.cache_dir.clone().or(cfg.cache_dir.clone()),
        exec: if cli.sequential || cfg.sequential { Exec::Sequential } else { Exec::Parallel },
        deterministic: cli.deterministic || cfg.deterministic,
    };
    let cert = match &cli.cmd {
        Cmd::DistCheck { system, max_conductor } => {
            commands::cmd_dist_check(&read_json(system)?, max_conductor.unwrap_or(cfg.max_conductor), &settings)?
        }
        Cmd::Lvalue { chi, s, order } => commands::cmd_lvalue(chi, s, *order, &settings)?,
        Cmd::Theta { m } => commands::cmd_theta(*m, &settings)?,
        Cmd::Bidual { lattice, degree, element } => {
            commands::cmd_bidual(&read_json(lattice)?, *degree, &read_json(element)?, &settings)?
        }
        Cmd::Coleman { dist } => commands::cmd_coleman(&read_json(dist)?, &settings)?,
        Cmd::Normcoherent { p, depth, seq } => commands::cmd_normcoherent(*p, *depth, &read_json(seq)?, &settings)?,
        Cmd::Kolyvagin { q, p, input } => commands::cmd_kolyvagin(*q, *p, &read_json(input)?, &settings)?,
    };
    let text = cert.to_canonical_string() + "\n";
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e))?,
        None => print!("{text}"),
    }
    Ok(cert.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("eulerkit: {e}");
            ExitCode::from(2)
        }
    }
}
