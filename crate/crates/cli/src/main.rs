//! `qsphere`: batch driver for the exact and numerical index computations.
//!
//! Exit status: 0 when every requested check passes, 2 when a check or tolerance fails (the
//! report carries expected and obtained values), 1 for usage errors.

mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{parse_element, parse_q, IndexJob, Method, QArg};
use qsphere_core::algebra::AlgebraElement;
use qsphere_core::peterweyl::{load_cache, save_cache, PeterWeyl, CACHE_VERSION};
use qsphere_core::scalars::HalfInt;
use qsphere_core::Error;
use report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "qsphere",
    version,
    about = "Twisted index pairing on the standard Podleś sphere"
)]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Directory for the Peter-Weyl cache [env: CACHE_DIR]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for the numerical routes [env: NUM_THREADS]
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index of [P_n, V_n]: exact pairing, optionally against the weighted kernel index.
    Index {
        #[arg(long, allow_hyphen_values = true)]
        n: HalfInt,
        #[arg(long, value_parser = parse_q, default_value = "1/2")]
        q: QArg,
        #[arg(long, value_enum, default_value = "symbolic")]
        method: Method,
        /// Level cutoff of the truncation; defaults to |n| + 10.
        #[arg(long)]
        lambda: Option<HalfInt>,
        /// Singular values below this count as kernel.
        #[arg(long, default_value_t = 1e-8)]
        tau: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Also recompute at cutoff + 2 and with the threshold times 10.
        #[arg(long)]
        stability: bool,
    },
    /// Projection P_n and its Chern characters.
    Chern {
        #[arg(long, allow_hyphen_values = true)]
        n: HalfInt,
        #[arg(long, value_parser = parse_q)]
        q: Option<QArg>,
        #[arg(long)]
        show_terms: bool,
    },
    /// Twisted (b, B) identities of the residue cocycle on spanning tuples.
    CocycleCheck {
        #[arg(long, default_value_t = 4)]
        degree_max: u32,
        #[arg(long, value_parser = parse_q)]
        q: Option<QArg>,
        /// Additional random tuples per identity.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Residue at r = -1/2 of the twisted zeta function of β.
    Zeta {
        #[arg(long)]
        beta: String,
        #[arg(long, value_parser = parse_q, default_value = "1/2")]
        q: QArg,
        #[arg(long, default_value_t = 1e-14)]
        precision: f64,
    },
    /// Spectrum of D, weighted traces and the spectral dimension probe.
    Spectrum {
        #[arg(long)]
        lmax: HalfInt,
        #[arg(long, value_parser = parse_q, default_value = "1/2")]
        q: QArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Haar state of an expression.
    Haar {
        #[arg(long)]
        expr: String,
        #[arg(long, value_parser = parse_q)]
        q: Option<QArg>,
    },
    /// Peter-Weyl element t^l_{r,s}.
    Pw {
        #[arg(long)]
        l: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        r: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        s: HalfInt,
        #[arg(long, value_parser = parse_q)]
        q: Option<QArg>,
    },
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Domain(_) | Error::CutoffExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other),
        }
    }
}

fn element(text: &str) -> Result<AlgebraElement, Failure> {
    parse_element(text).map_err(|e| Failure::Usage(format!("{text:?}: {e}")))
}

fn env_or<T: std::str::FromStr>(flag: Option<T>, var: &str) -> Result<Option<T>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(var) {
        Ok(v) if !v.is_empty() => v
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{var}={v:?} is not valid"))),
        _ => Ok(None),
    }
}

fn cache_file(dir: &Path) -> PathBuf {
    dir.join(format!("peter-weyl-v{CACHE_VERSION}.json"))
}

/// Writes through a process-unique temporary file and renames it into place, so concurrent jobs
/// never observe a partial cache.
fn store_cache(dir: &Path) -> Result<(), Failure> {
    let tmp = dir.join(format!(".peter-weyl-{}.tmp", std::process::id()));
    save_cache(PeterWeyl::global(), &tmp)?;
    std::fs::rename(&tmp, cache_file(dir))
        .map_err(|e| Failure::Compute(Error::Cache(e.to_string())))
}

fn run(cli: Cli) -> Result<report::Report, Failure> {
    if let Some(n) = env_or(cli.threads, "NUM_THREADS")? {
        // a pool that is already configured keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let cache_dir = env_or(cli.cache_dir.clone(), "CACHE_DIR")?;
    if let Some(dir) = &cache_dir {
        load_cache(PeterWeyl::global(), &cache_file(dir))?;
    }
    let report = match cli.command {
        Command::Index {
            n,
            q,
            method,
            lambda,
            tau,
            tol,
            stability,
        } => commands::index(&IndexJob {
            n,
            q,
            method,
            lambda,
            tau,
            tol,
            stability,
        })?,
        Command::Chern { n, q, show_terms } => commands::chern(n, q.as_ref(), show_terms)?,
        Command::CocycleCheck {
            degree_max,
            q,
            random,
            seed,
        } => commands::cocycle_check(degree_max, q.as_ref(), random, seed)?,
        Command::Zeta { beta, q, precision } => {
            let x = element(&beta)?;
            commands::zeta(&beta, &x, &q, precision)?
        }
        Command::Spectrum { lmax, q, tol } => commands::spectrum(lmax, &q, tol)?,
        Command::Haar { expr, q } => {
            let x = element(&expr)?;
            commands::haar(&expr, &x, q.as_ref())?
        }
        Command::Pw { l, r, s, q } => commands::pw(l, r, s, q.as_ref())?,
    };
    if let Some(dir) = &cache_dir {
        store_cache(dir)?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
