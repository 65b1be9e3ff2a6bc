//! `crlab`: Cohen-Ramanujan sums, expansions and correlation reports from the
//! command line.
//!
//! Exit codes: 0 success, 1 a checked identity or bound failed, 2 invalid
//! parameters, 3 I/O failure, 4 arithmetic range or memory budget exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crlab_core::asymptotics::LemmaId;
use crlab_core::SExponent;

use crate::output::{Failure, Sink};

#[derive(Parser, Debug)]
#[command(
    name = "crlab",
    version,
    about = "Cohen-Ramanujan sums and correlation asymptotics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for inner computations [default: all cores]
    #[arg(long, global = true, env = "CRLAB_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Exponential,
    Both,
}

/// Functions available to `meanvalue`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Func {
    /// f(n) = 1
    One,
    /// f(n) = σ_k(n)/n^k
    Sigma,
    /// f(n) = c_k^s(n)
    Crsum,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate c_r^s(n)
    Crsum {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
    },
    /// Tabulate c_r^s(n) for r <= R, 0 <= n <= N as CSV
    Table {
        #[arg(long = "r", visible_alias = "rmax")]
        r_max: u64,
        #[arg(long = "n", visible_alias = "nmax")]
        n_max: u64,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
    },
    /// Check orthogonality of c_d^s and c_t^s for all divisors d, t of r
    Orthogonality {
        #[arg(long)]
        r: u64,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
    },
    /// Coefficients of the σ_{ks}(n)/n^{ks} expansion, or its values at --n
    Expand {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
        /// Truncation [default: 10000 for s = 1, 1000 otherwise]
        #[arg(long = "R")]
        terms: Option<usize>,
        /// Comma-separated arguments to evaluate at
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
    },
    /// Extract expansion coefficients of a function by finite mean values
    Meanvalue {
        #[arg(long, value_enum)]
        func: Func,
        /// Parameter of --func (k of σ_k or of c_k^s)
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
        #[arg(long = "R")]
        terms: usize,
        /// Number of samples averaged over
        #[arg(long = "N")]
        samples: u64,
    },
    /// Coefficients of n -> f(n + h) from a coefficient file of f
    Shift {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
        #[arg(long)]
        h: u64,
    },
    /// Correlation sums against their predicted main terms
    Correlate {
        #[arg(long, requires = "b", conflicts_with_all = ["f", "g"])]
        a: Option<f64>,
        #[arg(long, requires = "a")]
        b: Option<f64>,
        /// Coefficient file of f
        #[arg(long, requires = "g")]
        f: Option<PathBuf>,
        /// Coefficient file of g
        #[arg(long, requires = "f")]
        g: Option<PathBuf>,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
        #[arg(long, default_value_t = 0)]
        h: u64,
        /// Strictly increasing comma-separated N values
        #[arg(long = "N", value_parser = parse_schedule)]
        schedule: Schedule,
    },
    /// Evaluate one of the bounds on sums of c_r^s(n) c_k^s(n + h) over a grid
    Lemmas {
        /// 1 to 4
        #[arg(long, value_parser = parse_lemma)]
        which: LemmaId,
        #[arg(long)]
        rmax: u64,
        #[arg(long)]
        kmax: u64,
        #[arg(long, value_parser = parse_s, value_delimiter = ',', default_value = "1")]
        s: Vec<SExponent>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        h: Vec<u64>,
        #[arg(long = "N", value_parser = parse_schedule)]
        schedule: Schedule,
    },
    /// Write h = m^s k with k s-th power free
    Decompose {
        #[arg(long)]
        h: u64,
        #[arg(long, value_parser = parse_s, default_value = "1")]
        s: SExponent,
    },
}

/// A strictly increasing list of positive `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule(pub Vec<u64>);

fn parse_s(v: &str) -> Result<SExponent, String> {
    let s: u32 = v.trim().parse().map_err(|e| format!("{e}"))?;
    SExponent::new(s).map_err(|e| e.to_string())
}

fn parse_lemma(v: &str) -> Result<LemmaId, String> {
    v.parse().map_err(|e: crlab_core::Error| e.to_string())
}

fn parse_schedule(v: &str) -> Result<Schedule, String> {
    let values = v
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.first() == Some(&0) {
        return Err("N values must be positive".into());
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err("N values must be strictly increasing".into());
    }
    Ok(Schedule(values))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let sink = Sink::new(cli.out, cli.format);
    match cli.command {
        Command::Crsum { r, n, s, method } => commands::crsum(&sink, r, n, s, method),
        Command::Table { r_max, n_max, s } => commands::table(&sink, r_max, n_max, s),
        Command::Orthogonality { r, s } => commands::orthogonality(&sink, r, s),
        Command::Expand { k, s, terms, n } => {
            let terms = terms.unwrap_or(if s.get() == 1 { 10_000 } else { 1_000 });
            commands::expand(&sink, k, s, terms, &n)
        }
        Command::Meanvalue {
            func,
            k,
            s,
            terms,
            samples,
        } => commands::meanvalue(&sink, func, k, s, terms, samples),
        Command::Shift { coeffs, s, h } => commands::shift(&sink, &coeffs, s, h),
        Command::Correlate {
            a,
            b,
            f,
            g,
            s,
            h,
            schedule,
        } => {
            let source = match (a, b, f, g) {
                (Some(a), Some(b), None, None) => commands::Pair::Corollary { a, b },
                (None, None, Some(f), Some(g)) => commands::Pair::Files { f, g },
                _ => {
                    return Err(Failure::Usage(
                        "correlate needs either --a and --b, or --f and --g".into(),
                    ))
                }
            };
            commands::correlate(&sink, source, s, h, schedule.0)
        }
        Command::Lemmas {
            which,
            rmax,
            kmax,
            s,
            h,
            schedule,
        } => commands::lemmas(&sink, which, rmax, kmax, s, h, schedule.0),
        Command::Decompose { h, s } => commands::decompose(&sink, h, s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            eprintln!("crlab: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
