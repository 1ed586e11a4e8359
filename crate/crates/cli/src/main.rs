mod commands;
mod params;

use clap::{Args, Parser, Subcommand};
use commands::{CmdError, EstimateArgs, ExactArgs, GridArgs, RecurArgs, SampleArgs};
use std::io::Write;
use std::process::ExitCode;

const AFTER_HELP: &str = "\
Environment:
  MALLOWS_THREADS    worker threads for parallel kernels (default: all cores)
  MALLOWS_DEPTH_CAP  largest F-chain depth tried by the bisection (default: 65536)

q values may be decimals (0.25) or fractions (1/3). For q > 1 pattern commands
evaluate at 1/q with the reversed pattern and report the reduction; q = 1 is the
uniform distribution.

Exit status: 0 success, 1 usage error, 2 verification failure, 3 resource limit.";

#[derive(Parser, Debug)]
#[command(
    name = "mallows",
    version,
    about = "Pattern avoidance under the Mallows distribution"
)]
#[command(after_help = AFTER_HELP)]
struct Cli {
    /// Emit JSON instead of CSV / text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads.
    #[arg(long, global = true, env = "MALLOWS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct BisectOpts {
    /// Target width of the limit bracket.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,

    /// Largest F-chain depth tried per candidate.
    #[arg(long, env = "MALLOWS_DEPTH_CAP", default_value_t = 1 << 16)]
    depth_cap: usize,
}

#[derive(Args, Debug)]
struct QSel {
    /// A single q in (0, 1).
    #[arg(long)]
    q: Option<String>,

    /// Grid `start:stop:step`, stop included.
    #[arg(long)]
    q_grid: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Brute-force avoidance probability and its q-polynomial numerator.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value = "1")]
        q: String,
        /// Also print the probability as an exact fraction.
        #[arg(long)]
        rational: bool,
    },
    /// d_n for n = 1..N from the convolution recurrence.
    Recur {
        /// Largest n.
        #[arg(long, short = 'N', alias = "N")]
        n: usize,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        q: String,
        /// Add exact rational values (N <= 30).
        #[arg(long)]
        rational: bool,
    },
    /// Closed-form bounds and the bisection bracket for the 312 limit, per q.
    Bounds {
        #[command(flatten)]
        qs: QSel,
        #[command(flatten)]
        bisect: BisectOpts,
    },
    /// Certified bracket for lim P_n(S_n(312))^{1/n}.
    Limit {
        #[command(flatten)]
        qs: QSel,
        #[command(flatten)]
        bisect: BisectOpts,
    },
    /// Seeded Mallows(q) permutations.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of permutations.
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Monte Carlo estimate of an avoidance probability.
    Estimate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: String,
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent RNG streams; results depend on (seed, samples, shards).
        #[arg(long, default_value_t = mallows_core::montecarlo::DEFAULT_SHARDS)]
        shards: usize,
    },
    /// Table of UB, LB and the certified true value over q = 0.1..0.9.
    Table {
        #[arg(long)]
        q_grid: Option<String>,
        #[command(flatten)]
        bisect: BisectOpts,
    },
    /// LB, UB and bisection-midpoint curves at step 0.01, long format.
    Plotdata {
        #[arg(long)]
        q_grid: Option<String>,
        #[command(flatten)]
        bisect: BisectOpts,
    },
    /// Run the invariant suite and print a pass/fail manifest.
    Verify,
}

fn grid<'a>(
    qs: Option<&'a QSel>,
    q_grid: Option<&'a String>,
    b: &BisectOpts,
    json: bool,
) -> GridArgs<'a> {
    GridArgs {
        q: qs.and_then(|s| s.q.as_deref()),
        q_grid: qs
            .and_then(|s| s.q_grid.as_deref())
            .or(q_grid.map(|s| s.as_str())),
        eps: b.eps,
        depth_cap: b.depth_cap,
        json,
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CmdError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CmdError::Usage(format!("thread pool: {e}")))?;
    }
    let json = cli.json;
    match &cli.command {
        Command::Exact {
            n,
            pattern,
            q,
            rational,
        } => commands::exact(
            ExactArgs {
                n: *n,
                pattern,
                q,
                rational: *rational,
                json,
            },
            out,
        ),
        Command::Recur {
            n,
            pattern,
            q,
            rational,
        } => commands::recur(
            RecurArgs {
                n: *n,
                pattern,
                q,
                rational: *rational,
                json,
            },
            out,
        ),
        Command::Bounds { qs, bisect } => commands::bounds(grid(Some(qs), None, bisect, json), out),
        Command::Limit { qs, bisect } => commands::limit(grid(Some(qs), None, bisect, json), out),
        Command::Sample { n, q, seed, count } => commands::sample(
            SampleArgs {
                n: *n,
                q,
                seed: *seed,
                count: *count,
                json,
            },
            out,
        ),
        Command::Estimate {
            n,
            q,
            pattern,
            samples,
            seed,
            shards,
        } => commands::estimate(
            EstimateArgs {
                n: *n,
                q,
                pattern,
                samples: *samples,
                seed: *seed,
                shards: *shards,
                json,
            },
            out,
        ),
        Command::Table { q_grid, bisect } => {
            commands::table(grid(None, q_grid.as_ref(), bisect, json), out)
        }
        Command::Plotdata { q_grid, bisect } => {
            commands::plotdata(grid(None, q_grid.as_ref(), bisect, json), out)
        }
        Command::Verify => commands::verify(json, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let res = run(cli, &mut out);
    let flushed = out.flush();
    match res.and(flushed.map_err(CmdError::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mallows: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
