//! The `urntubes` command line.
//!
//! Exit codes: 0 success, 1 usage or syntax error, 2 domain, conditioning
//! or resource error, 3 a check that did not hold.

use clap::{Args, Parser, Subcommand};

use crate::draws::{draw_pmf, DrawMode, Urn};
use crate::emit::{self, Format};
use crate::error::Error;
use crate::firstfull::{first_full, points_share, TubeConfig};
use crate::negative::{negative, negative_trace, Cutoff};
use crate::numeric::Rational;
use crate::parse::{parse_distribution, parse_multiset};
use crate::suites::{run_suite, Suite, SuiteOptions};

/// Environment variable naming the default output format.
pub const FORMAT_ENV: &str = "URNTUBES_FORMAT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "urntubes", version, about = "Exact urn-and-tube probabilities")]
struct Cli {
    /// Output format [default: table, or $URNTUBES_FORMAT]
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distribution of a draw of size K
    Draw {
        #[command(flatten)]
        urn: UrnArgs,
        /// Number of balls drawn
        #[arg(short = 'k', long = "k")]
        k: u64,
    },
    /// Which tube fills first
    FirstFull {
        #[command(flatten)]
        urn: UrnArgs,
        /// Tube lengths per colour, e.g. "2R+3B"
        #[arg(long)]
        tubes: String,
    },
    /// Number of draws until every tube is full
    Negative {
        #[command(flatten)]
        urn: UrnArgs,
        /// Tube lengths per colour, e.g. "2M+2F"
        #[arg(long)]
        tubes: String,
        /// Last k listed explicitly
        #[arg(long, conflicts_with = "tail_eps")]
        kmax: Option<u64>,
        /// Stop once the tail mass is provably below this [default: 1/1000]
        #[arg(long, value_parser = parse_rational)]
        tail_eps: Option<Rational>,
        /// Print the automaton run step by step instead of the distribution
        #[arg(long)]
        trace: bool,
    },
    /// Fair split of the stake in an interrupted game
    Points {
        /// Wins needed to take the stake
        #[arg(long)]
        target: u64,
        #[arg(long)]
        wins_a: u64,
        #[arg(long)]
        wins_b: u64,
        /// Probability that A wins a round
        #[arg(long, value_parser = parse_rational)]
        prob: Rational,
        #[arg(long, value_parser = parse_rational)]
        stake: Rational,
    },
    /// Run a self-check suite; exits 3 if any check fails
    Check {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Terms per series for the infinite-sum identities
        #[arg(long, default_value_t = 200)]
        truncation: u64,
        /// Largest accepted gap for truncated series
        #[arg(long, value_parser = parse_rational, default_value = "1/100")]
        tolerance: Rational,
    },
}

#[derive(Args, Debug)]
struct UrnArgs {
    /// multinomial, hypergeometric or polya (also 0, -1, +1)
    #[arg(long, value_parser = parse_mode, allow_hyphen_values = true)]
    mode: DrawMode,
    /// A distribution such as "1/3 R + 2/3 B" (multinomial) or balls such as "3R+6B"
    #[arg(long)]
    urn: String,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<DrawMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("urntubes: {message}\n"),
        }
    }
}

/// Runs the command line with the default format taken from `$URNTUBES_FORMAT`.
pub fn run<I: IntoIterator<Item = S>, S: Into<String>>(argv: I) -> Outcome {
    run_with_default(argv, std::env::var(FORMAT_ENV).ok().as_deref())
}

/// Runs the command line; `default_format` stands in for `$URNTUBES_FORMAT`.
pub fn run_with_default<I: IntoIterator<Item = S>, S: Into<String>>(argv: I, default_format: Option<&str>) -> Outcome {
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => return Outcome::ok(e.render().to_string()),
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            return Outcome::fail(EXIT_USAGE, first.trim_start_matches("error: ").to_string());
        }
    };
    let format = match (cli.format, default_format) {
        (Some(f), _) => f,
        (None, Some(env)) => match env.parse() {
            Ok(f) => f,
            Err(e) => return Outcome::fail(EXIT_USAGE, format!("${FORMAT_ENV}: {e}")),
        },
        (None, None) => Format::Table,
    };
    match dispatch(cli.command, format) {
        Ok((text, true)) => Outcome::ok(text),
        Ok((text, false)) => Outcome {
            code: EXIT_CHECK_FAILED,
            stdout: text,
            stderr: "urntubes: some checks did not hold\n".into(),
        },
        Err(Failure { arg, error }) => {
            let code = match error {
                Error::Parse { .. } => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            };
            let message = match arg {
                Some(arg) => format!("invalid --{arg}: {error}"),
                None => error.to_string(),
            };
            Outcome::fail(code, message)
        }
    }
}

struct Failure {
    arg: Option<&'static str>,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { arg: None, error }
    }
}

fn at<T>(arg: &'static str, r: crate::error::Result<T>) -> Result<T, Failure> {
    r.map_err(|error| Failure { arg: Some(arg), error })
}

fn urn(args: &UrnArgs) -> Result<Urn, Failure> {
    Ok(match args.mode {
        DrawMode::Multinomial => Urn::Distribution(at("urn", parse_distribution(&args.urn))?),
        _ => Urn::Balls(at("urn", parse_multiset(&args.urn))?),
    })
}

/// Returns the rendered output and whether every check held.
fn dispatch(command: Command, format: Format) -> Result<(String, bool), Failure> {
    match command {
        Command::Draw { urn: args, k } => {
            let u = urn(&args)?;
            Ok((emit::dist(&draw_pmf(args.mode, &u, k)?, format), true))
        }
        Command::FirstFull { urn: args, tubes } => {
            let u = urn(&args)?;
            let tubes = TubeConfig::new(at("tubes", parse_multiset(&tubes))?)?;
            Ok((emit::dist(&first_full(args.mode, &u, &tubes)?, format), true))
        }
        Command::Negative {
            urn: args,
            tubes,
            kmax,
            tail_eps,
            trace,
        } => {
            let u = urn(&args)?;
            let tubes = at("tubes", parse_multiset(&tubes))?;
            let cutoff = match (kmax, tail_eps) {
                (Some(k), _) => Cutoff::KMax(k),
                (None, Some(eps)) => Cutoff::TailEps(eps),
                (None, None) => Cutoff::TailEps(Rational::ratio(1, 1000)),
            };
            let d = negative(args.mode, &u, &tubes, &cutoff).map_err(|e| match e {
                Error::Resource(m) => Error::Resource(format!("{m} (--kmax)")),
                e => e,
            })?;
            if trace {
                let rows = negative_trace(args.mode, &u, &tubes, d.k_max())?;
                Ok((emit::trace(&rows, format), true))
            } else {
                Ok((emit::natdist(&d, format), true))
            }
        }
        Command::Points {
            target,
            wins_a,
            wins_b,
            prob,
            stake,
        } => Ok((emit::points(&points_share(target, wins_a, wins_b, &prob, &stake)?, format), true)),
        Command::Check {
            suite,
            seed,
            trials,
            truncation,
            tolerance,
        } => {
            let opts = SuiteOptions {
                seed,
                trials,
                truncation,
                tolerance,
            };
            let reports = run_suite(suite, &opts)?;
            let all = reports.iter().all(|r| r.holds);
            Ok((emit::reports(&reports, format), all))
        }
    }
}
