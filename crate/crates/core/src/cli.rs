//! Command-line front end.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::heisenberg::Ring;
use crate::padic::{parse_rational, Prime, Q};
use crate::report::{self, Format, HeisenbergRequest, Limits, Report};

#[derive(Debug, Parser)]
#[command(name = "padic-entropy", version, about = "Exact entropy and scale of endomorphisms of p-adic groups")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Consecutive repeating blocks required before a limit is accepted.
    #[arg(long, global = true, default_value_t = crate::engine::DEFAULT_WINDOW)]
    pub window: usize,

    /// Maximum number of steps for the oracles.
    #[arg(long, global = true, default_value_t = crate::engine::DEFAULT_CAP)]
    pub cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct FileArg {
    /// JSON request document; `-` reads standard input.
    #[arg(short = 'f', long = "file")]
    pub file: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of a matrix on Q_p^n, a block endomorphism or a periodic family.
    Entropy(FileArg),
    /// Scale of a matrix on Q_p^n by three methods.
    Scale {
        #[command(flatten)]
        input: FileArg,
        /// Smallest lattice exponent tried by the minimal-scale search.
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        kmin: i64,
        /// Largest lattice exponent tried by the minimal-scale search.
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        kmax: i64,
    },
    /// Newton polygon and root valuations of a monic rational polynomial.
    Newton {
        #[arg(long)]
        poly: String,
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
    },
    /// Cotrajectory entropy with the increment trace.
    Oracle(FileArg),
    /// Additivity of entropy for a block lower triangular matrix.
    CheckAt(FileArg),
    /// Entropy class of a finite-rank p-group or a periodic group.
    Classify(FileArg),
    /// Diagonal endomorphisms of the Heisenberg group over Z_p or Q_p.
    Heisenberg {
        #[arg(long, value_parser = parse_ring)]
        ring: Ring,
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
        #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
        s: Option<Q>,
        #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
        t: Option<Q>,
        /// Also run the cotrajectory oracle.
        #[arg(long)]
        oracle: bool,
        /// Level k of the base subgroup H(p^k Z_p).
        #[arg(long, default_value_t = 0)]
        level: i64,
    },
}

fn parse_prime(s: &str) -> std::result::Result<Prime, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ring(s: &str) -> std::result::Result<Ring, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_q(s: &str) -> std::result::Result<Q, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read_doc(f: &FileArg, stdin: &mut dyn Read) -> Result<serde_json::Value> {
    let text = if f.file.as_os_str() == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("reading standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&f.file).map_err(|e| Error::Parse(format!("reading {}: {e}", f.file.display())))?
    };
    report::parse_json(&text)
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Report> {
    let lim = Limits {
        window: cli.window,
        cap: cli.cap,
    };
    match &cli.command {
        Command::Entropy(f) => report::entropy_report(&read_doc(f, stdin)?, lim),
        Command::Scale { input, kmin, kmax } => {
            if kmin > kmax {
                return Err(Error::Invalid(format!("empty exponent range {kmin}..={kmax}")));
            }
            report::scale_report(&read_doc(input, stdin)?, lim, *kmin..=*kmax)
        }
        Command::Newton { poly, p } => report::newton_report(poly, *p),
        Command::Oracle(f) => report::oracle_report(&read_doc(f, stdin)?, lim),
        Command::CheckAt(f) => report::check_at_report(&read_doc(f, stdin)?, lim),
        Command::Classify(f) => report::classify_report(&read_doc(f, stdin)?),
        Command::Heisenberg { ring, p, s, t, oracle, level } => report::heisenberg_report(
            &HeisenbergRequest {
                ring: *ring,
                p: *p,
                s: s.clone(),
                t: t.clone(),
                oracle: *oracle,
                level: *level,
            },
            lim,
        ),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e.exit_code() {
        2 => "parse",
        4 => "non-stabilization",
        _ => "validation",
    }
}

pub fn render_error(e: &Error, format: Format) -> String {
    match format {
        Format::Text => format!("error ({}): {e}\n", error_kind(e)),
        Format::Json => {
            let mut v = json!({ "error": error_kind(e), "message": e.to_string() });
            if let Error::InvalidEndomorphism(violations) = e {
                v["violations"] = serde_json::to_value(violations).expect("violations serialize");
            }
            format!("{}\n", serde_json::to_string_pretty(&v).expect("error serializes"))
        }
    }
}

/// Runs the program on `args`; returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    match execute(&cli, stdin) {
        Ok(r) => {
            let _ = stdout.write_all(r.render(format).as_bytes());
            0
        }
        Err(e) => {
            let _ = stderr.write_all(render_error(&e, format).as_bytes());
            e.exit_code()
        }
    }
}
