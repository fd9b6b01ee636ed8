//! `markov`: command-line access to Markov numbers, the stable norm and the
//! line-monotonicity suites. Every invocation prints one JSON document.

mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use markov_core::arith::RealEnclosure;
use markov_core::collisions::{collision_census, CensusReport};
use markov_core::farey::{CoprimePair, FareyFraction};
use markov_core::fock::{
    corner_slopes, psi, psi_derivative, sigma_minus, sigma_plus, CornerSlopes, Side,
};
use markov_core::markov::{markov_distance, markov_number, MarkovCache};
use markov_core::ordering::{
    find_antimodal, scan_line, AntimodalSearch, LatticeLine, ScanMode, ScanResult, Slope,
};
use markov_core::verify::{run_suite, Suite, SuiteReport};
use markov_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "markov",
    version,
    about = "Markov numbers, the stable norm and the Markov ordering"
)]
struct Cli {
    /// Precision in bits for real-valued output.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(8..=65536))]
    prec: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Markov number of p/q, or the Markov distance of a sector point.
    Markov {
        /// A reduced fraction in [0, 1].
        fraction: Option<FareyFraction>,
        /// A sector point `q p`, not necessarily primitive.
        #[arg(long, num_args = 2, value_names = ["Q", "P"], conflicts_with = "fraction")]
        pair: Option<Vec<u64>>,
    },
    /// Fock's function at t in [0, 1/2], or one of its one-sided derivatives.
    Psi {
        fraction: FareyFraction,
        #[arg(long, value_parser = parse_side)]
        deriv: Option<Side>,
    },
    /// Corner data of the unit ball at the coprime direction (q, p).
    Slopes { q: u64, p: u64 },
    /// The extreme corner slopes sigma_- and sigma_+.
    Sigma {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(0..=1000))]
        digits: u32,
    },
    /// Classify the Markov ordering along one lattice line.
    ScanLine {
        #[arg(long, allow_hyphen_values = true)]
        slope: Slope,
        /// Base point `q0,p0`.
        #[arg(long, value_parser = parse_point)]
        through: (i64, i64),
        /// Keep primitive points only.
        #[arg(long)]
        coprime: bool,
        #[arg(long)]
        bound: u64,
    },
    /// Search for strictly antimodal lines through (k, k - 1).
    FindAntimodal {
        #[arg(long, allow_hyphen_values = true)]
        slope: Slope,
        #[arg(long)]
        kmax: u64,
        #[arg(long, default_value_t = 2)]
        kstart: u64,
        /// Stop after this many witnesses.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        /// Defaults to a bound that finishes in seconds.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Collision census of Markov labels over coprime pairs.
    Census {
        #[arg(long)]
        bound: u64,
    },
    /// Draw the unit ball of the stable norm.
    BallSvg {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_side(s: &str) -> std::result::Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_point(s: &str) -> std::result::Result<(i64, i64), String> {
    let (q, p) = s
        .split_once(',')
        .ok_or_else(|| format!("expected q,p, got {s:?}"))?;
    let q = q
        .trim()
        .parse()
        .map_err(|_| format!("bad coordinate {q:?}"))?;
    let p = p
        .trim()
        .parse()
        .map_err(|_| format!("bad coordinate {p:?}"))?;
    Ok((q, p))
}

/// The JSON document printed by each subcommand. Built once per process,
/// so variant size is irrelevant.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Output {
    Markov {
        fraction: FareyFraction,
        markov_number: String,
    },
    Distance {
        q: u64,
        p: u64,
        distance: String,
    },
    Psi {
        fraction: FareyFraction,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        deriv: Option<Side>,
        value: RealEnclosure,
    },
    Slopes(CornerSlopes),
    Sigma {
        digits: u32,
        sigma_minus: String,
        sigma_plus: String,
        sigma_minus_enclosure: RealEnclosure,
        sigma_plus_enclosure: RealEnclosure,
    },
    ScanLine(ScanResult),
    FindAntimodal(AntimodalSearch),
    Verify(SuiteReport),
    Census(CensusReport),
    BallSvg {
        out: String,
        directions: usize,
    },
}

/// `sigma` rounded to `digits` decimals, raising precision until the
/// rounding is certain.
fn certified_digits(
    f: fn(u32) -> Result<RealEnclosure>,
    digits: u32,
    prec: u32,
) -> Result<(String, RealEnclosure)> {
    let mut wp = prec.max(digits * 4 + 16);
    loop {
        let e = f(wp)?;
        if let Some(s) = e.decimal_digits(digits) {
            return Ok((s, e));
        }
        if wp > 1 << 16 {
            return Err(Error::UndecidedAtCap(format!(
                "rounding to {digits} digits"
            )));
        }
        wp *= 2;
    }
}

fn run(command: Command, prec: u32) -> Result<Output> {
    Ok(match command {
        Command::Markov {
            fraction: Some(f), ..
        } => Output::Markov {
            fraction: f,
            markov_number: markov_number(f)?.to_string(),
        },
        Command::Markov { pair: Some(qp), .. } => Output::Distance {
            q: qp[0],
            p: qp[1],
            distance: markov_distance(qp[0], qp[1])?.to_string(),
        },
        Command::Markov { .. } => {
            return Err(Error::Parse("give a fraction p/q or --pair q p".into()))
        }
        Command::Psi { fraction, deriv } => Output::Psi {
            fraction,
            deriv,
            value: match deriv {
                None => psi(fraction, prec)?,
                Some(side) => psi_derivative(fraction, side, prec)?,
            },
        },
        Command::Slopes { q, p } => Output::Slopes(corner_slopes(CoprimePair::new(q, p)?, prec)?),
        Command::Sigma { digits } => {
            let (sm, sme) = certified_digits(sigma_minus, digits, prec)?;
            let (sp, spe) = certified_digits(sigma_plus, digits, prec)?;
            Output::Sigma {
                digits,
                sigma_minus: sm,
                sigma_plus: sp,
                sigma_minus_enclosure: sme,
                sigma_plus_enclosure: spe,
            }
        }
        Command::ScanLine {
            slope,
            through,
            coprime,
            bound,
        } => {
            let mode = if coprime {
                ScanMode::CoprimeOnly
            } else {
                ScanMode::AllSector
            };
            Output::ScanLine(scan_line(LatticeLine::new(slope, through), bound, mode)?)
        }
        Command::FindAntimodal {
            slope,
            kmax,
            kstart,
            limit,
        } => Output::FindAntimodal(find_antimodal(slope, kstart, kmax, limit)?),
        Command::Verify { suite, bound } => {
            Output::Verify(run_suite(suite, bound.unwrap_or(suite.default_bound()))?)
        }
        Command::Census { bound } => Output::Census(collision_census(bound)?),
        Command::BallSvg { bound, out } => {
            let corners = svg::corners(bound, prec)?;
            std::fs::write(&out, svg::render(&corners))?;
            Output::BallSvg {
                out: out.display().to_string(),
                directions: corners.len(),
            }
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UndecidedAtCap(_) => 3,
        Error::Io(_) | Error::Snapshot(_) => 1,
        _ => 2,
    }
}

fn load_cache(path: &Path) -> Result<()> {
    if path.exists() {
        MarkovCache::global().absorb(MarkovCache::load(path)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cache = std::env::var_os("MARKOV_CACHE").map(PathBuf::from);
    if let Some(path) = &cache {
        if let Err(e) = load_cache(path) {
            eprintln!("markov: cache {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    let output = match run(cli.command, cli.prec) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("markov: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let failed = matches!(&output, Output::Verify(r) if !r.passed);
    match serde_json::to_string_pretty(&output) {
        Ok(s) => {
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{s}");
        }
        Err(e) => {
            eprintln!("markov: {e}");
            return ExitCode::from(1);
        }
    }
    if let Some(path) = &cache {
        if let Err(e) = MarkovCache::global().save(path) {
            eprintln!("markov: cache {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(u8::from(failed))
}
