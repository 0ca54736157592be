//! The `balmat` command line.
//!
//! Exit codes: 0 success, 1 failure, 2 usage, 3 resource limit (partial
//! results are still printed), 4 data mismatch or nothing found, 5 puzzle
//! with several solutions, 6 puzzle without solution.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::automaton::{self, PatternSystem};
use crate::balanced;
use crate::error::Error;
use crate::format;
use crate::oeis::{self, FetchConfig, OeisRef};
use crate::puzzle::{self, Grid, SolveStatus};
use crate::recurrence::{self, PolyRecurrence, SearchOrder, Sequence};
use crate::symfunc;
use crate::MemoryCap;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_MULTIPLE: i32 = 5;
pub const EXIT_NO_SOLUTION: i32 = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Plain,
    Bfile,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "balmat", version, about = "Exact counts of balanced and pattern-avoiding binary matrices")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Plain)]
    pub format: OutputFormat,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Memory cap such as 512M or 16G.
    #[arg(long, global = true, default_value = "4G", value_parser = parse_cap)]
    pub memory_cap: MemoryCap,
    /// Never touch the network (also BALMAT_OFFLINE=1).
    #[arg(long, global = true)]
    pub offline: bool,
    /// Directory for downloaded b-files (also BALMAT_OEIS_CACHE).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_cap(s: &str) -> Result<MemoryCap, String> {
    MemoryCap::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count matrices.
    #[command(subcommand)]
    Count(CountCommand),
    /// List every balanced 2k x 2k grid avoiding a pattern system.
    Catalog {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Rational generating function of k x n avoidance counts.
    Gf {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        k: usize,
        /// Largest recurrence order to search (default: transfer states).
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Guess a recurrence from a b-file.
    #[command(subcommand)]
    Guess(GuessCommand),
    /// Check a recurrence against a b-file.
    Verify {
        #[arg(long)]
        recurrence: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Extend initial terms with a recurrence.
    Unroll {
        #[arg(long)]
        recurrence: PathBuf,
        #[arg(long)]
        initial: PathBuf,
        /// Total number of terms to produce.
        #[arg(long)]
        terms: usize,
    },
    /// OEIS b-file tools.
    #[command(subcommand)]
    Oeis(OeisCommand),
    /// Not-Alone puzzles.
    #[command(subcommand)]
    Puzzle(PuzzleCommand),
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    /// Half the number of rows.
    #[arg(long)]
    pub k: usize,
    /// Number of terms.
    #[arg(long)]
    pub terms: usize,
}

#[derive(Debug, Subcommand)]
pub enum CountCommand {
    /// Balanced 2k x 2n matrices.
    Vanilla(SizeArgs),
    /// k x n matrices avoiding the system's patterns.
    Avoid {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Balanced 2k x 2n matrices avoiding the system's patterns.
    BalancedAvoid {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        size: SizeArgs,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    #[default]
    Order,
    Unknowns,
}

#[derive(Debug, Subcommand)]
pub enum GuessCommand {
    /// Constant coefficients.
    Cfinite {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_order: usize,
    },
    /// Polynomial coefficients.
    Precursive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Try cells by order then degree, or by fewest unknowns.
        #[arg(long, value_enum, default_value_t = SearchMode::Order)]
        search: SearchMode,
    },
}

#[derive(Debug, Subcommand)]
pub enum OeisCommand {
    /// Compare a b-file of computed terms with an OEIS entry.
    Compare {
        #[arg(long)]
        id: String,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    #[default]
    Logic,
    Brute,
}

#[derive(Debug, Subcommand)]
pub enum PuzzleCommand {
    /// Solve a puzzle given as text rows of 0, 1 and '.' or as JSON.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Logic)]
        method: SolveMethod,
    },
    /// Create puzzles with a unique solution.
    Generate {
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop removing clues once at most this many remain.
        #[arg(long, default_value_t = 36)]
        max_clues: usize,
        /// Puzzles to create, with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// List every legal full grid of a size.
    Catalog {
        #[arg(long, default_value_t = 6)]
        size: usize,
    },
}

/// Outcome carried back to [`run`]: output text plus exit status.
struct Outcome {
    stdout: String,
    code: i32,
    note: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            code: EXIT_OK,
            note: None,
        }
    }

    fn with(stdout: String, code: i32, note: impl Into<String>) -> Self {
        Outcome {
            stdout,
            code,
            note: Some(note.into()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let text = e.to_string();
                    let line = text.lines().next().unwrap_or("usage error");
                    let _ = writeln!(err, "{line}");
                    EXIT_USAGE
                }
            };
        }
    };
    let threads = match cli.threads {
        Some(0) => {
            let _ = writeln!(err, "error: --threads must be positive");
            return EXIT_USAGE;
        }
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let result = pool.install(|| dispatch(&cli));
    match result {
        Ok(o) => {
            let _ = out.write_all(o.stdout.as_bytes());
            if let Some(note) = o.note {
                let _ = writeln!(err, "{note}");
            }
            o.code
        }
        Err(Error::ResourceLimit { completed, partial, reason }) => {
            let _ = out.write_all(render_terms(cli.format, 0, 1, &partial).as_bytes());
            let _ = writeln!(err, "error: resource limit after {completed} term(s): {reason}");
            EXIT_RESOURCE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidParameter(_) => EXIT_USAGE,
                Error::NeedsMoreData { .. } | Error::Contradiction(_) => EXIT_MISMATCH,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn render_terms<T: std::fmt::Display>(fmt: OutputFormat, k: usize, first: i64, terms: &[T]) -> String {
    match fmt {
        OutputFormat::Plain => format::plain(terms),
        OutputFormat::Bfile => format::bfile(terms, first),
        OutputFormat::Json => format::json_terms(k, terms),
    }
}

fn read_input(path: &Path) -> crate::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn read_system(path: &Path) -> crate::Result<PatternSystem> {
    PatternSystem::from_json(&read_input(path)?)
}

fn read_sequence(path: &Path) -> crate::Result<Sequence> {
    let entries = oeis::parse_bfile(&read_input(path)?)?;
    oeis::BFile {
        id: None,
        entries,
        source: oeis::Source::Inline,
    }
    .to_sequence()
}

fn read_recurrence(path: &Path) -> crate::Result<PolyRecurrence> {
    PolyRecurrence::from_json(&read_input(path)?)
}

fn positive(name: &str, v: usize) -> crate::Result<usize> {
    if v == 0 {
        return Err(Error::invalid(format!("--{name} must be positive")));
    }
    Ok(v)
}

fn dispatch(cli: &Cli) -> crate::Result<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Count(c) => count(cli, c),
        Command::Catalog { system, k } => {
            let sys = read_system(system)?;
            let grids = balanced::catalog_full_grids(&sys, positive("k", *k)?, cli.memory_cap)?;
            Ok(Outcome::ok(render_grids(fmt, &grids)))
        }
        Command::Gf { system, k, max_order } => {
            let sys = read_system(system)?;
            let (gf, rec) = automaton::generating_function(&sys, positive("k", *k)?, *max_order)?;
            let gf = gf.normalized();
            let text = match fmt {
                OutputFormat::Json => {
                    let strs = |p: &[num_rational::BigRational]| p.iter().map(ToString::to_string).collect::<Vec<_>>();
                    let doc = json!({
                        "numerator": strs(&gf.numerator),
                        "denominator": strs(&gf.denominator),
                        "recurrence": serde_json::from_str::<serde_json::Value>(&rec.to_poly().to_json())?,
                    });
                    format!("{doc}\n")
                }
                _ => format!("{gf}\n{rec}\n"),
            };
            Ok(Outcome::ok(text))
        }
        Command::Guess(g) => guess(fmt, g),
        Command::Verify { recurrence, input } => {
            let rec = read_recurrence(recurrence)?;
            let seq = read_sequence(input)?;
            let report = recurrence::verify_recurrence(&rec, &seq);
            let text = match fmt {
                OutputFormat::Json => format!(
                    "{}\n",
                    json!({
                        "success": report.success(),
                        "checked": report.checked,
                        "first_index": report.first_index,
                        "last_index": report.last_index,
                        "first_failure": report.first_failure,
                    })
                ),
                _ => match (report.success(), report.first_failure) {
                    (true, _) => format!(
                        "ok: zero at all {} indices n = {}..{}\n",
                        report.checked,
                        report.first_index.unwrap_or(0),
                        report.last_index.unwrap_or(0)
                    ),
                    (false, Some(n)) => format!("fail: nonzero at n = {n}\n"),
                    (false, None) => "fail: not enough terms to evaluate the recurrence\n".to_string(),
                },
            };
            let code = if report.success() { EXIT_OK } else { EXIT_MISMATCH };
            Ok(Outcome {
                stdout: text,
                code,
                note: None,
            })
        }
        Command::Unroll { recurrence, initial, terms } => {
            let rec = read_recurrence(recurrence)?;
            let seq = read_sequence(initial)?;
            let report = recurrence::unroll(&rec, &seq, *terms)?;
            let text = render_terms(fmt, 0, report.offset, &report.terms);
            Ok(match report.first_non_integer {
                None => Outcome::ok(text),
                Some(n) => Outcome::with(text, EXIT_MISMATCH, format!("non-integer term at n = {n}")),
            })
        }
        Command::Oeis(OeisCommand::Compare { id, input }) => {
            let id = OeisRef::parse(id)?;
            let seq = read_sequence(input)?;
            let mut config = FetchConfig::from_env();
            config.offline |= cli.offline;
            if let Some(dir) = &cli.cache_dir {
                config.cache_dir = Some(dir.clone());
            }
            let bfile = oeis::fetch_bfile(&id, &config)?;
            let report = oeis::compare(&seq.terms, &bfile, seq.offset);
            let text = match fmt {
                OutputFormat::Json => format!(
                    "{}\n",
                    json!({
                        "id": id.as_str(),
                        "match": report.full_match(),
                        "compared": report.compared,
                        "matching_prefix": report.matching_prefix,
                        "computed_terms": report.computed_terms,
                        "reference_terms": report.reference_terms,
                        "first_mismatch": report.first_mismatch.as_ref().map(|m| json!({
                            "index": m.index,
                            "computed": m.computed.to_string(),
                            "expected": m.expected.to_string(),
                        })),
                    })
                ),
                _ => {
                    let mut s = format!(
                        "{id}: {} of {} compared terms match ({} computed, {} in b-file)\n",
                        report.matching_prefix, report.compared, report.computed_terms, report.reference_terms
                    );
                    if let Some(m) = &report.first_mismatch {
                        s.push_str(&format!(
                            "first mismatch at n = {}: computed {}, expected {}\n",
                            m.index, m.computed, m.expected
                        ));
                    }
                    s
                }
            };
            let code = if report.full_match() { EXIT_OK } else { EXIT_MISMATCH };
            Ok(Outcome {
                stdout: text,
                code,
                note: None,
            })
        }
        Command::Puzzle(p) => puzzle_cmd(cli, p),
    }
}

fn count(cli: &Cli, c: &CountCommand) -> crate::Result<Outcome> {
    let fmt = cli.format;
    match c {
        CountCommand::Vanilla(s) => {
            let seq = symfunc::bk_terms_with(positive("k", s.k)?, positive("terms", s.terms)?, cli.memory_cap)?;
            Ok(Outcome::ok(render_terms(fmt, s.k, 1, &seq.terms)))
        }
        CountCommand::Avoid { system, size } => {
            let sys = read_system(system)?;
            let terms = automaton::mk_terms(&sys, positive("k", size.k)?, positive("terms", size.terms)?)?;
            Ok(Outcome::ok(render_terms(fmt, size.k, 1, &terms)))
        }
        CountCommand::BalancedAvoid { system, size } => {
            let sys = read_system(system)?;
            let terms = balanced::balanced_avoid_terms(
                &sys,
                positive("k", size.k)?,
                positive("terms", size.terms)?,
                cli.memory_cap,
            )?;
            Ok(Outcome::ok(render_terms(fmt, size.k, 1, &terms)))
        }
    }
}

fn guess(fmt: OutputFormat, g: &GuessCommand) -> crate::Result<Outcome> {
    let report = match g {
        GuessCommand::Cfinite { input, max_order } => {
            recurrence::guess_cfinite(&read_sequence(input)?, positive("max-order", *max_order)?)?
        }
        GuessCommand::Precursive {
            input,
            max_order,
            max_degree,
            search,
        } => {
            let order = match search {
                SearchMode::Order => SearchOrder::OrderThenDegree,
                SearchMode::Unknowns => SearchOrder::FewestUnknowns,
            };
            recurrence::guess_precursive_with(
                &read_sequence(input)?,
                positive("max-order", *max_order)?,
                *max_degree,
                order,
            )?
        }
    };
    let rec = report.recurrence.as_ref().map(PolyRecurrence::normalized);
    let text = match fmt {
        OutputFormat::Json => {
            let rec_json = match &rec {
                Some(r) => serde_json::from_str::<serde_json::Value>(&r.to_json())?,
                None => serde_json::Value::Null,
            };
            format!(
                "{}\n",
                json!({
                    "found": rec.is_some(),
                    "recurrence": rec_json,
                    "terms_supplied": report.terms_supplied,
                    "unknowns": report.unknowns,
                    "fit_equations": report.fit_equations,
                    "held_out": report.held_out,
                    "margin": report.margin,
                    "margin_met": report.margin_met,
                    "cells_tried": report.cells_tried,
                    "notes": report.notes,
                })
            )
        }
        _ => {
            let mut s = match &rec {
                Some(r) => format!("{r}\n"),
                None => "no recurrence found\n".to_string(),
            };
            s.push_str(&format!(
                "terms {}, unknowns {}, fit equations {}, held-out {} (margin {}{})\n",
                report.terms_supplied,
                report.unknowns,
                report.fit_equations,
                report.held_out,
                report.margin,
                if report.margin_met { "" } else { ", not met" }
            ));
            s
        }
    };
    let code = if rec.is_some() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome {
        stdout: text,
        code,
        note: None,
    })
}

fn render_grids(fmt: OutputFormat, grids: &[balanced::BitGrid]) -> String {
    match fmt {
        OutputFormat::Json => format!("{}\n", balanced::catalog_to_json(grids)),
        _ => {
            let blocks: Vec<String> = grids.iter().map(|g| g.row_strings().join("\n") + "\n").collect();
            blocks.join("\n")
        }
    }
}

fn puzzle_cmd(cli: &Cli, p: &PuzzleCommand) -> crate::Result<Outcome> {
    let fmt = cli.format;
    match p {
        PuzzleCommand::Catalog { size } => {
            let grids = puzzle::catalog(*size, cli.memory_cap)?;
            Ok(Outcome::ok(render_grids(fmt, &grids)))
        }
        PuzzleCommand::Generate {
            size,
            seed,
            max_clues,
            count,
        } => {
            let catalog = puzzle::catalog(*size, cli.memory_cap)?;
            let seeds: Vec<u64> = (0..positive("count", *count)? as u64).map(|i| seed.wrapping_add(i)).collect();
            let grids = puzzle::generate_batch(*size, &seeds, *max_clues, &catalog)?;
            let text = match fmt {
                OutputFormat::Json => {
                    let docs: Vec<serde_json::Value> = grids
                        .iter()
                        .map(|g| serde_json::from_str(&g.to_json()))
                        .collect::<Result<_, _>>()?;
                    if docs.len() == 1 {
                        format!("{}\n", docs[0])
                    } else {
                        format!("{}\n", serde_json::Value::Array(docs))
                    }
                }
                _ => grids.iter().map(Grid::to_text).collect::<Vec<_>>().join("\n"),
            };
            Ok(Outcome::ok(text))
        }
        PuzzleCommand::Solve { input, method } => {
            let grid = Grid::parse(&read_input(input)?)?;
            let (status, trace, split) = match method {
                SolveMethod::Logic => {
                    let o = puzzle::solve_logic(&grid);
                    (o.status, Some(o.trace), o.needed_case_split)
                }
                SolveMethod::Brute => {
                    let catalog = puzzle::catalog(grid.size(), cli.memory_cap)?;
                    let found = puzzle::solve_brute_capped(&grid, &catalog, 2)?;
                    let status = match found.len() {
                        0 => SolveStatus::None,
                        1 => SolveStatus::Unique(found[0].clone()),
                        _ => SolveStatus::Multiple,
                    };
                    (status, None, false)
                }
            };
            let (label, code) = match &status {
                SolveStatus::Unique(_) => ("unique", EXIT_OK),
                SolveStatus::Multiple => ("multiple", EXIT_MULTIPLE),
                SolveStatus::None => ("none", EXIT_NO_SOLUTION),
            };
            let solution = match &status {
                SolveStatus::Unique(g) => Some(Grid::from_solution(g)),
                _ => None,
            };
            let text = match fmt {
                OutputFormat::Json => format!(
                    "{}\n",
                    json!({
                        "status": label,
                        "solution": solution.as_ref().map(Grid::row_strings),
                        "needed_case_split": split,
                        "trace": trace.map(|t| serde_json::to_value(t.steps)).transpose()?,
                    })
                ),
                _ => match &solution {
                    Some(g) => g.to_text(),
                    None => format!("{label}\n"),
                },
            };
            Ok(Outcome {
                stdout: text,
                code,
                note: None,
            })
        }
    }
}
