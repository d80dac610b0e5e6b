//! Command-line driver: `rank`, `exact`, `validate` and `stats`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::el::InconsistencyPolicy;
use crate::io::{load_kb, report, Diagnostic, KbDocument};
use crate::mln::{GroundMln, MlnError, DEFAULT_GROUNDING_CAP};
use crate::oracle::{exact_rank_ground, OracleError, DEFAULT_ORACLE_CAP};
use crate::rank::{RankConfig, Ranker, StopCondition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "tcpel",
    version,
    about = "Ranking queries over probabilistic EL++ knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Policy {
    Explode,
    Skip,
}

impl From<Policy> for InconsistencyPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Explode => InconsistencyPolicy::Explode,
            Policy::Skip => InconsistencyPolicy::Skip,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Anytime ranking of atomic consequences.
    Rank {
        file: PathBuf,
        #[arg(long)]
        max_classes: Option<u128>,
        #[arg(long)]
        max_worlds: Option<u128>,
        #[arg(long)]
        max_seconds: Option<f64>,
        /// Stop once the unassigned-mass bound is at most this value.
        #[arg(long)]
        target_bound: Option<f64>,
        #[arg(long, value_enum, default_value = "explode")]
        inconsistency: Policy,
        /// Bound remaining mass by the next non-empty class.
        #[arg(long)]
        tight_bound: bool,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GROUNDING_CAP)]
        grounding_cap: u128,
    },
    /// Exact probabilities by enumerating every world.
    Exact {
        file: PathBuf,
        /// Largest number of ground atoms to enumerate over.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value = "explode")]
        inconsistency: Policy,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a knowledge base.
    Validate { file: PathBuf },
    /// Sizes of the grounding and the search space.
    Stats {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GROUNDING_CAP)]
        grounding_cap: u128,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, text: &str, path: Option<&Path>) -> i32 {
        match path {
            Some(p) => match std::fs::write(p, text) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(self.err, "error: cannot write {}: {e}", p.display());
                    EXIT_INVALID
                }
            },
            None => {
                let _ = self.out.write_all(text.as_bytes());
                if !text.ends_with('\n') {
                    let _ = self.out.write_all(b"\n");
                }
                EXIT_OK
            }
        }
    }

    fn diagnostics(&mut self, file: &Path, ds: &[Diagnostic]) -> i32 {
        for d in ds {
            let _ = writeln!(self.err, "{}:{d}", file.display());
        }
        EXIT_INVALID
    }

    fn load(&mut self, file: &Path) -> Result<KbDocument, i32> {
        let text = std::fs::read_to_string(file).map_err(|e| {
            let _ = writeln!(self.err, "error: cannot read {}: {e}", file.display());
            EXIT_INVALID
        })?;
        load_kb(&text).map_err(|ds| self.diagnostics(file, &ds))
    }

    fn ground(&mut self, doc: &KbDocument, cap: u128) -> Result<GroundMln, i32> {
        GroundMln::from_kb(&doc.kb, cap).map_err(|e| {
            let _ = writeln!(self.err, "error: {e}");
            match e {
                MlnError::GroundingTooLarge { .. } => EXIT_REFUSED,
                _ => EXIT_INVALID,
            }
        })
    }
}

fn pow2(k: usize) -> String {
    match 1u128.checked_shl(k as u32) {
        Some(v) if k < 128 => v.to_string(),
        _ => format!("2^{k}"),
    }
}

fn execute(cmd: Command, io: &mut Io<'_>) -> Result<i32, i32> {
    match cmd {
        Command::Rank {
            file,
            max_classes,
            max_worlds,
            max_seconds,
            target_bound,
            inconsistency,
            tight_bound,
            output,
            out,
            grounding_cap,
        } => {
            let doc = io.load(&file)?;
            let g = io.ground(&doc, grounding_cap)?;
            let stop = StopCondition {
                max_classes,
                max_worlds,
                max_seconds,
                target_bound,
            };
            let config = RankConfig {
                policy: inconsistency.into(),
                tight_bound,
                grounding_cap,
            };
            let result = Ranker::new(&doc.kb, &g, config.clone()).run(&stop);
            let text = match output {
                Format::Json => report::ranking_json(&result, &stop, &config),
                Format::Tsv => report::ranking_tsv(&result),
            };
            Ok(io.emit(&text, out.as_deref()))
        }
        Command::Exact {
            file,
            cap,
            inconsistency,
            output,
            out,
        } => {
            let doc = io.load(&file)?;
            let g = io.ground(&doc, DEFAULT_GROUNDING_CAP)?;
            match exact_rank_ground(&doc.kb, &g, inconsistency.into(), cap) {
                Ok(r) => {
                    let text = match output {
                        Format::Json => report::exact_json(&r),
                        Format::Tsv => report::exact_tsv(&r),
                    };
                    Ok(io.emit(&text, out.as_deref()))
                }
                Err(e @ OracleError::TooManyAtoms { .. }) => {
                    let _ = writeln!(io.err, "error: {e}");
                    Err(EXIT_REFUSED)
                }
                Err(e) => {
                    let _ = writeln!(io.err, "error: {e}");
                    Err(EXIT_INVALID)
                }
            }
        }
        Command::Validate { file } => {
            let doc = io.load(&file)?;
            let _ = writeln!(
                io.out,
                "ok: {} axioms ({} annotated), {} formulas",
                doc.kb.axioms.len(),
                doc.kb
                    .axioms
                    .iter()
                    .filter(|a| !a.annotation.is_crisp())
                    .count(),
                doc.kb.mln.formulas.len()
            );
            Ok(EXIT_OK)
        }
        Command::Stats {
            file,
            grounding_cap,
        } => {
            let doc = io.load(&file)?;
            let projected =
                GroundMln::projected_size(&doc.kb.mln, &doc.kb.signature.mln_predicates);
            let _ = writeln!(io.out, "projected groundings\t{projected}");
            let g = io.ground(&doc, grounding_cap)?;
            let _ = writeln!(io.out, "ground atoms\t{}", g.n());
            let _ = writeln!(io.out, "ground formulas\t{}", g.formulas().len());
            let _ = writeln!(io.out, "worlds\t{}", pow2(g.n()));
            let _ = writeln!(io.out, "classes\t{}", pow2(g.formulas().len()));
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { out, err };
    match execute(cli.command, &mut io) {
        Ok(code) | Err(code) => code,
    }
}
