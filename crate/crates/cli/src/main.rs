use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use burau_core::cache::GroupCache;
use burau_core::lifting::{LiftFamily, LiftRequest};
use burau_core::{burau, member, reduce, reduced_burau, BraidWord, IntMatrix, Lab, VerificationReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Finite-quotient checks for the integral Burau representation.
///
/// Statements about the infinite groups B_n[l] are checked through their
/// images in GL(Z/LZ) at the requested finite levels.
#[derive(Parser, Debug)]
#[command(name = "burau-lab", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Directory for cached groups (default: $BURAU_CACHE, else no cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Permit enumerations outside the desk-scale envelope.
    #[arg(long, global = true)]
    allow_big: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Burau matrix of a braid word, e.g. "1 -2 3".
    Mat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reduced: bool,
        word: String,
    },
    /// Enumerate the image of B_n mod L and compare its order.
    Quotient {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        reduced: bool,
    },
    #[command(subcommand)]
    Verify(Verify),
    /// Decide whether an integer matrix lies in the image of B_n[L].
    Member {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Lift a residue matrix to an integral matrix in the chosen group.
    Lift {
        #[arg(long, value_enum)]
        family: Family,
        /// Genus for sp and stab; strand count for gamma and gamma-prime.
        #[arg(long)]
        g: usize,
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        matrix: PathBuf,
        /// Also require the lift to be congruent to I modulo this level.
        #[arg(long)]
        crt: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Order and product structure of B_n/B_n[L].
    ThmA {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        reduced: bool,
    },
    /// Image of B_n[L] computed modulo 2L.
    ThmB {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u64,
    },
    /// B_n[l] B_n[m] = B_n[gcd(l, m)].
    Mult {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        m: u64,
    },
    /// Section search for B_n/B_n[2^k] over S_n.
    Nonsplit {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        reduced: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Sp,
    Stab,
    Gamma,
    GammaPrime,
}

fn read_matrix(path: &PathBuf) -> Result<IntMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    IntMatrix::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(report: VerificationReport) -> u8 {
    println!("{}", report.to_json());
    report.status.exit_code() as u8
}

fn run(cli: Cli) -> Result<u8> {
    let mut lab = Lab::from_env();
    if let Some(dir) = cli.common.cache_dir {
        lab.cache = Some(GroupCache::new(dir));
    }
    lab.allow_big = cli.common.allow_big;

    Ok(match cli.command {
        Command::Mat { n, reduced, word } => {
            let w = BraidWord::parse(&word, n)?;
            let m = if reduced { reduced_burau(&w)? } else { burau(&w) };
            println!("{}", m.to_json_string());
            0
        }
        Command::Quotient { n, level, reduced } => emit(lab.quotient(n, level, reduced)?),
        Command::Verify(v) => emit(match v {
            Verify::ThmA { n, level, reduced } => lab.verify_theorem_a(n, level, reduced)?,
            Verify::ThmB { n, level } => lab.verify_theorem_b(n, level)?,
            Verify::Mult { n, l, m } => lab.verify_multiplicativity(n, l, m)?,
            Verify::Nonsplit { n, k, reduced } => lab.verify_nonsplit(n, k, reduced)?,
        }),
        Command::Member { n, level, matrix } => {
            let m = read_matrix(&matrix)?;
            let verdict = member(&m, n, level);
            let out = json!({
                "member": verdict.member,
                "explanation": verdict.explanation(),
                "clauses": verdict.clauses,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            u8::from(!verdict.member)
        }
        Command::Lift { family, g, modulus, matrix, crt } => {
            let family = match family {
                Family::Sp => LiftFamily::Sp { g },
                Family::Stab => LiftFamily::SpStab { g },
                Family::Gamma => LiftFamily::Gamma { n: g },
                Family::GammaPrime => LiftFamily::GammaPrime { n: g },
            };
            if modulus < 2 {
                bail!("modulus must be at least 2");
            }
            let target = reduce(&read_matrix(&matrix)?, modulus)?;
            let request = LiftRequest { target, family, crt: crt.map(|m| (modulus, m)) };
            println!("{}", request.run()?.to_json_string());
            0
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
