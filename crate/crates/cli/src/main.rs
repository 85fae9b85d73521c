//! `gbs`: decide pseudo-atoroidality and full irreducibility for a train
//! track map given as JSON documents.

use clap::{Parser, ValueEnum};
use gbs::pipeline::{explain, run, FamilySpec, JobSpec, Mode};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Validate,
    Atoroidal,
    Iwip,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "gbs", version, about = "Decision procedures for automorphisms of GBS groups")]
struct Args {
    /// Graph of groups document.
    #[arg(long)]
    graph: PathBuf,
    /// Train track map document.
    #[arg(long)]
    map: PathBuf,
    /// Index sets `I_v` per vertex; without it every subgroup is allowed.
    #[arg(long)]
    family: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    mode: ModeArg,
    /// Largest legal branch length tried by the pINP search.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    max_l: u64,
    /// Saturation rounds allowed for each Nielsen class.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    max_rounds: u64,
    /// Re-verify every witness with the cover-arithmetic oracles.
    #[arg(long)]
    recheck: bool,
    /// Run the Whitehead stage even without a pseudo-atoroidal verdict.
    #[arg(long)]
    assume_atoroidal: bool,
    /// Disable the parallel pINP search.
    #[arg(long)]
    sequential: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn read<T: serde::de::DeserializeOwned>(what: &str, path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{what} `{}`: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{what} `{}`: {e}", path.display()))
}

fn job(args: &Args) -> Result<JobSpec, String> {
    let mode = match args.mode {
        ModeArg::Validate => Mode::Validate,
        ModeArg::Atoroidal => Mode::Atoroidal,
        ModeArg::Iwip => Mode::Iwip,
        ModeArg::All => Mode::All,
    };
    let mut job = JobSpec::new(read("graph", &args.graph)?, read("map", &args.map)?, mode);
    job.family = args.family.as_deref().map(|p| read::<FamilySpec>("family", p)).transpose()?;
    job.max_l = args.max_l as usize;
    job.max_rounds = args.max_rounds as usize;
    job.recheck = args.recheck;
    job.assume_atoroidal = args.assume_atoroidal;
    job.parallel &= !args.sequential;
    Ok(job)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let job = match job(&args) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("gbs: {e}");
            return ExitCode::from(2);
        }
    };
    let report = run(&job);
    let body = match args.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => explain(&report),
    };
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("gbs: cannot write `{}`: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
