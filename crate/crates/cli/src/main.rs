use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

mod commands;
mod fixtures;
mod report;

use commands::{CmdResult, Input, MmiMode};
use report::{RunReport, Status};

#[derive(Parser, Debug)]
#[command(name = "fracsub", version, about = "Fractional subadditivity of submodular set functions")]
struct Cli {
    /// Absolute tolerance for float instances (rational instances always compare exactly).
    #[arg(long, global = true, env = "FRACSUB_TOL")]
    tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Run the bundled worked examples end to end.
    #[arg(long)]
    worked_examples: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Upper and lower gaps, bound checks and duality for a weighted family.
    Gaps { setfn: PathBuf, family: PathBuf },
    /// Decide modularity from values on the family and the full set only.
    Certify {
        partial: PathBuf,
        family: PathBuf,
        /// Vouch that f is non-decreasing (allows coverings).
        #[arg(long)]
        nondecreasing: bool,
        /// Do not vouch for submodularity; the verdict is then insufficient-data.
        #[arg(long)]
        no_submodular: bool,
    },
    /// Check per-element defects against epsilon/sigma.
    Stability {
        setfn: PathBuf,
        family: PathBuf,
        /// Rational string for rational functions, number for float ones.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: String,
    },
    /// (F,γ)-mutual information and its special cases.
    Mmi {
        dist: PathBuf,
        family: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["dtc", "si", "max", "family"])]
        tc: bool,
        #[arg(long, conflicts_with_all = ["si", "max", "family"])]
        dtc: bool,
        #[arg(long, conflicts_with_all = ["max", "family"])]
        si: bool,
        #[arg(long, conflicts_with = "family")]
        max: bool,
    },
    /// Equality case for a matroid rank function.
    Matroid { matroid: PathBuf, family: PathBuf },
    /// Determinantal inequality and its equality case for a positive-definite matrix.
    Detineq {
        matrix: PathBuf,
        family: Option<PathBuf>,
        /// hadamard, szasz[=k] or fischer=SET (e.g. fischer=1,2).
        #[arg(long, conflicts_with = "family")]
        preset: Option<String>,
    },
    /// Drop zero weights, remove the full set, merge co-occurring elements.
    Normalize { family: PathBuf },
    /// Find weights making an unweighted family a fractional partition.
    FindPartition { family: PathBuf },
    /// Covering/packing equality conditions; without weights, Shearer's integer form.
    Equality { setfn: PathBuf, family: PathBuf },
    /// Emit a seeded random submodular function.
    Generate {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<Input, commands::Failure> {
    Input::read(path)
}

fn run(command: &Command, tol: Option<f64>) -> (&'static str, CmdResult) {
    match command {
        Command::Gaps { setfn, family } => ("gaps", (|| commands::gaps_cmd(&read(setfn)?, &read(family)?, tol))()),
        Command::Certify { partial, family, nondecreasing, no_submodular } => (
            "certify",
            (|| commands::certify_cmd(&read(partial)?, &read(family)?, *nondecreasing, *no_submodular, tol))(),
        ),
        Command::Stability { setfn, family, epsilon } => {
            ("stability", (|| commands::stability_cmd(&read(setfn)?, &read(family)?, epsilon, tol))())
        }
        Command::Mmi { dist, family, tc, dtc, si, max } => {
            let mode = if *tc {
                MmiMode::Tc
            } else if *dtc {
                MmiMode::Dtc
            } else if *si {
                MmiMode::Si
            } else if *max {
                MmiMode::Max
            } else {
                MmiMode::Family
            };
            let r = (|| {
                let fam = family.as_deref().map(read).transpose()?;
                commands::mmi_cmd(&read(dist)?, fam.as_ref(), mode, tol)
            })();
            ("mmi", r)
        }
        Command::Matroid { matroid, family } => {
            ("matroid", (|| commands::matroid_cmd(&read(matroid)?, &read(family)?))())
        }
        Command::Detineq { matrix, family, preset } => {
            let r = (|| {
                let fam = family.as_deref().map(read).transpose()?;
                commands::detineq_cmd(&read(matrix)?, fam.as_ref(), preset.as_deref(), tol)
            })();
            ("detineq", r)
        }
        Command::Normalize { family } => ("normalize", (|| commands::normalize_cmd(&read(family)?))()),
        Command::FindPartition { family } => ("find-partition", (|| commands::find_partition_cmd(&read(family)?))()),
        Command::Equality { setfn, family } => {
            ("equality", (|| commands::equality_cmd(&read(setfn)?, &read(family)?, tol))())
        }
        Command::Generate { kind, n, seed } => ("generate", commands::generate_cmd(kind, *n, *seed)),
    }
}

fn emit(report: &RunReport, format: Format) {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let version = env!("CARGO_PKG_VERSION").to_string();

    if cli.worked_examples {
        let (result, all_pass) = fixtures::run();
        let report = RunReport {
            command: "worked-examples".into(),
            version,
            inputs_digest: report::digest(&fixtures::inputs()),
            parameters: json!({}),
            status: if all_pass { Status::Ok } else { Status::VerdictFailure },
            result,
        };
        emit(&report, cli.format);
        return ExitCode::from(if all_pass { 0 } else { 1 });
    }

    let Some(command) = cli.command.as_ref() else {
        eprintln!("error: a subcommand or --worked-examples is required (see --help)");
        return ExitCode::from(2);
    };
    let (name, outcome) = run(command, cli.tol);
    match outcome {
        Ok(o) => {
            let inputs: Vec<&[u8]> = o.inputs.iter().map(Vec::as_slice).collect();
            let report = RunReport {
                command: name.into(),
                version,
                inputs_digest: report::digest(&inputs),
                parameters: o.parameters,
                status: if o.consistent { Status::Ok } else { Status::VerdictFailure },
                result: o.result,
            };
            emit(&report, cli.format);
            ExitCode::from(if o.consistent { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
