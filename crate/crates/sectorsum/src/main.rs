use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sectorsum::commands::{self, KindArg, RunArgs};
use sectorsum::config::Suite;
use sectorsum::suites::MellinTable;
use sectorsum::CliError;

/// Operator sums of commuting sectorial matrices: experiments and reference tables.
#[derive(Parser)]
#[command(name = "sectorsum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run test suites; exits 0 when every row passes, 1 on a failed check, 2 on bad input.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Suite to run (repeatable); overrides the config file.
        #[arg(long = "suite", value_parser = parse_suite)]
        suites: Vec<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiplies every upper tolerance.
        #[arg(long)]
        tol_scale: Option<f64>,
    },
    /// Operator-sum inverses and closedness constants for the configured pairs.
    Opsum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Square-function norms for the configured cases.
    Lpnorm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower bounds for R-, gamma- or l^q-boundedness of a family, with a witness dump.
    Bounds {
        #[arg(long, required_unless_present = "replay")]
        family: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "r")]
        kind: KindValue,
        #[arg(long)]
        out: PathBuf,
        /// Witness file; defaults to the output path with a .json extension.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Re-evaluate the estimates stored in a witness file instead.
        #[arg(long, conflicts_with = "family")]
        replay: Option<PathBuf>,
    },
    /// Gamma, Mellin and Dore-Venni reference tables.
    Mellin {
        #[arg(long, value_enum)]
        suite: TableValue,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximal-regularity constants of a heat problem under grid refinement.
    Maxreg {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindValue {
    R,
    Gamma,
    Lq,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableValue {
    Gamma,
    Closedform,
    Plancherel,
    Nielsen,
    Dorevenni,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::parse(s).map_err(|e| e.to_string())
}

fn report_rows<'a>(rows: impl Iterator<Item = &'a sectorsum::report::ResultRow>) -> Result<(), CliError> {
    let mut failed = 0;
    for r in rows.filter(|r| !r.pass) {
        eprintln!("FAIL {}/{}/{}: value {} tolerance {}", r.suite, r.case, r.metric, r.value_re, r.tolerance);
        failed += 1;
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, suites, seed, out, tol_scale } => {
            let outcome = commands::run(&RunArgs { config, suites, seed, out, tol_scale })?;
            println!("wrote {} ({} rows)", outcome.csv.display(), outcome.rows.len());
            if let Some(w) = &outcome.witnesses {
                println!("wrote {}", w.display());
            }
            report_rows(outcome.rows.iter())
        }
        Command::Opsum { config, out } => {
            let r = commands::opsum(&config, &out)?;
            println!("wrote {} ({} problems)", out.display(), r.len());
            Ok(())
        }
        Command::Lpnorm { config, out } => {
            let r = commands::lpnorm(&config, &out)?;
            println!("wrote {} ({} cases)", out.display(), r.len());
            Ok(())
        }
        Command::Bounds { family, kind, out, witness, replay } => {
            if let Some(w) = replay {
                let records = commands::replay(&w, &out)?;
                println!("wrote {} ({} estimates)", out.display(), records.len());
                let bad: Vec<_> = records.iter().filter(|r| !r.pass).collect();
                for r in &bad {
                    eprintln!("FAIL replay {} {}: recorded {} replayed {}", r.family, r.kind, r.recorded, r.replayed);
                }
                return if bad.is_empty() { Ok(()) } else { Err(CliError::ChecksFailed(bad.len())) };
            }
            let family = family.ok_or_else(|| CliError::Config("--family is required".into()))?;
            let kind = match kind {
                KindValue::R => KindArg::R,
                KindValue::Gamma => KindArg::Gamma,
                KindValue::Lq => KindArg::Lq,
            };
            let (record, wpath) = commands::bounds(&family, kind, &out, witness.as_deref())?;
            println!("{} lower bound {} (witness {})", record.kind, record.lower_bound, wpath.display());
            Ok(())
        }
        Command::Mellin { suite, seed, tol_scale, out } => {
            let table = match suite {
                TableValue::Gamma => MellinTable::Gamma,
                TableValue::Closedform => MellinTable::Closedform,
                TableValue::Plancherel => MellinTable::Plancherel,
                TableValue::Nielsen => MellinTable::Nielsen,
                TableValue::Dorevenni => MellinTable::Dorevenni,
            };
            let rows = commands::mellin(table, seed, tol_scale, &out)?;
            println!("wrote {} ({} rows)", out.display(), rows.len());
            report_rows(rows.iter())
        }
        Command::Maxreg { config, out } => {
            let r = commands::maxreg(&config, &out)?;
            println!("wrote {} ({} grids)", out.display(), r.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
