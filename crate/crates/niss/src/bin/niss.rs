//! Command-line front end for the NISS solvers and simulators.

use niss::cli::{
    cmd_figures, cmd_simulate, cmd_solve, exit_code_for, FigureKind, SimulateOptions,
    SolveOptions,
};
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
usage:
  niss solve <instance> [--dual] [--oracle] [--d <int>] [--out <dir>] [--trace]
  niss simulate <instance> [--target <file>] [--samples <int>] [--seed <u64>]
                [--out <dir>] [--von-neumann]
  niss figures <fig2|fig5|fig6|lexdecay> [--out <dir>]

exit codes: 0 success, 1 runtime error, 2 parse error, 3 infeasible or capped
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
        Err(CliError::Niss(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}

enum CliError {
    Usage(String),
    Niss(niss::Error),
}

impl From<niss::Error> for CliError {
    fn from(e: niss::Error) -> Self {
        CliError::Niss(e)
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Usage("missing command".into()));
    };
    match command.as_str() {
        "solve" => {
            let mut opts = SolveOptions {
                instance: PathBuf::new(),
                dual: false,
                oracle: false,
                d: None,
                out: PathBuf::from("."),
                trace: false,
            };
            let mut positional = Vec::new();
            let mut it = args[1..].iter();
            while let Some(a) = it.next() {
                match a.as_str() {
                    "--dual" => opts.dual = true,
                    "--oracle" => opts.oracle = true,
                    "--trace" => opts.trace = true,
                    "--d" => opts.d = Some(take_parsed(&mut it, "--d")?),
                    "--out" => opts.out = PathBuf::from(take(&mut it, "--out")?),
                    other if other.starts_with("--") => {
                        return Err(CliError::Usage(format!("unknown flag {other}")));
                    }
                    other => positional.push(other.to_string()),
                }
            }
            let [instance] = positional.as_slice() else {
                return Err(CliError::Usage("solve needs exactly one instance file".into()));
            };
            opts.instance = PathBuf::from(instance);
            let report = cmd_solve(&opts)?;
            println!(
                "{} value = {:.12}  certificate = {}",
                report.method,
                report.value,
                match report.certificate {
                    Some((ls, lc)) => format!("yes (lambda* = {ls:.4}, concave <= {lc:.4})"),
                    None => "no".into(),
                }
            );
            Ok(())
        }
        "simulate" => {
            let mut opts = SimulateOptions {
                instance: PathBuf::new(),
                target: None,
                samples: None,
                seed: None,
                out: PathBuf::from("."),
                von_neumann: false,
            };
            let mut positional = Vec::new();
            let mut it = args[1..].iter();
            while let Some(a) = it.next() {
                match a.as_str() {
                    "--target" => opts.target = Some(PathBuf::from(take(&mut it, "--target")?)),
                    "--samples" => opts.samples = Some(take_parsed(&mut it, "--samples")?),
                    "--seed" => opts.seed = Some(take_parsed(&mut it, "--seed")?),
                    "--out" => opts.out = PathBuf::from(take(&mut it, "--out")?),
                    "--von-neumann" => opts.von_neumann = true,
                    other if other.starts_with("--") => {
                        return Err(CliError::Usage(format!("unknown flag {other}")));
                    }
                    other => positional.push(other.to_string()),
                }
            }
            let [instance] = positional.as_slice() else {
                return Err(CliError::Usage(
                    "simulate needs exactly one instance file".into(),
                ));
            };
            opts.instance = PathBuf::from(instance);
            let report = cmd_simulate(&opts)?;
            println!(
                "tv = {:.6e} (3-sigma tolerance {:.6e}) over {} samples, seed {}",
                report.tv, report.tolerance, report.n, report.seed
            );
            Ok(())
        }
        "figures" => {
            let mut which = None;
            let mut out = PathBuf::from(".");
            let mut it = args[1..].iter();
            while let Some(a) = it.next() {
                match a.as_str() {
                    "--out" => out = PathBuf::from(take(&mut it, "--out")?),
                    other if other.starts_with("--") => {
                        return Err(CliError::Usage(format!("unknown flag {other}")));
                    }
                    other => {
                        which = FigureKind::from_arg(other);
                        if which.is_none() {
                            return Err(CliError::Usage(format!("unknown figure {other}")));
                        }
                    }
                }
            }
            let Some(kind) = which else {
                return Err(CliError::Usage("figures needs a figure name".into()));
            };
            let written = cmd_figures(kind, &out)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    }
}

fn take<'a>(it: &mut std::slice::Iter<'a, String>, flag: &str) -> Result<&'a str, CliError> {
    it.next()
        .map(|s| s.as_str())
        .ok_or_else(|| CliError::Usage(format!("{flag} needs a value")))
}

fn take_parsed<T: std::str::FromStr>(
    it: &mut std::slice::Iter<'_, String>,
    flag: &str,
) -> Result<T, CliError> {
    let raw = take(it, flag)?;
    raw.parse()
        .map_err(|_| CliError::Usage(format!("{flag}: cannot parse `{raw}`")))
}
