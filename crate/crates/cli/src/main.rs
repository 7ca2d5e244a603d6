use std::path::{Path, PathBuf};
use std::process::ExitCode;

use sarlab::config::{build_config, load_config};
use sarlab::csvout::{render_csv, write_csv};
use sarlab::svg::write_svg;
use sarlab::sweep::{run_sweep, RowStatus};
use sarlab::CliError;

const USAGE: &str = "\
usage:
  sarlab sweep <config-file> [--key value ...]   run a parameter sweep, write CSV (and SVG)
  sarlab point [--key value ...]                 evaluate one point, print CSV to stdout
  sarlab validate [--n N] [--seed S]             cross-check closed forms against the oracle

exit codes: 0 success, 1 configuration error, 2 numerical failure.
Keys accepted as overrides are the configuration-file keys (see README).";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, CliError> {
    let Some(cmd) = args.first() else {
        eprintln!("{USAGE}");
        return Ok(ExitCode::from(1));
    };
    match cmd.as_str() {
        "sweep" => {
            let Some(path) = args.get(1).filter(|a| !a.starts_with("--")) else {
                return Err(CliError::Config("sweep needs a configuration file".into()));
            };
            let cfg = load_config(Path::new(path), &args[2..])?;
            let Some(csv_path) = cfg.csv_path.clone() else {
                return Err(CliError::Config(
                    "sweep needs a `csv` output path (in the file or via --csv)".into(),
                ));
            };
            let rows = run_sweep(&cfg)?;
            write_csv(&csv_path, &rows)?;
            if let Some(svg_path) = &cfg.svg_path {
                let label = cfg
                    .sweep
                    .as_ref()
                    .map(|s| s.axis.as_str())
                    .unwrap_or("point");
                write_svg(svg_path, &rows, label)?;
            }
            report_rows(&rows, Some(&csv_path))
        }
        "point" => {
            let cfg = build_config(None, &args[1..])?;
            if cfg.sweep.is_some() {
                return Err(CliError::Config(
                    "`point` evaluates a single point; use `sweep` for grids".into(),
                ));
            }
            let rows = run_sweep(&cfg)?;
            print!("{}", render_csv(&rows)?);
            report_rows(&rows, None)
        }
        "validate" => {
            let mut n = 1_000_000usize;
            let mut seed = 42u64;
            let mut it = args[1..].iter();
            while let Some(flag) = it.next() {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Config(format!("`{flag}` needs a value")))?;
                match flag.as_str() {
                    "--n" => {
                        n = value
                            .parse()
                            .map_err(|_| CliError::Config(format!("bad sample count `{value}`")))?
                    }
                    "--seed" => {
                        seed = value
                            .parse()
                            .map_err(|_| CliError::Config(format!("bad seed `{value}`")))?
                    }
                    other => return Err(CliError::Config(format!("unknown flag `{other}`"))),
                }
            }
            if sarlab::validate::run(n, seed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(CliError::Numeric("validation checks failed".into()))
            }
        }
        other => {
            eprintln!("unknown command `{other}`\n{USAGE}");
            Ok(ExitCode::from(1))
        }
    }
}

fn report_rows(
    rows: &[sarlab::sweep::Row],
    csv_path: Option<&PathBuf>,
) -> Result<ExitCode, CliError> {
    let errors: Vec<&sarlab::sweep::Row> = rows
        .iter()
        .filter(|r| matches!(r.status, RowStatus::Error(_)))
        .collect();
    if let Some(path) = csv_path {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    if errors.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for row in &errors {
            if let RowStatus::Error(msg) = &row.status {
                eprintln!(
                    "error at {} = {}, scheme {}: {msg}",
                    row.sweep_axis, row.sweep_value, row.scheme
                );
            }
        }
        Err(CliError::Numeric(format!(
            "{} of {} rows failed numerically",
            errors.len(),
            rows.len()
        )))
    }
}
