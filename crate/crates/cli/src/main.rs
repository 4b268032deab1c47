use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use hardy_aux_cli::{exit_code, run, Cli, CliError, RunConfig};

fn emit(cli: &Cli) -> Result<u8, CliError> {
    let config = RunConfig::from_cli(cli)?;
    let report = run(&config)?;
    match &cli.common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(config.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.write(config.format, &mut w)?;
        }
    }
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match emit(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hardy-aux: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
