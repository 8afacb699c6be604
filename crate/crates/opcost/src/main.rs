use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use opcost::app;
use opcost::config::{resolve_config, Cli, DEFAULT_CONFIG_FILE};
use opcost::AppError;

/// The config document text: an explicit `--config` path must exist; the
/// default `./opcost.json` is optional.
fn config_document(cli: &Cli) -> Result<Option<String>, AppError> {
    match &cli.command.common().config {
        Some(path) => fs::read_to_string(path)
            .map(Some)
            .map_err(|e| AppError::io(format!("cannot read config {path}: {e}"))),
        None => {
            if Path::new(DEFAULT_CONFIG_FILE).is_file() {
                fs::read_to_string(DEFAULT_CONFIG_FILE)
                    .map(Some)
                    .map_err(|e| {
                        AppError::io(format!("cannot read config {DEFAULT_CONFIG_FILE}: {e}"))
                    })
            } else {
                Ok(None)
            }
        }
    }
}

fn try_main(cli: &Cli) -> Result<(), AppError> {
    let env: BTreeMap<String, String> = std::env::vars().collect();
    let doc = config_document(cli)?;
    let config = resolve_config(cli, &env, doc.as_deref())?;
    app::run(&config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap routes help and version to stdout, diagnostics to stderr
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match try_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
