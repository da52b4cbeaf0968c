use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use fpl::cli::Cli;
use fpl::commands::{self, Ctx};
use fpl::drivers;
use fpl::FplError;

fn run(cli: &Cli) -> Result<bool, FplError> {
    let cfg = cli.global.resolve()?;
    let pool = drivers::pool(cfg.threads)?;
    let ctx = Ctx {
        cfg: &cfg,
        global: &cli.global,
    };
    let out = pool.install(|| commands::run(&cli.command, &ctx))?;
    let text = commands::emit(&out, &cfg, &cli.global)?;
    if cli.global.out.is_none() {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| FplError::io("<stdout>", e))?;
    }
    let failed = out.record.failed_invariants();
    if !failed.is_empty() {
        eprintln!("fpl: invariant violated: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("fpl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
