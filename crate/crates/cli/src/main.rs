mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let workers = cli
        .global
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("cli::run: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match pool.install(|| commands::run(&cli)) {
        Ok(report) => report,
        Err(failure) => {
            eprintln!("{failure}");
            return ExitCode::from(failure.exit_code() as u8);
        }
    };
    let text = report.render(cli.global.format);
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("cli::write_output: {}: {e}", path.display());
                return ExitCode::from(2);
            }
            println!("{}", report.summary);
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
