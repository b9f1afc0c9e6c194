use std::process::ExitCode;

use aesthetics_cli::{parse_config, run_batch, Command, ConfigError};
use aesthetics_core::catalog::METRICS;

fn main() -> ExitCode {
    let cmd = match parse_config(std::env::args_os()) {
        Ok(cmd) => cmd,
        Err(ConfigError::Cli(e)) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match cmd {
        Command::ListMetrics => {
            for m in METRICS {
                println!("{:<24} {}", m.id, m.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run(cfg) => match run_batch(&cfg) {
            Ok(s) => {
                eprintln!(
                    "{} rows written, {} unreadable images, {} metric errors",
                    s.rows_written, s.failures, s.metric_errors
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
