use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use isoforge::commands::{run, Cli};
use isoforge::error::VERIFICATION_FAILED;
use isoforge::report::RunReport;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&args);
    let mut report = RunReport::new(args);
    let code = match run(&cli, &mut report) {
        Ok(text) => match emit(&cli, &text, &mut report) {
            Ok(()) if report.all_passed() => 0,
            Ok(()) => VERIFICATION_FAILED,
            Err(e) => {
                report.error = Some(e);
                2
            }
        },
        Err(e) => {
            report.error = Some(e.to_string());
            e.exit_code()
        }
    };
    eprintln!("{}", report.finish());
    ExitCode::from(code as u8)
}

fn emit(cli: &Cli, text: &str, report: &mut RunReport) -> Result<(), String> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            report.outputs.push(path.display().to_string());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}"))?;
            report.outputs.push("stdout".to_string());
        }
    }
    Ok(())
}
