use std::process::ExitCode;

use clap::Parser;

mod cli;
mod output;

fn main() -> ExitCode {
    let args = match cli::Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    cli::configure_threads(args.threads);
    let json = args.json;
    match cli::run(args) {
        Ok(out) => {
            println!("{}", out.render(json));
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (code, rendered) = output::render_error(&err, json);
            eprintln!("{rendered}");
            ExitCode::from(code)
        }
    }
}
