use std::io;
use std::process::ExitCode;

use clap::Parser;

use biregular::cli::{
    catalog, catalog_text, run, summary_line, threads_from_env, write_outputs, Cli, Command,
};
use biregular::par::init_threads;

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(threads_from_env());
    let result = match cli.command {
        Command::List { json: true } => serde_json::to_string_pretty(&catalog())
            .map(|s| println!("{s}"))
            .map_err(|e| e.to_string()),
        Command::List { json: false } => {
            print!("{}", catalog_text());
            Ok(())
        }
        Command::Run(args) => {
            let config = args.resolve();
            run(&config)
                .and_then(|report| {
                    write_outputs(&report, &mut io::stdout().lock(), &mut io::stderr().lock())?;
                    eprintln!("{}", summary_line(&report));
                    Ok(())
                })
                .map_err(|e| e.to_string())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
