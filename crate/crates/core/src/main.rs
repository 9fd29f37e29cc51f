use std::io::Write;

use augdist::cli::{execute, Cli};
use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            let _ = stdout.flush();
        }
        Err(f) => {
            eprintln!("augdist: {}", f.message);
            std::process::exit(f.code);
        }
    }
}
