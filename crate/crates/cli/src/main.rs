use clap::Parser;
use entrosteer_cli::{execute, RunConfig};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let config = RunConfig::parse();
    let code = match execute(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("entrosteer: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
