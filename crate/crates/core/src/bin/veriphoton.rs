use clap::Parser;
use veriphoton::cli::{execute, threads_from_env, Cli};

fn main() {
    let cli = Cli::parse();
    let result =
        threads_from_env().and_then(|threads| execute(cli, threads, &mut std::io::stdout()));
    if let Err(e) = result {
        eprintln!("veriphoton: {e}");
        std::process::exit(e.exit_code());
    }
}
