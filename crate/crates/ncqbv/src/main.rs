use clap::Parser;
use ncqbv::cli::{run_command, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run_command(cli) {
        eprintln!("ncqbv: {e}");
        std::process::exit(e.exit_code());
    }
}
