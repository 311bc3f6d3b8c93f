use clap::Parser;

use disc_hitting::harness::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("disc-hitting: {e}");
        std::process::exit(e.exit_code());
    }
}
