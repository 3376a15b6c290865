use clap::Parser;

fn main() {
    let cli = influence_zone::cli::Cli::parse();
    if let Err(e) = influence_zone::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
