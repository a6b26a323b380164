use clap::Parser;

fn main() {
    let cli = despar_cli::args::Cli::parse();
    if let Err(e) = despar_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
