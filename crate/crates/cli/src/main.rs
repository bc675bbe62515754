use clap::Parser;

fn main() {
    let cli = twrc_cli::Cli::parse();
    if let Err(e) = twrc_cli::run(cli) {
        eprintln!("twrc: {e}");
        std::process::exit(e.exit_code());
    }
}
