use clap::Parser;

fn main() {
    let cli = cyclecover_cli::Cli::parse();
    std::process::exit(cyclecover_cli::run(cli));
}
