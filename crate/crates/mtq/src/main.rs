use clap::Parser;

fn main() {
    let cli = mtq::Cli::parse();
    std::process::exit(mtq::run(&cli));
}
