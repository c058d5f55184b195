use clap::Parser;

fn main() {
    let cli = cran_tools::Cli::parse();
    std::process::exit(cran_tools::run(cli));
}
