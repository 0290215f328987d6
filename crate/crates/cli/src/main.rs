use clap::Parser;

fn main() {
    let opts = mmd_cli::Options::parse();
    std::process::exit(mmd_cli::run(&opts));
}
