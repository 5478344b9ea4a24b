fn main() {
    std::process::exit(etcrit_cli::run(std::env::args().collect()));
}
