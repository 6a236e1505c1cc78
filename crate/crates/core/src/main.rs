fn main() {
    std::process::exit(polyhom::cli::run(std::env::args().collect()));
}
