fn main() {
    std::process::exit(conesig::cli::run());
}
