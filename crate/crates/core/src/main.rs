fn main() {
    std::process::exit(orthozeros::cli::run(std::env::args()));
}
