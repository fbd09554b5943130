fn main() {
    std::process::exit(fsos::cli::run(std::env::args_os()));
}
