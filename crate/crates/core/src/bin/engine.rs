fn main() {
    std::process::exit(mechanics::cli::run(std::env::args_os()));
}
