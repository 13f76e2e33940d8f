fn main() {
    std::process::exit(phiqkd::cli::run(std::env::args_os()));
}
