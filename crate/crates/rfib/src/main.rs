fn main() {
    std::process::exit(rfib::cli::run(std::env::args_os()));
}
