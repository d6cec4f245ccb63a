fn main() {
    std::process::exit(levelring::cli::main_with_args(std::env::args_os()));
}
