fn main() {
    std::process::exit(fullrank::cli::main_with_args(std::env::args_os()));
}
