fn main() {
    std::process::exit(dimwit_cli::cli::main_with_args(std::env::args_os()));
}
