fn main() {
    std::process::exit(phaseport::cli::main_with_args(std::env::args_os()));
}
