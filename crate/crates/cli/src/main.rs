fn main() {
    std::process::exit(scopefoil_cli::main_with_args(std::env::args_os()));
}
