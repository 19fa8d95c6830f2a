fn main() {
    std::process::exit(memsosc_cli::main_with_args(std::env::args_os()));
}
