fn main() {
    std::process::exit(tailstat_cli::main_with_args(std::env::args_os()));
}
