fn main() {
    std::process::exit(dfsl_core::cli::main_with_args(std::env::args_os()));
}
