fn main() {
    std::process::exit(sqcc_core::cli::main_with_args(std::env::args_os()));
}
