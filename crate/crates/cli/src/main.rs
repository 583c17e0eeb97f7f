fn main() {
    std::process::exit(esmhd_cli::cli::main_with_args(std::env::args_os()));
}
