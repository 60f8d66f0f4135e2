fn main() {
    std::process::exit(quartic::cli::main_with_args(std::env::args_os()));
}
