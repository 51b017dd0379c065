fn main() {
    std::process::exit(cellcoh::cli::main_with_args(std::env::args_os()));
}
