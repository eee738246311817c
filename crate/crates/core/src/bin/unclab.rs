fn main() {
    std::process::exit(unclab::cli::main_with_args(std::env::args_os()));
}
