fn main() {
    std::process::exit(t2nod::cli::main_with_args(std::env::args_os()));
}
