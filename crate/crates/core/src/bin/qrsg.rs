fn main() {
    std::process::exit(qrsemigroup::cli::main_with_args(std::env::args_os()));
}
