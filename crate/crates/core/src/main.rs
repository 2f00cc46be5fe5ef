fn main() {
    std::process::exit(eulerflow::cli::run(std::env::args_os()));
}
