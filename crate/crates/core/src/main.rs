fn main() {
    std::process::exit(surp::cli::run(std::env::args_os()));
}
