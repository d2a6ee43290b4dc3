fn main() {
    std::process::exit(gmlab::cli::run(std::env::args_os()));
}
