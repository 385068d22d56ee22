fn main() {
    std::process::exit(graphss::cli::run(std::env::args_os()));
}
