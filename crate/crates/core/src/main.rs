fn main() {
    std::process::exit(eit_faraday::cli::run(std::env::args_os()));
}
