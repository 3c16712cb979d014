fn main() {
    std::process::exit(bco_rwa::cli::run(std::env::args_os()));
}
