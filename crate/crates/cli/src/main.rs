fn main() {
    std::process::exit(didm_cli::run(std::env::args_os()));
}
