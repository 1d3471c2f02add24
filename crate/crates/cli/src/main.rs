fn main() {
    std::process::exit(dpbw_cli::run(std::env::args_os()));
}
