fn main() {
    std::process::exit(tcycle::cli::run_from(std::env::args_os()));
}
