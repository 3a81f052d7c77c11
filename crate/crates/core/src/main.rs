fn main() {
    std::process::exit(qnr::cli::run(std::env::args_os()));
}
