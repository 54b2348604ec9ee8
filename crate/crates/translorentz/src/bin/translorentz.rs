fn main() {
    std::process::exit(translorentz::cli::run(std::env::args_os()));
}
