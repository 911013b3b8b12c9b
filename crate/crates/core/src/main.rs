fn main() {
    std::process::exit(muho::cli::run(std::env::args_os()));
}
