fn main() {
    std::process::exit(polycirc::cli::run(std::env::args_os()));
}
